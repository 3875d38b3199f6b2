#ifndef ENSEMBLE_BACKTEST_H
#define ENSEMBLE_BACKTEST_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum EbStatus {
  EB_STATUS_OK = 0,
  EB_STATUS_NULL_POINTER = 1,
  EB_STATUS_INVALID_ARGUMENT = 2,
  EB_STATUS_IO = 3,
  EB_STATUS_PARSE = 4,
  EB_STATUS_DATA = 5,
  EB_STATUS_CONFIG = 6,
  EB_STATUS_UNDEFINED = 7,
  EB_STATUS_INTERNAL = 8,
} EbStatus;

/**
 * Close-price panel.
 */
typedef struct EbPanel EbPanel;

/**
 * Result of a backtest run.
 */
typedef struct EbReport EbReport;

/**
 * One agent's daily holdings.
 */
typedef struct EbTrajectory EbTrajectory;

/**
 * Four metrics of one equity curve. `sharpe`/`calmar` are NaN when the
 * matching `*_defined` flag is 0.
 */
typedef struct EbMetrics {
  double cumulative_return;
  double max_drawdown;
  double sharpe;
  double calmar;
  uint8_t sharpe_defined;
  uint8_t calmar_defined;
} EbMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next call into this library on the same thread.
 */
const char *eb_last_error(void);

/**
 * Loads an OHLCV CSV. `tickers` is a comma-separated list or NULL for all tickers.
 *
 * # Safety
 * `path` and `tickers` must be NULL or NUL-terminated strings; `out` must be writable.
 */
enum EbStatus eb_panel_load(const char *path, const char *tickers, struct EbPanel **out);

/**
 * # Safety
 * `panel` must be NULL or a handle from [`eb_panel_load`] not yet freed.
 */
void eb_panel_free(struct EbPanel *panel);

/**
 * Number of dates; 0 for NULL.
 *
 * # Safety
 * `panel` must be NULL or a live handle.
 */
uintptr_t eb_panel_len(const struct EbPanel *panel);

/**
 * Number of tickers; 0 for NULL.
 *
 * # Safety
 * `panel` must be NULL or a live handle.
 */
uintptr_t eb_panel_dims(const struct EbPanel *panel);

/**
 * Close of ticker `d` on day `t`.
 *
 * # Safety
 * `panel` must be a live handle; `out` must be writable.
 */
enum EbStatus eb_panel_close(const struct EbPanel *panel, uintptr_t t, uintptr_t d, double *out);

/**
 * Builds an agent from `spec` (`buy_and_hold`, `momentum[:N]` or `replay:PATH`).
 *
 * # Safety
 * `panel` must be a live handle, `spec` a NUL-terminated string and `out` writable.
 */
enum EbStatus eb_agent_build(const struct EbPanel *panel,
                             const char *spec,
                             double initial_balance,
                             uintptr_t agent_id,
                             struct EbTrajectory **out);

/**
 * # Safety
 * `traj` must be NULL or a handle from [`eb_agent_build`] not yet freed.
 */
void eb_trajectory_free(struct EbTrajectory *traj);

/**
 * Copies day `t`'s holdings into `out`, which must have room for `dims` values.
 *
 * # Safety
 * `traj` must be a live handle and `out` must hold `dims` elements.
 */
enum EbStatus eb_trajectory_holdings(const struct EbTrajectory *traj,
                                     uintptr_t t,
                                     uint64_t *out,
                                     uintptr_t dims);

/**
 * Mean normalized dispersion σ̄ of two holdings rows of length `dims`.
 *
 * # Safety
 * `a` and `b` must hold `dims` elements; `out_sigma_bar` must be writable.
 */
enum EbStatus eb_dispersion(const uint64_t *a,
                            const uint64_t *b,
                            uintptr_t dims,
                            double epsilon,
                            double *out_sigma_bar);

/**
 * One decision from a `classifiers x 2` candidate matrix `q` (row-major).
 * `q[2i + k]` is classifier `i`'s probability that agent `k`'s sample is agent `k`.
 * Writes per-classifier picks, the chosen agent and the share deltas from `current`.
 *
 * # Safety
 * `a`, `b`, `current` and `out_action` must hold `dims` elements, `q` must hold
 * `2 * classifiers`, `out_picks` `classifiers`; `out_agent` must be writable.
 */
enum EbStatus eb_decide(const uint64_t *a,
                        const uint64_t *b,
                        const uint64_t *current,
                        uintptr_t dims,
                        const double *q,
                        uintptr_t classifiers,
                        double tau,
                        double epsilon,
                        uintptr_t *out_picks,
                        uintptr_t *out_agent,
                        int64_t *out_action);

/**
 * Metrics of an equity curve of `len` positive values.
 *
 * # Safety
 * `values` must hold `len` elements; `out` must be writable.
 */
enum EbStatus eb_metrics(const double *values,
                         uintptr_t len,
                         double risk_free_rate,
                         struct EbMetrics *out);

/**
 * Runs a backtest. `config` holds `key = value` lines (NULL for defaults);
 * the agent, data and output keys are accepted but ignored here.
 *
 * # Safety
 * Handles must be live; `config` NULL or NUL-terminated; `out` writable.
 */
enum EbStatus eb_backtest_run(const struct EbPanel *panel,
                              const struct EbTrajectory *agent_a,
                              const struct EbTrajectory *agent_b,
                              const char *config,
                              struct EbReport **out);

/**
 * # Safety
 * `report` must be NULL or a handle from [`eb_backtest_run`] not yet freed.
 */
void eb_report_free(struct EbReport *report);

/**
 * Averaged metrics: `strategy` 0 is the ensemble, 1 agent A, 2 agent B.
 *
 * # Safety
 * `report` must be a live handle; `out` writable.
 */
enum EbStatus eb_report_metrics(const struct EbReport *report,
                                uintptr_t strategy,
                                struct EbMetrics *out);

/**
 * Writes metrics.csv, equity.csv, decisions.csv and config.json into `out_dir`.
 *
 * # Safety
 * `report` must be a live handle; `out_dir` NUL-terminated.
 */
enum EbStatus eb_report_write(const struct EbReport *report, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENSEMBLE_BACKTEST_H */
