//! C ABI over `ensemble_backtest`.
//!
//! Every fallible function returns an [`EbStatus`]; on failure a message is
//! available from [`eb_last_error`] on the same thread until the next call.
//! Objects cross the boundary as opaque handles created by `*_load`,
//! `*_build` or `*_run` functions and released with the matching `*_free`.
//! Strings are NUL-terminated UTF-8. Array arguments are caller-owned and
//! must hold at least the stated number of elements.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use chrono::NaiveDate;
use ensemble_backtest::agents::{AgentSpec, HoldingsTrajectory};
use ensemble_backtest::backtest::{run_backtest, write_report, BacktestReport};
use ensemble_backtest::classifiers::ProbabilityMatrix;
use ensemble_backtest::config::RunConfig;
use ensemble_backtest::data::{load_panel, PricePanel};
use ensemble_backtest::ensemble::{decide, dispersion, DecisionInput};
use ensemble_backtest::metrics::MetricReport;
use ensemble_backtest::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Data = 5,
    Config = 6,
    Undefined = 7,
    Internal = 8,
}

/// Close-price panel.
pub struct EbPanel(PricePanel);

/// One agent's daily holdings.
pub struct EbTrajectory(HoldingsTrajectory);

/// Result of a backtest run.
pub struct EbReport(BacktestReport);

/// Four metrics of one equity curve. `sharpe`/`calmar` are NaN when the
/// matching `*_defined` flag is 0.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EbMetrics {
    pub cumulative_return: f64,
    pub max_drawdown: f64,
    pub sharpe: f64,
    pub calmar: f64,
    pub sharpe_defined: u8,
    pub calmar_defined: u8,
}

impl From<&MetricReport> for EbMetrics {
    fn from(m: &MetricReport) -> Self {
        Self {
            cumulative_return: m.cumulative_return,
            max_drawdown: m.max_drawdown,
            sharpe: m.sharpe.unwrap_or(f64::NAN),
            calmar: m.calmar.unwrap_or(f64::NAN),
            sharpe_defined: m.sharpe.is_some() as u8,
            calmar_defined: m.calmar.is_some() as u8,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Message for the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn eb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

fn status_of(error: &Error) -> EbStatus {
    match error {
        Error::Io { .. } => EbStatus::Io,
        Error::Csv { .. } => EbStatus::Parse,
        Error::Config { .. } | Error::GroupOutOfRange(_) | Error::EmptyTauGrid | Error::InvalidSpec(_) => {
            EbStatus::Config
        }
        Error::UndefinedSharpe | Error::UndefinedCalmar => EbStatus::Undefined,
        Error::DimensionMismatch { .. } | Error::Precondition(_) | Error::InfeasibleAction(_) => {
            EbStatus::InvalidArgument
        }
        _ => EbStatus::Data,
    }
}

struct Failure(EbStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(EbStatus::NullPointer, format!("{what} is null"))
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(EbStatus::InvalidArgument, message.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EbStatus {
    set_last_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EbStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            EbStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_out<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Loads an OHLCV CSV. `tickers` is a comma-separated list or NULL for all tickers.
///
/// # Safety
/// `path` and `tickers` must be NULL or NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eb_panel_load(path: *const c_char, tickers: *const c_char, out: *mut *mut EbPanel) -> EbStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let tickers: Vec<String> = if tickers.is_null() {
            Vec::new()
        } else {
            str_arg(tickers, "tickers")?
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect()
        };
        let panel = load_panel(Path::new(path), &tickers, None)?;
        write_out(out, Box::into_raw(Box::new(EbPanel(panel))), "out")
    })
}

/// # Safety
/// `panel` must be NULL or a handle from [`eb_panel_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eb_panel_free(panel: *mut EbPanel) {
    if !panel.is_null() {
        drop(Box::from_raw(panel));
    }
}

/// Number of dates; 0 for NULL.
///
/// # Safety
/// `panel` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eb_panel_len(panel: *const EbPanel) -> usize {
    panel.as_ref().map_or(0, |p| p.0.len())
}

/// Number of tickers; 0 for NULL.
///
/// # Safety
/// `panel` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eb_panel_dims(panel: *const EbPanel) -> usize {
    panel.as_ref().map_or(0, |p| p.0.dims())
}

/// Close of ticker `d` on day `t`.
///
/// # Safety
/// `panel` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eb_panel_close(panel: *const EbPanel, t: usize, d: usize, out: *mut f64) -> EbStatus {
    guard(|| {
        let p = &handle(panel, "panel")?.0;
        if t >= p.len() || d >= p.dims() {
            return Err(invalid(format!("index ({t}, {d}) outside {}x{}", p.len(), p.dims())));
        }
        write_out(out, p.close(t, d), "out")
    })
}

/// Builds an agent from `spec` (`buy_and_hold`, `momentum[:N]` or `replay:PATH`).
///
/// # Safety
/// `panel` must be a live handle, `spec` a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eb_agent_build(
    panel: *const EbPanel,
    spec: *const c_char,
    initial_balance: f64,
    agent_id: usize,
    out: *mut *mut EbTrajectory,
) -> EbStatus {
    guard(|| {
        let p = &handle(panel, "panel")?.0;
        let spec: AgentSpec = str_arg(spec, "spec")?
            .parse()
            .map_err(|e: String| Failure(EbStatus::Config, e))?;
        let traj = spec.build(p, initial_balance, agent_id)?;
        write_out(out, Box::into_raw(Box::new(EbTrajectory(traj))), "out")
    })
}

/// # Safety
/// `traj` must be NULL or a handle from [`eb_agent_build`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eb_trajectory_free(traj: *mut EbTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Copies day `t`'s holdings into `out`, which must have room for `dims` values.
///
/// # Safety
/// `traj` must be a live handle and `out` must hold `dims` elements.
#[no_mangle]
pub unsafe extern "C" fn eb_trajectory_holdings(
    traj: *const EbTrajectory,
    t: usize,
    out: *mut u64,
    dims: usize,
) -> EbStatus {
    guard(|| {
        let tr = &handle(traj, "trajectory")?.0;
        if t >= tr.len() {
            return Err(invalid(format!("day {t} outside 0..{}", tr.len())));
        }
        let row = tr.row(t);
        if dims != row.len() {
            return Err(invalid(format!("expected {} dims, got {dims}", row.len())));
        }
        slice_out(out, dims, "out")?.copy_from_slice(row);
        Ok(())
    })
}

/// Mean normalized dispersion σ̄ of two holdings rows of length `dims`.
///
/// # Safety
/// `a` and `b` must hold `dims` elements; `out_sigma_bar` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eb_dispersion(
    a: *const u64,
    b: *const u64,
    dims: usize,
    epsilon: f64,
    out_sigma_bar: *mut f64,
) -> EbStatus {
    guard(|| {
        let a = slice_arg(a, dims, "a")?;
        let b = slice_arg(b, dims, "b")?;
        let stats = dispersion([a, b], epsilon)?;
        write_out(out_sigma_bar, stats.mean_normalized, "out_sigma_bar")
    })
}

/// One decision from a `classifiers x 2` candidate matrix `q` (row-major).
/// `q[2i + k]` is classifier `i`'s probability that agent `k`'s sample is agent `k`.
/// Writes per-classifier picks, the chosen agent and the share deltas from `current`.
///
/// # Safety
/// `a`, `b`, `current` and `out_action` must hold `dims` elements, `q` must hold
/// `2 * classifiers`, `out_picks` `classifiers`; `out_agent` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eb_decide(
    a: *const u64,
    b: *const u64,
    current: *const u64,
    dims: usize,
    q: *const f64,
    classifiers: usize,
    tau: f64,
    epsilon: f64,
    out_picks: *mut usize,
    out_agent: *mut usize,
    out_action: *mut i64,
) -> EbStatus {
    guard(|| {
        let a = slice_arg(a, dims, "a")?;
        let b = slice_arg(b, dims, "b")?;
        let current = slice_arg(current, dims, "current")?;
        let q = slice_arg(q, 2 * classifiers, "q")?;
        let probabilities = q
            .chunks_exact(2)
            .map(|c| ProbabilityMatrix::new(vec![[c[0], 1.0 - c[0]], [1.0 - c[1], c[1]]]))
            .collect::<Result<Vec<_>, _>>()?;
        let record = decide(DecisionInput {
            date: NaiveDate::default(),
            holdings: [a, b],
            probabilities: &probabilities,
            true_labels: [0, 1],
            tau,
            current_holdings: current,
            epsilon,
        })?;
        slice_out(out_picks, classifiers, "out_picks")?.copy_from_slice(&record.picks);
        slice_out(out_action, dims, "out_action")?.copy_from_slice(&record.ours_action);
        write_out(out_agent, record.final_agent, "out_agent")
    })
}

/// Metrics of an equity curve of `len` positive values.
///
/// # Safety
/// `values` must hold `len` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eb_metrics(values: *const f64, len: usize, risk_free_rate: f64, out: *mut EbMetrics) -> EbStatus {
    guard(|| {
        let values = slice_arg(values, len, "values")?;
        let report = MetricReport::compute(values, risk_free_rate)?;
        write_out(out, EbMetrics::from(&report), "out")
    })
}

/// Runs a backtest. `config` holds `key = value` lines (NULL for defaults);
/// the agent, data and output keys are accepted but ignored here.
///
/// # Safety
/// Handles must be live; `config` NULL or NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eb_backtest_run(
    panel: *const EbPanel,
    agent_a: *const EbTrajectory,
    agent_b: *const EbTrajectory,
    config: *const c_char,
    out: *mut *mut EbReport,
) -> EbStatus {
    guard(|| {
        let p = &handle(panel, "panel")?.0;
        let a = &handle(agent_a, "agent_a")?.0;
        let b = &handle(agent_b, "agent_b")?.0;
        let mut run = RunConfig::default();
        if !config.is_null() {
            run.apply_text(str_arg(config, "config")?)?;
        }
        let report = run_backtest(&run.backtest, p, a, b)?;
        write_out(out, Box::into_raw(Box::new(EbReport(report))), "out")
    })
}

/// # Safety
/// `report` must be NULL or a handle from [`eb_backtest_run`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eb_report_free(report: *mut EbReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Averaged metrics: `strategy` 0 is the ensemble, 1 agent A, 2 agent B.
///
/// # Safety
/// `report` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn eb_report_metrics(report: *const EbReport, strategy: usize, out: *mut EbMetrics) -> EbStatus {
    guard(|| {
        let r = &handle(report, "report")?.0;
        let m = match strategy {
            0 => &r.metrics.ensemble,
            1 => &r.metrics.agents[0],
            2 => &r.metrics.agents[1],
            _ => return Err(invalid(format!("strategy {strategy} is not 0, 1 or 2"))),
        };
        write_out(out, EbMetrics::from(m), "out")
    })
}

/// Writes metrics.csv, equity.csv, decisions.csv and config.json into `out_dir`.
///
/// # Safety
/// `report` must be a live handle; `out_dir` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn eb_report_write(report: *const EbReport, out_dir: *const c_char) -> EbStatus {
    guard(|| {
        let r = &handle(report, "report")?.0;
        write_report(r, Path::new(str_arg(out_dir, "out_dir")?))?;
        Ok(())
    })
}
