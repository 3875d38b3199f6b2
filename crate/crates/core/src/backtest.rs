//! Experiment harness: classifier refits on a trailing window, daily
//! ensemble decisions stepped through the environment, base-agent
//! comparison runs, multi-iteration averaging and threshold sweeps.
//!
//! Timeline, with `s = validation_window`: days `0..s` are history only.
//! Trading runs over days `s..T`; on each day `t < T - 1` the portfolio
//! trades at `close[t]` and is marked at `close[t + 1]`. Classifiers are
//! refit on days `t - s .. t` whenever `(t - s) % rebalance_window == 0`.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agents::{delta_to, HoldingsTrajectory};
use crate::classifiers::{
    agent_features, grid_search_cv, window_dataset, ClassifierKind, ClassifierSpec, Criterion, FeatureMatrix,
    Kernel, Model, Penalty, ProbabilityMatrix, StandardScaler, DEFAULT_FOLDS,
};
use crate::data::{turbulence_index, PricePanel, TurbulenceSeries, DEFAULT_TURBULENCE_WINDOW};
use crate::ensemble::{decide, DecisionInput, DecisionRecord, DEFAULT_EPSILON};
use crate::env::{self, clip_action, EnvConfig, PortfolioState, TradeAction, DEFAULT_COST_RATE, DEFAULT_INITIAL_BALANCE};
use crate::metrics::{EquitySeries, MetricReport};
use crate::{Error, Result};

pub const DEFAULT_VALIDATION_WINDOW: usize = 60;
pub const DEFAULT_REBALANCE_WINDOW: usize = 63;
pub const DEFAULT_ITERATIONS: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestConfig {
    pub start: Option<NaiveDate>,
    pub end: Option<NaiveDate>,
    pub initial_balance: f64,
    pub cost_rate: f64,
    pub turbulence_threshold: Option<f64>,
    pub turbulence_window: usize,
    pub tau: f64,
    pub classifier_group: u8,
    pub validation_window: usize,
    pub rebalance_window: usize,
    pub iterations: usize,
    pub folds: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub risk_free_rate: f64,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        Self {
            start: None,
            end: None,
            initial_balance: DEFAULT_INITIAL_BALANCE,
            cost_rate: DEFAULT_COST_RATE,
            turbulence_threshold: None,
            turbulence_window: DEFAULT_TURBULENCE_WINDOW,
            tau: 0.5,
            classifier_group: 5,
            validation_window: DEFAULT_VALIDATION_WINDOW,
            rebalance_window: DEFAULT_REBALANCE_WINDOW,
            iterations: DEFAULT_ITERATIONS,
            folds: DEFAULT_FOLDS,
            seed: 0,
            epsilon: DEFAULT_EPSILON,
            risk_free_rate: 0.0,
        }
    }
}

impl BacktestConfig {
    pub fn validate(&self) -> Result<()> {
        self.env().validate()?;
        if !(self.initial_balance > 0.0) || !self.initial_balance.is_finite() {
            return Err(Error::config("initial_balance", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(Error::config("tau", format!("{} is outside [0, 1]", self.tau)));
        }
        if !(1..=5).contains(&self.classifier_group) {
            return Err(Error::config("group", format!("{} is not in 1..=5", self.classifier_group)));
        }
        if self.validation_window == 0 {
            return Err(Error::config("validation_window", "must be at least 1"));
        }
        if self.rebalance_window == 0 {
            return Err(Error::config("rebalance_window", "must be at least 1"));
        }
        if self.iterations == 0 {
            return Err(Error::config("iterations", "must be at least 1"));
        }
        if self.folds < 2 {
            return Err(Error::config("folds", "must be at least 2"));
        }
        if self.validation_window < self.folds {
            return Err(Error::config(
                "validation_window",
                format!("{} days cannot fill {} folds per agent", self.validation_window, self.folds),
            ));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::config("epsilon", "must be positive"));
        }
        if let (Some(s), Some(e)) = (self.start, self.end) {
            if s > e {
                return Err(Error::config("start", "is after end"));
            }
        }
        Ok(())
    }

    pub fn env(&self) -> EnvConfig {
        EnvConfig {
            cost_rate: self.cost_rate,
            turbulence_threshold: self.turbulence_threshold,
        }
    }
}

/// Classifier specs of group `id`: 1 SVM kernels, 2 logistic penalties,
/// 3 tree criteria, 4 = 1 ∪ 2, 5 = 1 ∪ 2 ∪ 3.
pub fn classifier_group(id: u8) -> Result<Vec<ClassifierSpec>> {
    let svm = [Kernel::Rbf, Kernel::Linear, Kernel::Poly, Kernel::Sigmoid].map(ClassifierKind::Svm);
    let logreg = [Penalty::L1, Penalty::L2, Penalty::ElasticNet].map(ClassifierKind::LogReg);
    let tree = [Criterion::Gini, Criterion::Entropy].map(ClassifierKind::Tree);
    let kinds: Vec<ClassifierKind> = match id {
        1 => svm.to_vec(),
        2 => logreg.to_vec(),
        3 => tree.to_vec(),
        4 => svm.iter().chain(&logreg).copied().collect(),
        5 => svm.iter().chain(&logreg).chain(&tree).copied().collect(),
        _ => return Err(Error::GroupOutOfRange(id)),
    };
    Ok(kinds.into_iter().map(ClassifierSpec::new).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyMetrics {
    pub ensemble: MetricReport,
    pub agents: [MetricReport; 2],
}

#[derive(Debug, Clone)]
pub struct BacktestReport {
    pub config: BacktestConfig,
    pub tickers: Vec<String>,
    pub agent_labels: [String; 2],
    /// Trading dates, `validation_window..T`.
    pub dates: Vec<NaiveDate>,
    /// One ensemble curve per iteration.
    pub ensemble_curves: Vec<EquitySeries>,
    /// Base agents are deterministic, so one curve each serves every iteration.
    pub agent_curves: [EquitySeries; 2],
    /// Decision log per iteration.
    pub decisions: Vec<Vec<DecisionRecord>>,
    /// Classifier refits per iteration.
    pub refits: Vec<usize>,
    pub iteration_metrics: Vec<MetricReport>,
    /// Ensemble metrics averaged over iterations; base-agent metrics.
    pub metrics: StrategyMetrics,
}

impl BacktestReport {
    /// Number of days on which a trade is decided and stepped.
    pub fn trading_steps(&self) -> usize {
        self.dates.len().saturating_sub(1)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for iteration `iteration` of a run seeded with `seed`.
pub fn iteration_seed(seed: u64, iteration: usize) -> u64 {
    splitmix64(splitmix64(seed) ^ iteration as u64)
}

fn check_alignment(panel: &PricePanel, traj: &HoldingsTrajectory) -> Result<()> {
    if traj.dates() != panel.dates() {
        let at = traj
            .dates()
            .iter()
            .zip(panel.dates())
            .position(|(a, b)| a != b)
            .unwrap_or(traj.len().min(panel.len()).saturating_sub(1));
        return Err(Error::Misaligned {
            date: panel.dates()[at.min(panel.len() - 1)],
            message: format!("trajectory {} does not follow the panel dates", traj.label()),
        });
    }
    if traj.holdings().iter().any(|r| r.len() != panel.dims()) {
        return Err(Error::DimensionMismatch {
            expected: panel.dims(),
            got: traj.row(0).len(),
        });
    }
    Ok(())
}

struct Market<'a> {
    panel: &'a PricePanel,
    env: EnvConfig,
    turbulence: Option<TurbulenceSeries>,
    start: usize,
    initial_balance: f64,
}

impl Market<'_> {
    fn turbulence_on(&self, t: usize) -> Option<f64> {
        self.turbulence.as_ref().and_then(|s| s.value_on(self.panel.dates()[t]))
    }

    fn opening_state(&self) -> Result<PortfolioState> {
        PortfolioState::cash(self.panel.prices(self.start).to_vec(), self.initial_balance)
    }

    /// Moves the portfolio toward `target` on day `t` and marks it at `t + 1`.
    fn trade_towards(&self, state: &PortfolioState, target: &[u64], t: usize) -> Result<PortfolioState> {
        let raw = delta_to(state.holdings(), target);
        self.execute(state, &raw, t)
    }

    fn execute(&self, state: &PortfolioState, raw: &TradeAction, t: usize) -> Result<PortfolioState> {
        let action = clip_action(state, raw, self.env.cost_rate);
        let (next, _) = env::step(state, &action, self.panel.prices(t + 1), &self.env, self.turbulence_on(t))?;
        Ok(next)
    }

    fn replay(&self, traj: &HoldingsTrajectory) -> Result<Vec<f64>> {
        let mut state = self.opening_state()?;
        let mut values = vec![state.value()];
        for t in self.start..self.panel.len() - 1 {
            state = self.trade_towards(&state, traj.row(t), t)?;
            values.push(state.value());
        }
        Ok(values)
    }
}

struct Fitted {
    scaler: StandardScaler,
    model: Model,
}

struct IterationOutcome {
    equity: Vec<f64>,
    decisions: Vec<DecisionRecord>,
    refits: usize,
}

fn run_iteration(
    config: &BacktestConfig,
    market: &Market<'_>,
    specs: &[ClassifierSpec],
    agents: [&HoldingsTrajectory; 2],
    seed: u64,
) -> Result<IterationOutcome> {
    let panel = market.panel;
    let mut state = market.opening_state()?;
    let mut equity = vec![state.value()];
    let mut decisions = Vec::with_capacity(panel.len() - market.start);
    let mut fitted: Option<Vec<Fitted>> = None;
    let mut refits = 0;

    for t in market.start..panel.len() - 1 {
        if (t - market.start).is_multiple_of(config.rebalance_window) {
            let window = t - config.validation_window..t;
            let (x, y) = window_dataset(panel, agents, window)?;
            let scaler = StandardScaler::fit(&x)?;
            let z = scaler.transform(&x)?;
            let models = specs
                .iter()
                .enumerate()
                .map(|(k, spec)| {
                    let fold_seed = splitmix64(seed ^ splitmix64((refits as u64) << 8 | k as u64));
                    let result = grid_search_cv(spec, &z, &y, config.folds, fold_seed)?;
                    Ok(Fitted {
                        scaler: scaler.clone(),
                        model: result.model,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            fitted = Some(models);
            refits += 1;
        }

        let h_a = agents[0].row(t);
        let h_b = agents[1].row(t);
        let Some(models) = fitted.as_ref() else {
            // no trained boundary yet: follow agent 0
            state = market.trade_towards(&state, h_a, t)?;
            equity.push(state.value());
            continue;
        };

        let features = [agent_features(panel, agents[0], t), agent_features(panel, agents[1], t)];
        let probabilities = models
            .iter()
            .map(|f| {
                let mut rows = features.to_vec();
                rows.iter_mut().for_each(|r| f.scaler.transform_row_in_place(r));
                f.model.predict_proba(&FeatureMatrix::from_rows(rows)?)
            })
            .collect::<Result<Vec<ProbabilityMatrix>>>()?;

        let record = decide(DecisionInput {
            date: panel.dates()[t],
            holdings: [h_a, h_b],
            probabilities: &probabilities,
            true_labels: [0, 1],
            tau: config.tau,
            current_holdings: state.holdings(),
            epsilon: config.epsilon,
        })?;
        state = market.execute(&state, &TradeAction::new(record.ours_action.clone()), t)?;
        equity.push(state.value());
        decisions.push(record);
    }

    Ok(IterationOutcome {
        equity,
        decisions,
        refits,
    })
}

/// Runs every iteration of the protocol and averages the ensemble metrics.
pub fn run_backtest(
    config: &BacktestConfig,
    panel: &PricePanel,
    agent_a: &HoldingsTrajectory,
    agent_b: &HoldingsTrajectory,
) -> Result<BacktestReport> {
    config.validate()?;
    check_alignment(panel, agent_a)?;
    check_alignment(panel, agent_b)?;
    let start = config.validation_window;
    if panel.len() < start + 2 {
        return Err(Error::InsufficientHistory {
            needed: start + 1,
            available: panel.len(),
        });
    }
    let turbulence = match config.turbulence_threshold {
        Some(_) => Some(turbulence_index(panel, config.turbulence_window)?),
        None => None,
    };
    let market = Market {
        panel,
        env: config.env(),
        turbulence,
        start,
        initial_balance: config.initial_balance,
    };
    let specs = classifier_group(config.classifier_group)?;
    let agents = [agent_a, agent_b];
    let dates = panel.dates()[start..].to_vec();

    let outcomes = (0..config.iterations)
        .into_par_iter()
        .map(|it| run_iteration(config, &market, &specs, agents, iteration_seed(config.seed, it)))
        .collect::<Result<Vec<_>>>()?;

    let agent_values = [market.replay(agent_a)?, market.replay(agent_b)?];
    let agent_metrics = [
        MetricReport::compute(&agent_values[0], config.risk_free_rate)?,
        MetricReport::compute(&agent_values[1], config.risk_free_rate)?,
    ];
    let iteration_metrics = outcomes
        .iter()
        .map(|o| MetricReport::compute(&o.equity, config.risk_free_rate))
        .collect::<Result<Vec<_>>>()?;
    let ensemble = MetricReport::mean(&iteration_metrics)?;

    let mut ensemble_curves = Vec::with_capacity(outcomes.len());
    let mut decisions = Vec::with_capacity(outcomes.len());
    let mut refits = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        ensemble_curves.push(EquitySeries::new(dates.clone(), o.equity)?);
        decisions.push(o.decisions);
        refits.push(o.refits);
    }
    let [va, vb] = agent_values;
    Ok(BacktestReport {
        config: config.clone(),
        tickers: panel.tickers().to_vec(),
        agent_labels: [agent_a.label().to_string(), agent_b.label().to_string()],
        agent_curves: [EquitySeries::new(dates.clone(), va)?, EquitySeries::new(dates.clone(), vb)?],
        dates,
        ensemble_curves,
        decisions,
        refits,
        iteration_metrics,
        metrics: StrategyMetrics {
            ensemble,
            agents: agent_metrics,
        },
    })
}

/// Formats with 10 significant digits, trailing zeros trimmed.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-5..15).contains(&magnitude) {
        return format!("{x:.9e}");
    }
    let decimals = (9 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn format_optional(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".into(), format_number)
}

pub const METRICS_HEADER: [&str; 7] = [
    "model",
    "classifier_group",
    "tau",
    "cumulative_returns",
    "sharpe_ratio",
    "calmar_ratio",
    "max_drawdown",
];

/// Metric cells in published-table order; drawdown negated.
pub fn metric_cells(m: &MetricReport) -> [String; 4] {
    [
        format_number(m.cumulative_return),
        format_optional(m.sharpe),
        format_optional(m.calmar),
        format_number(m.max_drawdown_negated()),
    ]
}

/// Rows of `metrics.csv`: the ensemble, then each base agent.
pub fn metrics_rows(report: &BacktestReport) -> Vec<Vec<String>> {
    let [a, b] = &report.agent_labels;
    let mut rows = Vec::with_capacity(3);
    let mut ensemble = vec![
        format!("{a}&{b} ensemble"),
        report.config.classifier_group.to_string(),
        format_number(report.config.tau),
    ];
    ensemble.extend(metric_cells(&report.metrics.ensemble));
    rows.push(ensemble);
    for (label, m) in report.agent_labels.iter().zip(&report.metrics.agents) {
        let mut row = vec![label.clone(), "-".into(), "-".into()];
        row.extend(metric_cells(m));
        rows.push(row);
    }
    rows
}

fn write_csv(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    writer.write_record(header).map_err(|e| Error::csv(path, e))?;
    for row in rows {
        writer.write_record(&row).map_err(|e| Error::csv(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

pub fn decisions_header(tickers: &[String]) -> Vec<String> {
    let mut header: Vec<String> = ["iteration", "date", "sigma_bar", "tau", "picks", "votes", "final_agent"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(tickers.iter().map(|t| format!("action_{t}")));
    header
}

pub fn decision_row(iteration: usize, record: &DecisionRecord) -> Vec<String> {
    let mut row = vec![
        iteration.to_string(),
        record.date.format("%Y-%m-%d").to_string(),
        format_number(record.sigma_bar),
        format_number(record.tau),
        join(&record.picks),
        join(&record.votes),
        record.final_agent.to_string(),
    ];
    row.extend(record.ours_action.iter().map(i64::to_string));
    row
}

/// Paths of the files written by [`write_report`].
#[derive(Debug, Clone)]
pub struct ReportFiles {
    pub metrics: PathBuf,
    pub equity: PathBuf,
    pub decisions: PathBuf,
    pub config: PathBuf,
}

/// Writes `metrics.csv`, `equity.csv`, `decisions.csv` and `config.json`.
pub fn write_report(report: &BacktestReport, out_dir: &Path) -> Result<ReportFiles> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let files = ReportFiles {
        metrics: out_dir.join("metrics.csv"),
        equity: out_dir.join("equity.csv"),
        decisions: out_dir.join("decisions.csv"),
        config: out_dir.join("config.json"),
    };

    let header: Vec<String> = METRICS_HEADER.iter().map(|s| s.to_string()).collect();
    write_csv(&files.metrics, &header, metrics_rows(report))?;

    let mut header = vec!["date".to_string()];
    header.extend((0..report.ensemble_curves.len()).map(|i| format!("ensemble_{i}")));
    header.extend(["agent_a".to_string(), "agent_b".to_string()]);
    let rows = report.dates.iter().enumerate().map(|(t, date)| {
        let mut row = vec![date.format("%Y-%m-%d").to_string()];
        row.extend(report.ensemble_curves.iter().map(|c| format_number(c.values[t])));
        row.extend(report.agent_curves.iter().map(|c| format_number(c.values[t])));
        row
    });
    write_csv(&files.equity, &header, rows)?;

    let rows = report
        .decisions
        .iter()
        .enumerate()
        .flat_map(|(it, log)| log.iter().map(move |r| decision_row(it, r)));
    write_csv(&files.decisions, &decisions_header(&report.tickers), rows)?;

    let json = serde_json::to_string_pretty(&report.config)
        .map_err(|e| Error::Precondition(format!("config serialization: {e}")))?;
    let mut f = fs::File::create(&files.config).map_err(|e| Error::io(&files.config, e))?;
    writeln!(f, "{json}").map_err(|e| Error::io(&files.config, e))?;
    Ok(files)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub tau: f64,
    pub metrics: StrategyMetrics,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub reports: Vec<BacktestReport>,
    /// Grid values dropped as repeats, in input order.
    pub duplicates: Vec<f64>,
}

/// One backtest per distinct τ. All runs share `config.seed`, so rows are
/// paired: differences between them come from τ alone.
pub fn tau_sweep(
    config: &BacktestConfig,
    tau_grid: &[f64],
    panel: &PricePanel,
    agent_a: &HoldingsTrajectory,
    agent_b: &HoldingsTrajectory,
) -> Result<SweepResult> {
    if tau_grid.is_empty() {
        return Err(Error::EmptyTauGrid);
    }
    let mut taus: Vec<f64> = Vec::with_capacity(tau_grid.len());
    let mut duplicates = Vec::new();
    for &tau in tau_grid {
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::config("tau_grid", format!("{tau} is outside [0, 1]")));
        }
        if taus.contains(&tau) {
            duplicates.push(tau);
        } else {
            taus.push(tau);
        }
    }
    let reports = taus
        .iter()
        .map(|&tau| {
            let cfg = BacktestConfig { tau, ..config.clone() };
            run_backtest(&cfg, panel, agent_a, agent_b)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = reports
        .iter()
        .map(|r| SweepRow {
            tau: r.config.tau,
            metrics: r.metrics.clone(),
        })
        .collect();
    Ok(SweepResult {
        rows,
        reports,
        duplicates,
    })
}

pub fn sweep_header() -> Vec<String> {
    let mut header = vec!["tau".to_string()];
    for strategy in ["ensemble", "agent_a", "agent_b"] {
        for metric in &METRICS_HEADER[3..] {
            header.push(format!("{strategy}_{metric}"));
        }
    }
    header
}

pub fn write_sweep(result: &SweepResult, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let rows = result.rows.iter().map(|row| {
        let mut cells = vec![format_number(row.tau)];
        cells.extend(metric_cells(&row.metrics.ensemble));
        for m in &row.metrics.agents {
            cells.extend(metric_cells(m));
        }
        cells
    });
    write_csv(path, &sweep_header(), rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups() {
        let g3 = classifier_group(3).unwrap();
        assert_eq!(
            g3.iter().map(|s| s.kind.to_string()).collect::<Vec<_>>(),
            ["tree/gini", "tree/entropy"]
        );
        assert_eq!(classifier_group(5).unwrap().len(), 9);
        let g4: Vec<String> = classifier_group(4).unwrap().iter().map(|s| s.kind.to_string()).collect();
        assert_eq!(
            g4,
            [
                "svm/rbf",
                "svm/linear",
                "svm/poly",
                "svm/sigmoid",
                "logreg/l1",
                "logreg/l2",
                "logreg/elasticnet"
            ]
        );
        assert_eq!(classifier_group(1).unwrap().len(), 4);
        assert_eq!(classifier_group(2).unwrap().len(), 3);
        assert!(matches!(classifier_group(0), Err(Error::GroupOutOfRange(0))));
        assert!(matches!(classifier_group(6), Err(Error::GroupOutOfRange(6))));
    }

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(0.1452), "0.1452");
        assert_eq!(format_number(1_000_000.0), "1000000");
        assert_eq!(format_number(1234567.891234), "1234567.891");
        assert_eq!(format_number(-0.278712345678), "-0.2787123457");
        assert_eq!(format_number(f64::NAN), "nan");
        assert_eq!(format_number(1.5e-9), "1.500000000e-9");
    }

    #[test]
    fn config_validation_names_fields() {
        let bad = BacktestConfig {
            tau: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().unwrap_err().to_string().contains("tau"));
        let bad = BacktestConfig {
            classifier_group: 7,
            ..Default::default()
        };
        assert!(bad.validate().unwrap_err().to_string().contains("group"));
        assert!(BacktestConfig::default().validate().is_ok());
    }

    #[test]
    fn seeds_differ_per_iteration() {
        assert_ne!(iteration_seed(1, 0), iteration_seed(1, 1));
        assert_eq!(iteration_seed(1, 3), iteration_seed(1, 3));
    }
}
