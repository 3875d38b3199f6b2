use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use ensemble_backtest::backtest::{
    metric_cells, metrics_rows, run_backtest, tau_sweep, write_report, write_sweep, METRICS_HEADER,
};
use ensemble_backtest::config::{parse_tau_grid, RunConfig};
use ensemble_backtest::data::{load_panel, PricePanel};
use ensemble_backtest::agents::HoldingsTrajectory;
use ensemble_backtest::synth::write_synth;

/// Backtest a variance-gated classifier ensemble that switches between two trading agents.
#[derive(Parser, Debug)]
#[command(name = "ensemble-bt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a seeded geometric-Brownian-motion OHLCV panel.
    Synth(SynthArgs),
    /// Run one backtest and write metrics.csv, equity.csv, decisions.csv and config.json.
    Backtest(RunArgs),
    /// Run one backtest per τ value and write sweep.csv.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// RNG seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of tickers
    #[arg(long, default_value_t = 5)]
    tickers: usize,
    /// Number of trading days
    #[arg(long, default_value_t = 750)]
    days: usize,
    /// Output CSV path
    #[arg(long, default_value = "prices.csv")]
    out: PathBuf,
}

// Override flags are optional so that unset flags leave config-file values alone;
// the defaults shown are the ones used when neither file nor flag sets a key.
#[derive(Args, Debug)]
struct RunArgs {
    /// Config file of `key = value` lines
    #[arg(long)]
    config: Option<PathBuf>,
    /// OHLCV price CSV (date,ticker,open,high,low,close,volume) [default: none, required]
    #[arg(long)]
    data: Option<PathBuf>,
    /// Agent A: buy_and_hold, momentum[:N] or replay:PATH [default: buy_and_hold]
    #[arg(long)]
    agent_a: Option<String>,
    /// Agent B: buy_and_hold, momentum[:N] or replay:PATH [default: momentum:20]
    #[arg(long)]
    agent_b: Option<String>,
    /// Dispersion threshold τ in [0, 1] [default: 0.5]
    #[arg(long)]
    tau: Option<String>,
    /// Classifier group 1-5 (1 SVM, 2 logistic, 3 tree, 4 = 1+2, 5 = all) [default: 5]
    #[arg(long)]
    group: Option<String>,
    /// Backtest iterations to average [default: 30]
    #[arg(long)]
    iterations: Option<String>,
    /// Base seed for cross-validation folds [default: 0]
    #[arg(long)]
    seed: Option<String>,
    /// Output directory [default: out]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Any other config key, as KEY=VALUE (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated τ values in [0, 1] [default: none, required unless set in the config]
    #[arg(long)]
    tau_grid: Option<String>,
}

impl RunArgs {
    fn resolve(&self) -> anyhow::Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let flags = [
            ("data", self.data.as_ref().map(|p| p.display().to_string())),
            ("agent_a", self.agent_a.clone()),
            ("agent_b", self.agent_b.clone()),
            ("tau", self.tau.clone()),
            ("group", self.group.clone()),
            ("iterations", self.iterations.clone()),
            ("seed", self.seed.clone()),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
        ];
        for (key, value) in flags {
            if let Some(value) = value {
                config.set(key, &value)?;
            }
        }
        for pair in &self.set {
            let Some((key, value)) = pair.split_once('=') else {
                bail!("--set expects KEY=VALUE, got {pair:?}");
            };
            config.set(key, value)?;
        }
        config.validate()?;
        Ok(config)
    }
}

fn load_inputs(config: &RunConfig) -> anyhow::Result<(PricePanel, HoldingsTrajectory, HoldingsTrajectory)> {
    let Some(data) = &config.data else {
        bail!("no price data: pass --data or set `data` in the config file");
    };
    let bt = &config.backtest;
    let range = match (bt.start, bt.end) {
        (None, None) => None,
        (s, e) => Some((s.unwrap_or(NaiveDate::MIN), e.unwrap_or(NaiveDate::MAX))),
    };
    let panel = load_panel(data, &config.tickers, range)?;
    let a = config
        .agent_a
        .build(&panel, bt.initial_balance, 0)
        .with_context(|| format!("agent_a ({})", config.agent_a))?;
    let b = config
        .agent_b
        .build(&panel, bt.initial_balance, 1)
        .with_context(|| format!("agent_b ({})", config.agent_b))?;
    Ok((panel, a, b))
}

fn print_table(header: &[String], rows: &[Vec<String>]) {
    let widths: Vec<usize> = (0..header.len())
        .map(|c| rows.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    println!("{}", line(header));
    for row in rows {
        println!("{}", line(row));
    }
}

fn synth(args: &SynthArgs) -> anyhow::Result<()> {
    write_synth(args.seed, args.tickers, args.days, &args.out)?;
    println!(
        "wrote {} ({} tickers x {} days)",
        args.out.display(),
        args.tickers,
        args.days
    );
    Ok(())
}

fn backtest(args: &RunArgs) -> anyhow::Result<()> {
    let config = args.resolve()?;
    let (panel, a, b) = load_inputs(&config)?;
    let report = run_backtest(&config.backtest, &panel, &a, &b)?;
    let files = write_report(&report, &config.out)?;
    let header: Vec<String> = METRICS_HEADER.iter().map(|s| s.to_string()).collect();
    print_table(&header, &metrics_rows(&report));
    println!("reports written to {}", parent_of(&files.metrics).display());
    Ok(())
}

fn parent_of(path: &Path) -> &Path {
    path.parent().unwrap_or(path)
}

fn sweep(args: &SweepArgs) -> anyhow::Result<()> {
    let mut config = args.run.resolve()?;
    if let Some(grid) = &args.tau_grid {
        config.tau_grid = Some(parse_tau_grid(grid)?);
    }
    let Some(grid) = config.tau_grid.clone() else {
        bail!("invalid config: tau_grid: pass --tau-grid or set `tau_grid` in the config file");
    };
    let (panel, a, b) = load_inputs(&config)?;
    let result = tau_sweep(&config.backtest, &grid, &panel, &a, &b)?;
    for tau in &result.duplicates {
        eprintln!("warning: duplicate tau {tau} in grid ignored");
    }
    let path = config.out.join("sweep.csv");
    write_sweep(&result, &path)?;

    let mut header = vec!["tau".to_string(), "model".to_string()];
    header.extend(METRICS_HEADER[3..].iter().map(|s| s.to_string()));
    let labels = [
        "ensemble".to_string(),
        format!("agent_a ({})", a.label()),
        format!("agent_b ({})", b.label()),
    ];
    let mut rows = Vec::new();
    for row in &result.rows {
        let metrics = [&row.metrics.ensemble, &row.metrics.agents[0], &row.metrics.agents[1]];
        for (label, m) in labels.iter().zip(metrics) {
            let mut cells = vec![ensemble_backtest::backtest::format_number(row.tau), label.clone()];
            cells.extend(metric_cells(m));
            rows.push(cells);
        }
    }
    print_table(&header, &rows);
    println!("sweep written to {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Synth(args) => synth(args),
        Command::Backtest(args) => backtest(args),
        Command::Sweep(args) => sweep(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
