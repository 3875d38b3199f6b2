//! Seeded geometric-Brownian-motion price panels written as OHLCV CSV.
//!
//! Each ticker draws an annual drift from [`DRIFT_RANGE`] and an annual
//! volatility from [`VOL_RANGE`]; closes follow exact GBM steps of one
//! trading day. Open, high and low are derived from neighbouring closes,
//! so the file is valid for the loader but only the close matters.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use chrono::{Datelike, Days, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::OHLCV_HEADER;
use crate::{Error, Result, TRADING_DAYS_PER_YEAR};

pub const DRIFT_RANGE: (f64, f64) = (-0.05, 0.10);
pub const VOL_RANGE: (f64, f64) = (0.10, 0.40);
pub const START_PRICE_RANGE: (f64, f64) = (20.0, 200.0);

/// First calendar date considered; the series starts on the first weekday on or after it.
pub fn first_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 1, 1).expect("valid date")
}

/// `n` consecutive weekdays starting at `start` (or the next weekday).
pub fn business_days(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(n);
    let mut d = start;
    while out.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d + Days::new(1);
    }
    out
}

/// Ticker names `SYN00`, `SYN01`, ...
pub fn ticker_names(count: usize) -> Vec<String> {
    (0..count).map(|i| format!("SYN{i:02}")).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthPanel {
    pub dates: Vec<NaiveDate>,
    pub tickers: Vec<String>,
    /// `closes[t][d]`
    pub closes: Vec<Vec<f64>>,
}

pub fn generate(seed: u64, tickers: usize, days: usize) -> Result<SynthPanel> {
    if tickers == 0 {
        return Err(Error::config("tickers", "must be at least 1"));
    }
    if days < 2 {
        return Err(Error::config("days", "must be at least 2"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dt = 1.0 / TRADING_DAYS_PER_YEAR;
    let params: Vec<(f64, f64, f64)> = (0..tickers)
        .map(|_| {
            let mu = rng.random_range(DRIFT_RANGE.0..=DRIFT_RANGE.1);
            let sigma = rng.random_range(VOL_RANGE.0..=VOL_RANGE.1);
            let p0 = rng.random_range(START_PRICE_RANGE.0..=START_PRICE_RANGE.1);
            (mu, sigma, p0)
        })
        .collect();
    let mut closes = Vec::with_capacity(days);
    let mut current: Vec<f64> = params.iter().map(|p| round4(p.2)).collect();
    closes.push(current.clone());
    for _ in 1..days {
        for (price, &(mu, sigma, _)) in current.iter_mut().zip(&params) {
            let z: f64 = StandardNormal.sample(&mut rng);
            let next = *price * ((mu - 0.5 * sigma * sigma) * dt + sigma * dt.sqrt() * z).exp();
            // four-decimal output must stay strictly positive
            *price = round4(next).max(0.0001);
        }
        closes.push(current.clone());
    }
    Ok(SynthPanel {
        dates: business_days(first_date(), days),
        tickers: ticker_names(tickers),
        closes,
    })
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

/// Renders the panel as OHLCV CSV, rows ordered by date then ticker.
pub fn to_csv(panel: &SynthPanel) -> String {
    let mut out = String::with_capacity(panel.dates.len() * panel.tickers.len() * 56);
    out.push_str(&OHLCV_HEADER.join(","));
    out.push('\n');
    for (t, date) in panel.dates.iter().enumerate() {
        for (d, ticker) in panel.tickers.iter().enumerate() {
            let close = panel.closes[t][d];
            let open = if t == 0 { close } else { panel.closes[t - 1][d] };
            let high = open.max(close);
            let low = open.min(close);
            let volume = 100_000 + ((t * 7919 + d * 104_729) % 900_000);
            out.push_str(&format!(
                "{},{ticker},{open:.4},{high:.4},{low:.4},{close:.4},{volume}\n",
                date.format("%Y-%m-%d")
            ));
        }
    }
    out
}

/// Generates a panel and writes it to `out`, creating parent directories.
pub fn write_synth(seed: u64, tickers: usize, days: usize, out: &Path) -> Result<SynthPanel> {
    let panel = generate(seed, tickers, days)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut f = fs::File::create(out).map_err(|e| Error::io(out, e))?;
    f.write_all(to_csv(&panel).as_bytes()).map_err(|e| Error::io(out, e))?;
    Ok(panel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::load_panel;

    #[test]
    fn deterministic_and_sized() {
        let a = to_csv(&generate(42, 5, 750).unwrap());
        let b = to_csv(&generate(42, 5, 750).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.lines().count(), 3751);
        assert_ne!(a, to_csv(&generate(43, 5, 750).unwrap()));
    }

    #[test]
    fn weekdays_only() {
        let days = business_days(first_date(), 10);
        assert_eq!(days[0], first_date());
        assert!(days.iter().all(|d| !matches!(d.weekday(), Weekday::Sat | Weekday::Sun)));
    }

    #[test]
    fn minimal_panel_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        let synth = write_synth(1, 1, 2, &path).unwrap();
        let panel = load_panel(&path, &[], None).unwrap();
        assert_eq!(panel.len(), 2);
        assert_eq!(panel.dims(), 1);
        assert_eq!(panel.close(1, 0), synth.closes[1][0]);
    }

    #[test]
    fn rejects_degenerate_sizes() {
        assert!(generate(0, 0, 10).is_err());
        assert!(generate(0, 1, 1).is_err());
    }
}
