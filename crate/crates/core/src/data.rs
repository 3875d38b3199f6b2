//! Market data: OHLCV loading, date alignment, returns and turbulence.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default trailing window for the turbulence index, in trading days.
pub const DEFAULT_TURBULENCE_WINDOW: usize = 252;

/// Ridge added to the trailing covariance before inversion.
pub const COVARIANCE_RIDGE: f64 = 1e-8;

/// One daily bar. `close` is the execution price.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OhlcvBar {
    pub date: NaiveDate,
    pub ticker: String,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
    pub volume: f64,
}

impl OhlcvBar {
    pub fn validate(&self) -> Result<()> {
        for price in [self.open, self.high, self.low, self.close] {
            if !(price > 0.0) || !price.is_finite() {
                return Err(Error::NonPositivePrice {
                    date: self.date,
                    ticker: self.ticker.clone(),
                    price,
                });
            }
        }
        if self.high < self.open.max(self.close) || self.low > self.open.min(self.close) {
            return Err(Error::Precondition(format!(
                "inconsistent bar for {} on {}: high/low do not bracket open/close",
                self.ticker, self.date
            )));
        }
        if !(self.volume >= 0.0) {
            return Err(Error::Precondition(format!(
                "negative volume for {} on {}",
                self.ticker, self.date
            )));
        }
        Ok(())
    }
}

/// Aligned `dates × tickers` matrix of close prices.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePanel {
    dates: Vec<NaiveDate>,
    tickers: Vec<String>,
    /// Row-major, `dates.len() * tickers.len()`.
    close: Vec<f64>,
}

impl PricePanel {
    pub fn new(dates: Vec<NaiveDate>, tickers: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if tickers.is_empty() {
            return Err(Error::Precondition("panel needs at least one ticker".into()));
        }
        if rows.len() != dates.len() {
            return Err(Error::DimensionMismatch {
                expected: dates.len(),
                got: rows.len(),
            });
        }
        if dates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition("panel dates must be strictly increasing".into()));
        }
        let unique: BTreeSet<&String> = tickers.iter().collect();
        if unique.len() != tickers.len() {
            return Err(Error::Precondition("duplicate ticker in panel".into()));
        }
        let mut close = Vec::with_capacity(dates.len() * tickers.len());
        for (date, row) in dates.iter().zip(&rows) {
            if row.len() != tickers.len() {
                return Err(Error::DimensionMismatch {
                    expected: tickers.len(),
                    got: row.len(),
                });
            }
            for (ticker, &price) in tickers.iter().zip(row) {
                if !(price > 0.0) || !price.is_finite() {
                    return Err(Error::NonPositivePrice {
                        date: *date,
                        ticker: ticker.clone(),
                        price,
                    });
                }
            }
            close.extend_from_slice(row);
        }
        Ok(Self { dates, tickers, close })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    /// Number of dates (T).
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    /// Number of tickers (D).
    pub fn dims(&self) -> usize {
        self.tickers.len()
    }

    /// Close prices on day `t`.
    pub fn prices(&self, t: usize) -> &[f64] {
        let d = self.dims();
        &self.close[t * d..(t + 1) * d]
    }

    pub fn close(&self, t: usize, d: usize) -> f64 {
        self.close[t * self.dims() + d]
    }

    pub fn date_index(&self, date: NaiveDate) -> Option<usize> {
        self.dates.binary_search(&date).ok()
    }

    /// Restricts the panel to dates in `[start, end]`.
    pub fn slice_dates(&self, start: NaiveDate, end: NaiveDate) -> Result<Self> {
        let lo = self.dates.partition_point(|d| *d < start);
        let hi = self.dates.partition_point(|d| *d <= end);
        if hi.saturating_sub(lo) < 2 {
            return Err(Error::TooFewDates(hi.saturating_sub(lo)));
        }
        let d = self.dims();
        Ok(Self {
            dates: self.dates[lo..hi].to_vec(),
            tickers: self.tickers.clone(),
            close: self.close[lo * d..hi * d].to_vec(),
        })
    }
}

#[derive(Debug, Deserialize)]
struct BarRecord {
    date: String,
    ticker: String,
    open: f64,
    high: f64,
    low: f64,
    close: f64,
    volume: f64,
}

pub const OHLCV_HEADER: [&str; 7] = ["date", "ticker", "open", "high", "low", "close", "volume"];

/// Reads every bar from an OHLCV CSV file, validating each one.
pub fn read_bars(path: &Path) -> Result<Vec<OhlcvBar>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::csv(path, format!("{other:?}")),
    })?;
    let headers = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
    if headers.iter().ne(OHLCV_HEADER.iter().copied()) {
        return Err(Error::csv(
            path,
            format!("expected header {}, found {}", OHLCV_HEADER.join(","), headers.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut bars = Vec::new();
    for record in reader.deserialize::<BarRecord>() {
        let r = record.map_err(|e| Error::csv(path, e))?;
        let date = parse_date(&r.date).map_err(|msg| Error::csv(path, msg))?;
        let bar = OhlcvBar {
            date,
            ticker: r.ticker,
            open: r.open,
            high: r.high,
            low: r.low,
            close: r.close,
            volume: r.volume,
        };
        bar.validate()?;
        bars.push(bar);
    }
    Ok(bars)
}

pub(crate) fn parse_date(s: &str) -> std::result::Result<NaiveDate, String> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").map_err(|e| format!("bad date {s:?}: {e}"))
}

/// Loads an OHLCV CSV into an aligned close-price panel.
///
/// An empty `tickers` slice selects every ticker in the file (sorted).
/// Dates missing for any selected ticker are dropped for all of them.
pub fn load_panel(
    path: &Path,
    tickers: &[String],
    date_range: Option<(NaiveDate, NaiveDate)>,
) -> Result<PricePanel> {
    let bars = read_bars(path)?;
    panel_from_bars(&bars, tickers, date_range)
}

pub fn panel_from_bars(
    bars: &[OhlcvBar],
    tickers: &[String],
    date_range: Option<(NaiveDate, NaiveDate)>,
) -> Result<PricePanel> {
    let selected: Vec<String> = if tickers.is_empty() {
        bars.iter()
            .map(|b| b.ticker.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    } else {
        tickers.to_vec()
    };
    let column: HashMap<&str, usize> = selected
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();

    let mut by_date: BTreeMap<NaiveDate, Vec<Option<f64>>> = BTreeMap::new();
    let mut seen = vec![false; selected.len()];
    for bar in bars {
        let Some(&col) = column.get(bar.ticker.as_str()) else {
            continue;
        };
        seen[col] = true;
        if let Some((start, end)) = date_range {
            if bar.date < start || bar.date > end {
                continue;
            }
        }
        let row = by_date
            .entry(bar.date)
            .or_insert_with(|| vec![None; selected.len()]);
        if row[col].replace(bar.close).is_some() {
            return Err(Error::Precondition(format!(
                "duplicate row for {} on {}",
                bar.ticker, bar.date
            )));
        }
    }
    if let Some(col) = seen.iter().position(|s| !s) {
        return Err(Error::MissingTicker(selected[col].clone()));
    }

    let mut dates = Vec::new();
    let mut rows = Vec::new();
    for (date, row) in by_date {
        if let Some(prices) = row.into_iter().collect::<Option<Vec<f64>>>() {
            dates.push(date);
            rows.push(prices);
        }
    }
    if dates.len() < 2 {
        return Err(Error::TooFewDates(dates.len()));
    }
    PricePanel::new(dates, selected, rows)
}

/// Simple returns, `(T-1) × D`: `r[t][d] = close[t+1][d] / close[t][d] - 1`.
pub fn daily_returns(panel: &PricePanel) -> Vec<Vec<f64>> {
    (1..panel.len())
        .map(|t| {
            panel
                .prices(t)
                .iter()
                .zip(panel.prices(t - 1))
                .map(|(next, prev)| next / prev - 1.0)
                .collect()
        })
        .collect()
}

/// Turbulence values; `dates[i]` is the date whose return produced `values[i]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TurbulenceSeries {
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
}

impl TurbulenceSeries {
    pub fn value_on(&self, date: NaiveDate) -> Option<f64> {
        self.dates.binary_search(&date).ok().map(|i| self.values[i])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Mahalanobis distance of each day's return vector from the mean and
/// covariance of the preceding `window` return rows.
///
/// Return row `i` belongs to panel date `i + 1`, so the output has
/// `T - 1 - window` entries starting at panel date `window + 1`.
pub fn turbulence_index(panel: &PricePanel, window: usize) -> Result<TurbulenceSeries> {
    turbulence_with_ridge(panel, window, COVARIANCE_RIDGE)
}

pub fn turbulence_with_ridge(
    panel: &PricePanel,
    window: usize,
    ridge: f64,
) -> Result<TurbulenceSeries> {
    let dims = panel.dims();
    let min = dims + 2;
    if window < min {
        return Err(Error::WindowTooSmall { window, dims, min });
    }
    if panel.len() <= window {
        return Err(Error::InsufficientHistory {
            needed: window,
            available: panel.len(),
        });
    }
    let returns = daily_returns(panel);
    let mut dates = Vec::new();
    let mut values = Vec::new();
    for t in window..returns.len() {
        let history = &returns[t - window..t];
        let mean = DVector::from_fn(dims, |d, _| {
            history.iter().map(|r| r[d]).sum::<f64>() / window as f64
        });
        let mut cov = DMatrix::<f64>::zeros(dims, dims);
        for row in history {
            let dev = DVector::from_fn(dims, |d, _| row[d] - mean[d]);
            cov.ger(1.0, &dev, &dev, 1.0);
        }
        cov /= (window - 1) as f64;
        for d in 0..dims {
            cov[(d, d)] += ridge;
        }
        let dev = DVector::from_fn(dims, |d, _| returns[t][d] - mean[d]);
        let solved = match cov.clone().cholesky() {
            Some(chol) => chol.solve(&dev),
            None => cov
                .pseudo_inverse(f64::EPSILON)
                .map_err(|e| Error::Precondition(format!("covariance inversion failed: {e}")))?
                * &dev,
        };
        values.push(dev.dot(&solved).max(0.0));
        dates.push(panel.dates()[t + 1]);
    }
    Ok(TurbulenceSeries { dates, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn date(s: &str) -> NaiveDate {
        parse_date(s).unwrap()
    }

    fn panel_1d(prices: &[f64]) -> PricePanel {
        let start = date("2020-01-01");
        let dates = (0..prices.len())
            .map(|i| start + chrono::Days::new(i as u64))
            .collect();
        PricePanel::new(dates, vec!["A".into()], prices.iter().map(|&p| vec![p]).collect()).unwrap()
    }

    fn write_csv(body: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "date,ticker,open,high,low,close,volume").unwrap();
        f.write_all(body.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_two_tickers_three_dates() {
        let f = write_csv(
            "2020-01-03,A,1,1,1,1,10\n2020-01-01,A,1,1,1,1,10\n2020-01-02,A,2,2,2,2,10\n\
             2020-01-01,B,3,3,3,3,5\n2020-01-02,B,4,4,4,4,5\n2020-01-03,B,5,5,5,5,5\n",
        );
        let panel = load_panel(f.path(), &[], None).unwrap();
        assert_eq!(panel.len(), 3);
        assert_eq!(panel.dims(), 2);
        assert_eq!(panel.dates()[0], date("2020-01-01"));
        assert_eq!(panel.prices(1), &[2.0, 4.0]);
    }

    #[test]
    fn inner_join_drops_incomplete_dates() {
        let f = write_csv(
            "2020-01-01,A,1,1,1,1,10\n2020-01-02,A,2,2,2,2,10\n2020-01-03,A,3,3,3,3,10\n\
             2020-01-01,B,3,3,3,3,5\n2020-01-03,B,5,5,5,5,5\n",
        );
        let panel = load_panel(f.path(), &["A".into(), "B".into()], None).unwrap();
        assert_eq!(panel.dates(), &[date("2020-01-01"), date("2020-01-03")]);
        assert_eq!(panel.prices(1), &[3.0, 5.0]);
    }

    #[test]
    fn rejects_zero_close() {
        let f = write_csv("2020-01-01,A,1,1,0.5,0,10\n2020-01-02,A,2,2,2,2,10\n");
        let err = load_panel(f.path(), &[], None).unwrap_err();
        assert!(err.to_string().contains("non-positive price"), "{err}");
    }

    #[test]
    fn missing_ticker_and_too_few_dates() {
        let f = write_csv("2020-01-01,A,1,1,1,1,10\n2020-01-02,A,2,2,2,2,10\n");
        assert!(matches!(
            load_panel(f.path(), &["Z".into()], None),
            Err(Error::MissingTicker(t)) if t == "Z"
        ));
        let range = Some((date("2020-01-02"), date("2020-01-05")));
        assert!(matches!(load_panel(f.path(), &[], range), Err(Error::TooFewDates(1))));
        assert!(matches!(
            load_panel(Path::new("/nonexistent/bars.csv"), &[], None),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn returns_examples() {
        assert_eq!(daily_returns(&panel_1d(&[100.0, 110.0]))[0][0], 110.0 / 100.0 - 1.0);
        assert!((daily_returns(&panel_1d(&[100.0, 110.0]))[0][0] - 0.10).abs() < 1e-12);
        let flat = daily_returns(&panel_1d(&[100.0, 100.0, 100.0]));
        assert_eq!(flat, vec![vec![0.0], vec![0.0]]);
        let r = daily_returns(&panel_1d(&[100.0, 90.0, 99.0]));
        assert!((r[0][0] + 0.10).abs() < 1e-12);
        assert!((r[1][0] - 0.10).abs() < 1e-12);
    }

    #[test]
    fn turbulence_zero_deviation() {
        let mut prices = vec![100.0];
        for _ in 0..5 {
            let last = *prices.last().unwrap();
            prices.push(last * 1.01);
        }
        let series = turbulence_index(&panel_1d(&prices), 3).unwrap();
        assert_eq!(series.len(), 2);
        for v in series.values {
            assert!(v.abs() < 1e-6, "{v}");
        }
    }

    #[test]
    fn turbulence_squared_z_score() {
        // trailing returns [-0.01, 0, 0.01]: mean 0, sample variance 1e-4; today 0.02
        let p1 = 100.0 * 0.99;
        let p3 = p1 * 1.01;
        let panel = panel_1d(&[100.0, p1, p1, p3, p3 * 1.02]);
        let series = turbulence_index(&panel, 3).unwrap();
        assert_eq!(series.len(), 1);
        // ridge 1e-8 on a 1e-4 variance shifts the value by ~1e-4 relative
        assert!((series.values[0] - 4.0).abs() < 1e-3, "{}", series.values[0]);
        assert_eq!(series.dates[0], panel.dates()[4]);
    }

    #[test]
    fn turbulence_constant_panel_is_zero() {
        let series = turbulence_index(&panel_1d(&[50.0; 10]), 4).unwrap();
        assert!(series.values.iter().all(|v| *v == 0.0 && v.is_finite()));
    }

    #[test]
    fn turbulence_window_checks() {
        let panel = panel_1d(&[50.0; 10]);
        assert!(matches!(
            turbulence_index(&panel, 2),
            Err(Error::WindowTooSmall { min: 3, .. })
        ));
        assert!(matches!(
            turbulence_index(&panel, 10),
            Err(Error::InsufficientHistory { .. })
        ));
    }
}
