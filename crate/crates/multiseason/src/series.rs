//! Time-series container, preprocessing, and the evaluation metric.
//!
//! All of the model math in this crate is written against 1-based time
//! indices `t = 1..=N`, matching the usual time-series convention. The
//! observation `X_t` is stored at `values()[t - 1]`; this module is the
//! single place where that mapping is defined.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{MsError, Result};

/// Ordered, finite, real-valued observations at unit spacing.
///
/// Immutable after construction; cheap to clone and safe to share across
/// worker threads.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    /// Builds a series from raw values, rejecting empty input and any
    /// NaN/infinite entry (missing values are not imputed).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(MsError::EmptySeries);
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(MsError::NonFinite { index: i + 1 });
            }
        }
        Ok(Self { values })
    }

    /// Number of observations N.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // N >= 1 by construction
    }

    /// Observations in order; `X_t` lives at index `t - 1`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Observation at 1-based time index `t` (must satisfy `1 <= t <= N`).
    pub fn at(&self, t: usize) -> f64 {
        self.values[t - 1]
    }

    /// The leading `n` observations as a new series.
    pub fn prefix(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.values.len() {
            return Err(MsError::LengthMismatch {
                expected: self.values.len(),
                got: n,
            });
        }
        Ok(Self {
            values: self.values[..n].to_vec(),
        })
    }

    /// Subtracts the sample mean, returning the centered series and the
    /// mean that was removed. A second correction pass keeps the residual
    /// mean at machine-noise level even for long series.
    pub fn centered(&self) -> (Self, f64) {
        let n = self.values.len() as f64;
        let mean = self.values.iter().sum::<f64>() / n;
        let mut out: Vec<f64> = self.values.iter().map(|v| v - mean).collect();
        let residual = out.iter().sum::<f64>() / n;
        for v in &mut out {
            *v -= residual;
        }
        (Self { values: out }, mean + residual)
    }
}

/// Point predictions `X̂_{N+1} .. X̂_{N+n}` from forecast origin N.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastResult {
    origin: usize,
    predictions: Vec<f64>,
}

impl ForecastResult {
    pub fn new(origin: usize, predictions: Vec<f64>) -> Result<Self> {
        if predictions.is_empty() {
            return Err(MsError::InvalidHorizon);
        }
        for (j, p) in predictions.iter().enumerate() {
            if !p.is_finite() {
                return Err(MsError::NonFinitePrediction { step: j + 1 });
            }
        }
        Ok(Self {
            origin,
            predictions,
        })
    }

    /// Index N of the last observation used; predictions start at N+1.
    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn horizon(&self) -> usize {
        self.predictions.len()
    }

    pub fn predictions(&self) -> &[f64] {
        &self.predictions
    }
}

/// Cumulative mean squared error `(1/n) Σ (actual_j − predicted_j)²`.
pub fn cmse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    if actual.is_empty() {
        return Err(MsError::EmptySeries);
    }
    if actual.len() != predicted.len() {
        return Err(MsError::LengthMismatch {
            expected: actual.len(),
            got: predicted.len(),
        });
    }
    let sum: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p) * (a - p))
        .sum();
    Ok(sum / actual.len() as f64)
}

/// Reads a single-column CSV: one number per line, optional one-line
/// header, LF or CRLF endings. Parse failures report the 1-based line.
pub fn read_series_csv(path: &Path) -> Result<TimeSeries> {
    let text = std::fs::read_to_string(path)?;
    parse_series_csv(&text)
}

/// Parses CSV text; see [`read_series_csv`].
pub fn parse_series_csv(text: &str) -> Result<TimeSeries> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() {
            continue;
        }
        match line.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if i == 0 => {} // one-line header
            Err(_) => {
                return Err(MsError::CsvParse {
                    line: i + 1,
                    content: line.to_string(),
                })
            }
        }
    }
    TimeSeries::new(values)
}

/// Writes a series as a single-column CSV with header `x`, full precision.
pub fn write_series_csv(path: &Path, series: &TimeSeries) -> Result<()> {
    let mut out = String::with_capacity(series.len() * 12);
    out.push_str("x\n");
    for v in series.values() {
        let _ = writeln!(out, "{v}");
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(matches!(TimeSeries::new(vec![]), Err(MsError::EmptySeries)));
        let err = TimeSeries::new(vec![1.0, f64::NAN, 3.0]).unwrap_err();
        assert!(matches!(err, MsError::NonFinite { index: 2 }));
        assert!(TimeSeries::new(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn center_basic() {
        let (c, m) = TimeSeries::new(vec![1.0, 2.0, 3.0]).unwrap().centered();
        assert_eq!(m, 2.0);
        assert_eq!(c.values(), &[-1.0, 0.0, 1.0]);
    }

    #[test]
    fn center_single_point() {
        let (c, m) = TimeSeries::new(vec![5.0]).unwrap().centered();
        assert_eq!(m, 5.0);
        assert_eq!(c.values(), &[0.0]);
    }

    #[test]
    fn center_is_idempotent() {
        let s = TimeSeries::new((0..500).map(|t| (t as f64 * 0.37).sin() * 9.0 + 4.0).collect())
            .unwrap();
        let (c, _) = s.centered();
        let (_, m2) = c.centered();
        assert!(m2.abs() < 1e-12);
    }

    #[test]
    fn cmse_formula() {
        assert_eq!(cmse(&[1.0, 2.0], &[1.0, 1.0]).unwrap(), 0.5);
        assert_eq!(cmse(&[0.0, 0.0, 0.0], &[1.0, 2.0, 3.0]).unwrap(), 14.0 / 3.0);
        let a = [3.1, -2.0, 0.4];
        assert_eq!(cmse(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn cmse_errors() {
        assert!(cmse(&[], &[]).is_err());
        assert!(cmse(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn cmse_symmetric_and_shift_invariant() {
        // property check over a few deterministic cases
        for k in 0..20 {
            let a: Vec<f64> = (0..8).map(|t| ((t + k) as f64 * 0.71).sin()).collect();
            let b: Vec<f64> = (0..8).map(|t| ((t * k) as f64 * 0.31).cos()).collect();
            let ab = cmse(&a, &b).unwrap();
            let ba = cmse(&b, &a).unwrap();
            assert!((ab - ba).abs() < 1e-15);
            let shift = 7.25;
            let a2: Vec<f64> = a.iter().map(|v| v + shift).collect();
            let b2: Vec<f64> = b.iter().map(|v| v + shift).collect();
            assert!((cmse(&a2, &b2).unwrap() - ab).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_parses_header_and_crlf() {
        let ts = parse_series_csv("value\r\n1.5\r\n-2\r\n3e-1\r\n").unwrap();
        assert_eq!(ts.values(), &[1.5, -2.0, 0.3]);
        let no_header = parse_series_csv("1\n2\n").unwrap();
        assert_eq!(no_header.values(), &[1.0, 2.0]);
    }

    #[test]
    fn csv_reports_failing_line() {
        let err = parse_series_csv("x\n1.0\noops\n2.0\n").unwrap_err();
        match err {
            MsError::CsvParse { line, content } => {
                assert_eq!(line, 3);
                assert_eq!(content, "oops");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn csv_rejects_nan_entries() {
        assert!(parse_series_csv("1.0\nNaN\n").is_err());
    }

    #[test]
    fn csv_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let ts = TimeSeries::new(vec![1.25, -0.5, 1e-17, 42.0]).unwrap();
        write_series_csv(&path, &ts).unwrap();
        let back = read_series_csv(&path).unwrap();
        assert_eq!(back, ts);
    }

    #[test]
    fn forecast_result_checks_finiteness() {
        assert!(ForecastResult::new(10, vec![1.0, f64::INFINITY]).is_err());
        assert!(ForecastResult::new(10, vec![]).is_err());
        let r = ForecastResult::new(10, vec![1.0, 2.0]).unwrap();
        assert_eq!(r.origin(), 10);
        assert_eq!(r.horizon(), 2);
    }
}
