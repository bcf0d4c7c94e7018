//! Seasonality detection: periodogram decomposition and candidate
//! seasonal lag sets.
//!
//! The detection stage decomposes the series into trigonometric
//! components, ranks frequencies by signal strength, maps the strongest
//! ones to integer periods, and places a block of consecutive lags
//! around each period. Those lag-set candidates feed the model-selection
//! grid.

use serde::{Deserialize, Serialize};

use crate::error::{MsError, Result};
use crate::series::TimeSeries;

/// One trigonometric component at frequency index `j` (frequency `j/N`).
#[derive(Debug, Clone, Copy)]
pub struct PeriodogramEntry {
    pub freq_index: usize,
    /// Cosine coefficient `(2/N) Σ_t X_t cos(2πtj/N)`.
    pub cosine_coef: f64,
    /// Sine coefficient `(2/N) Σ_t X_t sin(2πtj/N)`.
    pub sine_coef: f64,
    /// Signal strength: cosine_coef² + sine_coef².
    pub power: f64,
}

/// Trigonometric decomposition over frequency indices `1..=⌊N/2⌋`.
///
/// The zero-frequency (mean) term is kept separately so the entries carry
/// only periodic energy.
#[derive(Debug, Clone)]
pub struct Periodogram {
    series_len: usize,
    mean_term: f64,
    entries: Vec<PeriodogramEntry>,
}

impl Periodogram {
    pub fn series_len(&self) -> usize {
        self.series_len
    }

    /// The constant term `a_0` (the sample mean).
    pub fn mean_term(&self) -> f64 {
        self.mean_term
    }

    /// Entries for `j = 1..=⌊N/2⌋`, in frequency order.
    pub fn entries(&self) -> &[PeriodogramEntry] {
        &self.entries
    }
}

/// Computes the periodogram of a series of length N ≥ 4.
///
/// Direct O(N²) evaluation; every experiment in this crate works with a
/// few thousand observations at most, where the transform is a small
/// fraction of the fitting cost.
pub fn periodogram(series: &TimeSeries) -> Result<Periodogram> {
    let n = series.len();
    if n < 4 {
        return Err(MsError::InvalidConfig(format!(
            "periodogram needs at least 4 observations, got {n}"
        )));
    }
    let x = series.values();
    let mean_term = x.iter().sum::<f64>() / n as f64;
    let half = n / 2;
    let scale = 2.0 / n as f64;
    let mut entries = Vec::with_capacity(half);
    for j in 1..=half {
        let step = std::f64::consts::TAU * j as f64 / n as f64;
        let mut cos_sum = 0.0;
        let mut sin_sum = 0.0;
        for (idx, &value) in x.iter().enumerate() {
            let t = (idx + 1) as f64;
            let (s, c) = (step * t).sin_cos();
            cos_sum += value * c;
            sin_sum += value * s;
        }
        let cosine_coef = scale * cos_sum;
        let sine_coef = scale * sin_sum;
        entries.push(PeriodogramEntry {
            freq_index: j,
            cosine_coef,
            sine_coef,
            power: cosine_coef * cosine_coef + sine_coef * sine_coef,
        });
    }
    Ok(Periodogram {
        series_len: n,
        mean_term,
        entries,
    })
}

/// Returns `count` frequency indices in strictly decreasing power order;
/// ties go to the smaller index.
pub fn top_candidates(pg: &Periodogram, count: usize) -> Result<Vec<usize>> {
    if count == 0 || count > pg.entries.len() {
        return Err(MsError::InvalidConfig(format!(
            "candidate count {count} out of range 1..={}",
            pg.entries.len()
        )));
    }
    let mut order: Vec<usize> = (0..pg.entries.len()).collect();
    order.sort_by(|&a, &b| {
        pg.entries[b]
            .power
            .total_cmp(&pg.entries[a].power)
            .then(pg.entries[a].freq_index.cmp(&pg.entries[b].freq_index))
    });
    Ok(order[..count]
        .iter()
        .map(|&i| pg.entries[i].freq_index)
        .collect())
}

/// A block of `tau` consecutive lags around a detected seasonal period.
///
/// The center is always the `⌈tau/2⌉`-th smallest lag, so the block
/// spreads seasonal effect over a neighborhood instead of pinning it to
/// one lag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeasonalLagSet {
    center: usize,
    lags: Vec<usize>,
}

impl SeasonalLagSet {
    /// Builds the lag block `{s − ⌊(τ−1)/2⌋, …, s + ⌈(τ−1)/2⌉}` around
    /// period `s`, shifted up minimally so every lag exceeds `min_lag`.
    /// If a shift occurs the recorded center moves with the block.
    pub fn from_period(s: usize, tau: usize, min_lag: usize) -> Self {
        assert!(tau >= 1 && s >= 1, "period and tau must be positive");
        let below = (tau - 1) / 2;
        let first = s.saturating_sub(below).max(1).max(min_lag + 1);
        let lags: Vec<usize> = (first..first + tau).collect();
        let center = lags[(tau + 1) / 2 - 1];
        Self { center, lags }
    }

    /// Restores a lag set from its parts, checking the invariants
    /// (consecutive positive lags, center at the middle position).
    pub fn from_parts(center: usize, lags: Vec<usize>) -> Result<Self> {
        if lags.is_empty() || lags[0] == 0 {
            return Err(MsError::InvalidConfig(
                "lag set must contain positive lags".into(),
            ));
        }
        if !lags.windows(2).all(|w| w[1] == w[0] + 1) {
            return Err(MsError::InvalidConfig(
                "lag set must contain consecutive lags".into(),
            ));
        }
        let expected_center = lags[(lags.len() + 1) / 2 - 1];
        if center != expected_center {
            return Err(MsError::InvalidConfig(format!(
                "lag set center {center} is not the middle lag {expected_center}"
            )));
        }
        Ok(Self { center, lags })
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn lags(&self) -> &[usize] {
        &self.lags
    }

    pub fn len(&self) -> usize {
        self.lags.len()
    }

    pub fn is_empty(&self) -> bool {
        false // tau >= 1 by construction
    }

    pub fn min_lag(&self) -> usize {
        self.lags[0]
    }

    pub fn max_lag(&self) -> usize {
        self.lags[self.lags.len() - 1]
    }

    /// Whether two lag ranges intersect.
    pub fn overlaps(&self, other: &Self) -> bool {
        self.min_lag() <= other.max_lag() && other.min_lag() <= self.max_lag()
    }
}

/// A candidate lag set together with the spectral evidence behind it.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub lag_set: SeasonalLagSet,
    pub freq_index: usize,
    pub power: f64,
}

/// Detects up to `r + 2` candidate lag sets, richest spectral detail kept.
///
/// Frequencies are visited in decreasing power order, each mapped to the
/// period `round(N/j)`. A candidate is dropped when its lags exceed
/// `max_lag` or its range overlaps an already-accepted set, so the
/// surviving sets are pairwise disjoint and the strongest periods win.
pub fn detect_candidates(
    series: &TimeSeries,
    r: usize,
    tau: usize,
    min_lag: usize,
    max_lag: usize,
) -> Result<Vec<Candidate>> {
    if r < 1 || tau < 1 {
        return Err(MsError::InvalidConfig(
            "detection needs r >= 1 and tau >= 1".into(),
        ));
    }
    if max_lag > series.len() / 2 {
        return Err(MsError::InvalidConfig(format!(
            "max period {max_lag} exceeds half the series length {}",
            series.len() / 2
        )));
    }
    let pg = periodogram(series)?;
    let ranked = top_candidates(&pg, pg.entries().len())?;
    let wanted = r + 2;
    let mut accepted: Vec<Candidate> = Vec::with_capacity(wanted);
    for j in ranked {
        let period = (series.len() as f64 / j as f64).round() as usize;
        let lag_set = SeasonalLagSet::from_period(period.max(1), tau, min_lag);
        if lag_set.max_lag() > max_lag {
            continue;
        }
        if accepted.iter().any(|c| c.lag_set.overlaps(&lag_set)) {
            continue;
        }
        let entry = &pg.entries()[j - 1];
        accepted.push(Candidate {
            lag_set,
            freq_index: j,
            power: entry.power,
        });
        if accepted.len() == wanted {
            break;
        }
    }
    if accepted.is_empty() {
        return Err(MsError::DetectionFailed);
    }
    Ok(accepted)
}

/// Candidate seasonal lag sets in decreasing power order; see
/// [`detect_candidates`] for the selection rule.
pub fn build_candidate_sets(
    series: &TimeSeries,
    r: usize,
    tau: usize,
    min_lag: usize,
    max_lag: usize,
) -> Result<Vec<SeasonalLagSet>> {
    Ok(detect_candidates(series, r, tau, min_lag, max_lag)?
        .into_iter()
        .map(|c| c.lag_set)
        .collect())
}
