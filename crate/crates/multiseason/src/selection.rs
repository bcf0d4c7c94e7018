//! Model selection: enumerate the (p, q, C) grid, fit every candidate by
//! maximum likelihood, and pick the best model by an information
//! criterion.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{MsError, Result};
use crate::model::{
    log_likelihood, residuals_from, sse_and_gradient_from, Coefficients, ModelSpec, SIGMA2_FLOOR,
};
use crate::optimizer::{bfgs_minimize, BfgsOptions};
use crate::rng::{split_seed, GaussianStream};
use crate::series::TimeSeries;
use crate::spectrum::{detect_candidates, SeasonalLagSet};

/// Model-selection criterion. The bridge criterion is the default; AIC
/// and BIC are available as toggles and show similar behavior on the
/// study designs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Bc,
    Aic,
    Bic,
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Criterion::Bc => write!(f, "BC"),
            Criterion::Aic => write!(f, "AIC"),
            Criterion::Bic => write!(f, "BIC"),
        }
    }
}

impl std::str::FromStr for Criterion {
    type Err = MsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bc" => Ok(Criterion::Bc),
            "aic" => Ok(Criterion::Aic),
            "bic" => Ok(Criterion::Bic),
            other => Err(MsError::InvalidConfig(format!(
                "unknown criterion '{other}' (expected bc, aic, or bic)"
            ))),
        }
    }
}

/// Scores a fit with `M` effective residuals, sum of squares `sse`, and
/// `k` mean parameters. Lower is better.
///
/// With `σ̂² = max(sse/M, floor)`:
/// - AIC: `M ln σ̂² + 2k`
/// - BIC: `M ln σ̂² + k ln M`
/// - BC:  `M ln σ̂² + M^{2/3} Σ_{j=1..k} 1/j`
pub fn criterion_score(kind: Criterion, m: usize, sse: f64, k: usize) -> f64 {
    assert!(m >= 1, "criterion needs at least one residual");
    assert!(sse >= 0.0, "sum of squares cannot be negative");
    let m_f = m as f64;
    let sigma2 = (sse / m_f).max(SIGMA2_FLOOR);
    let fit_term = m_f * sigma2.ln();
    let penalty = match kind {
        Criterion::Aic => 2.0 * k as f64,
        Criterion::Bic => k as f64 * m_f.ln(),
        Criterion::Bc => {
            let harmonic: f64 = (1..=k).map(|j| 1.0 / j as f64).sum();
            m_f.powf(2.0 / 3.0) * harmonic
        }
    };
    fit_term + penalty
}

/// Configuration of the two-stage procedure.
///
/// `r` is the number of seasonal components in the final model and has no
/// safe universal default; `r = 0` disables the seasonal stage entirely
/// and yields the plain ARMA baseline over the same (p, q) grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MsConfig {
    pub r: usize,
    /// Lags per seasonal set.
    pub tau: usize,
    /// Largest AR order tried.
    pub p_max: usize,
    /// Largest MA order tried.
    pub q_max: usize,
    pub criterion: Criterion,
    /// Smallest admissible seasonal period; defaults to `max(p_max, q_max) + 1`
    /// and is never allowed below it, so seasonal lags stay clear of the
    /// short-term lags.
    pub min_period: Option<usize>,
    /// Largest admissible seasonal lag; defaults to half the series length.
    pub max_period: Option<usize>,
    /// Also try every smaller seasonal subset, down to none.
    pub allow_fewer: bool,
    /// Number of optimizer starts per spec (first start is always θ = 0).
    pub multi_start: usize,
    /// Seed for the jittered extra starts.
    pub seed: u64,
    /// Relative gradient tolerance handed to the optimizer.
    pub grad_tol: f64,
}

impl MsConfig {
    pub fn new(r: usize) -> Self {
        Self {
            r,
            tau: 6,
            p_max: 3,
            q_max: 3,
            criterion: Criterion::Bc,
            min_period: None,
            max_period: None,
            allow_fewer: false,
            multi_start: 1,
            seed: 0,
            grad_tol: 1e-6,
        }
    }

    /// Checks the cross-field constraints, notably `τ > max(p̄, q̄)`.
    pub fn validate(&self) -> Result<()> {
        if self.tau == 0 {
            return Err(MsError::InvalidConfig("tau must be at least 1".into()));
        }
        if self.tau <= self.p_max.max(self.q_max) {
            return Err(MsError::InvalidConfig(format!(
                "tau ({}) must exceed max(p_max, q_max) = {}; seasonal lags must \
                 sit beyond the short-term lags",
                self.tau,
                self.p_max.max(self.q_max)
            )));
        }
        if self.multi_start == 0 {
            return Err(MsError::InvalidConfig(
                "multi_start must be at least 1".into(),
            ));
        }
        if let (Some(lo), Some(hi)) = (self.min_period, self.max_period) {
            if lo > hi {
                return Err(MsError::InvalidConfig(format!(
                    "min_period {lo} exceeds max_period {hi}"
                )));
            }
        }
        if !(self.grad_tol.is_finite() && self.grad_tol > 0.0) {
            return Err(MsError::InvalidConfig(
                "grad_tol must be positive and finite".into(),
            ));
        }
        Ok(())
    }

    /// Detection lag bounds for a series of length `n`: candidate lags
    /// must exceed the first bound and stay at or below the second.
    ///
    /// The lower bound never drops below `max(p_max, q_max)` so seasonal
    /// lags cannot alias the short-term lags.
    pub fn detection_bounds(&self, n: usize) -> (usize, usize) {
        let floor = self.p_max.max(self.q_max);
        let min_lag = match self.min_period {
            Some(mp) => mp.saturating_sub(1).max(floor),
            None => floor,
        };
        let max_lag = self.max_period.unwrap_or(n / 2).min(n / 2);
        (min_lag, max_lag)
    }

    fn bfgs_options(&self) -> BfgsOptions {
        // Grid fits get a uniform, capped iteration budget. Specs with
        // heavy seasonal-MA structure spend hundreds of iterations in a
        // stiff plateau recovering well under 1% of the objective; the
        // cap keeps the grid search fast without reordering candidates,
        // since every spec is optimized under the same rule.
        BfgsOptions {
            grad_tol: self.grad_tol,
            max_iter: 150,
            ..BfgsOptions::default()
        }
    }
}

/// A fitted candidate with its score.
#[derive(Debug, Clone)]
pub struct FittedModel {
    pub spec: ModelSpec,
    pub coef: Coefficients,
    pub sse: f64,
    pub loglik: f64,
    pub criterion: Criterion,
    pub criterion_value: f64,
    /// Residual count `M = N − t₀ + 1`.
    pub effective_count: usize,
    /// Mean parameter count `k` (σ excluded; it is profiled).
    pub param_count: usize,
}

/// A grid entry that could not be fitted, with the reason.
#[derive(Debug, Clone)]
pub struct SkippedSpec {
    pub spec: ModelSpec,
    pub reason: String,
}

/// Outcome of a grid search.
#[derive(Debug, Clone)]
pub struct Selection {
    pub best: FittedModel,
    /// All fitted specs, ascending by criterion value.
    pub leaderboard: Vec<FittedModel>,
    pub skipped: Vec<SkippedSpec>,
    /// The candidate lag sets detection produced (empty when r = 0).
    pub candidates: Vec<SeasonalLagSet>,
}

/// Emits every (p, q, C) combination in deterministic order: p outermost,
/// then q, then seasonal subsets by size and lexicographic index.
///
/// By default C ranges over subsets of size exactly `min(r, #candidates)`;
/// with `allow_fewer` every smaller size is enumerated too, including the
/// empty collection (the plain ARMA grid).
pub fn enumerate_grid(candidates: &[SeasonalLagSet], cfg: &MsConfig) -> Result<Vec<ModelSpec>> {
    if candidates.is_empty() && cfg.r > 0 {
        return Err(MsError::InvalidConfig(
            "no seasonal candidates to enumerate".into(),
        ));
    }
    let target = cfg.r.min(candidates.len());
    let sizes: Vec<usize> = if cfg.allow_fewer {
        (0..=target).collect()
    } else {
        vec![target]
    };
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    for &size in &sizes {
        subsets.extend(combinations(candidates.len(), size));
    }
    let mut specs = Vec::with_capacity((cfg.p_max + 1) * (cfg.q_max + 1) * subsets.len());
    for p in 0..=cfg.p_max {
        for q in 0..=cfg.q_max {
            for subset in &subsets {
                let lag_sets: Vec<SeasonalLagSet> =
                    subset.iter().map(|&i| candidates[i].clone()).collect();
                specs.push(ModelSpec::new(p, q, lag_sets));
            }
        }
    }
    Ok(specs)
}

/// Index combinations of size `size` from `0..n`, lexicographic.
fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    if size > n {
        return Vec::new();
    }
    if size == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut stack: Vec<usize> = (0..size).collect();
    loop {
        out.push(stack.clone());
        // advance the rightmost index that can still move
        let mut i = size;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if stack[i] != i + n - size {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        stack[i] += 1;
        for j in i + 1..size {
            stack[j] = stack[j - 1] + 1;
        }
    }
}

/// Fits one spec by BFGS from θ = 0 (plus optional jittered restarts) and
/// scores it with the configured criterion over its own burn-in range.
pub fn fit_spec(series: &TimeSeries, spec: &ModelSpec, cfg: &MsConfig) -> Result<FittedModel> {
    fit_spec_from(series, spec, cfg, spec.burn_in())
}

/// [`fit_spec`] evaluated from an explicit burn-in.
///
/// The grid search hands every spec the same burn-in (that of the longest
/// candidate lag), so criterion values compare fits over an identical
/// residual range. Without this, a model whose lags reach further back is
/// scored on fewer residuals and gets a spurious advantage whenever
/// `ln σ̂² > 0`.
fn fit_spec_from(
    series: &TimeSeries,
    spec: &ModelSpec,
    cfg: &MsConfig,
    burn_in: usize,
) -> Result<FittedModel> {
    spec.validate()?;
    let d = spec.param_count();
    // Fail fast with the data-length error before any optimization.
    residuals_from(series, spec, &Coefficients::zeros(spec), burn_in)?;

    let objective = |theta: &[f64]| match sse_and_gradient_from(series, spec, theta, burn_in) {
        Ok(pair) => pair,
        Err(_) => (f64::NAN, vec![f64::NAN; d]),
    };

    let opts = cfg.bfgs_options();
    let mut best = bfgs_minimize(objective, &vec![0.0; d], &opts);
    if cfg.multi_start > 1 {
        let mut jitter = GaussianStream::new(split_seed(cfg.seed, 0x6a69_7474), 0);
        for _ in 1..cfg.multi_start {
            let start: Vec<f64> = (0..d).map(|_| jitter.next_normal(0.0, 0.01)).collect();
            let run = bfgs_minimize(objective, &start, &opts);
            if run.objective < best.objective {
                best = run;
            }
        }
    }

    let provisional = Coefficients::from_theta(spec, &best.theta, 1.0)?;
    let state = residuals_from(series, spec, &provisional, burn_in)?;
    let (loglik, sigma_hat) = log_likelihood(&state);
    let coef = Coefficients::from_theta(spec, &best.theta, sigma_hat)?;
    let m = state.effective_count();
    let value = criterion_score(cfg.criterion, m, state.sse(), d);
    Ok(FittedModel {
        spec: spec.clone(),
        coef,
        sse: state.sse(),
        loglik,
        criterion: cfg.criterion,
        criterion_value: value,
        effective_count: m,
        param_count: d,
    })
}

/// Runs the full two-stage procedure: detect candidate lag sets, fit the
/// whole grid (in parallel), and return the criterion minimizer.
///
/// Ties break toward fewer parameters, then enumeration order, so the
/// result does not depend on thread scheduling.
pub fn select_model(series: &TimeSeries, cfg: &MsConfig) -> Result<Selection> {
    cfg.validate()?;
    let candidates = if cfg.r == 0 {
        Vec::new()
    } else {
        let (min_lag, max_lag) = cfg.detection_bounds(series.len());
        detect_candidates(series, cfg.r, cfg.tau, min_lag, max_lag)?
            .into_iter()
            .map(|c| c.lag_set)
            .collect()
    };
    let specs = enumerate_grid(&candidates, cfg)?;
    // Common scoring range across the whole grid.
    let grid_burn_in = candidates
        .iter()
        .map(|c| c.max_lag())
        .max()
        .unwrap_or(0)
        .max(cfg.p_max)
        .max(cfg.q_max)
        + 1;
    let fits: Vec<(usize, Result<FittedModel>)> = specs
        .par_iter()
        .enumerate()
        .map(|(idx, spec)| (idx, fit_spec_from(series, spec, cfg, grid_burn_in)))
        .collect();

    let mut leaderboard: Vec<(usize, FittedModel)> = Vec::with_capacity(specs.len());
    let mut skipped = Vec::new();
    for (idx, outcome) in fits {
        match outcome {
            Ok(fit) => leaderboard.push((idx, fit)),
            Err(err) => skipped.push(SkippedSpec {
                spec: specs[idx].clone(),
                reason: err.to_string(),
            }),
        }
    }
    if leaderboard.is_empty() {
        let reasons: Vec<String> = skipped
            .iter()
            .map(|s| {
                format!(
                    "(p={}, q={}, sets={}): {}",
                    s.spec.p,
                    s.spec.q,
                    s.spec.lag_sets.len(),
                    s.reason
                )
            })
            .collect();
        return Err(MsError::AllSpecsFailed(reasons.join("\n")));
    }
    leaderboard.sort_by(|(ia, a), (ib, b)| {
        a.criterion_value
            .total_cmp(&b.criterion_value)
            .then(a.param_count.cmp(&b.param_count))
            .then(ia.cmp(ib))
    });
    let leaderboard: Vec<FittedModel> = leaderboard.into_iter().map(|(_, f)| f).collect();
    Ok(Selection {
        best: leaderboard[0].clone(),
        leaderboard,
        skipped,
        candidates,
    })
}

/// Criterion name/value pair as stored in the model document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionScore {
    pub name: Criterion,
    pub value: f64,
}

/// Compact leaderboard row for the serialized document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LeaderboardEntry {
    pub p: usize,
    pub q: usize,
    pub centers: Vec<usize>,
    pub param_count: usize,
    pub sse: f64,
    pub criterion_value: f64,
}

/// Self-contained JSON form of a fitted model: spec, coefficients,
/// fit statistics, the configuration that produced it, and the centering
/// mean when the series was centered before fitting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelDocument {
    pub library_version: String,
    pub spec: ModelSpec,
    pub coefficients: Coefficients,
    pub sse: f64,
    pub loglik: f64,
    pub criterion: CriterionScore,
    pub effective_count: usize,
    pub param_count: usize,
    pub center_mean: Option<f64>,
    pub config: MsConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leaderboard: Option<Vec<LeaderboardEntry>>,
}

impl ModelDocument {
    pub fn new(fit: &FittedModel, cfg: &MsConfig, center_mean: Option<f64>) -> Self {
        Self {
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            spec: fit.spec.clone(),
            coefficients: fit.coef.clone(),
            sse: fit.sse,
            loglik: fit.loglik,
            criterion: CriterionScore {
                name: fit.criterion,
                value: fit.criterion_value,
            },
            effective_count: fit.effective_count,
            param_count: fit.param_count,
            center_mean,
            config: cfg.clone(),
            leaderboard: None,
        }
    }

    pub fn with_leaderboard(mut self, entries: &[FittedModel]) -> Self {
        self.leaderboard = Some(
            entries
                .iter()
                .map(|f| LeaderboardEntry {
                    p: f.spec.p,
                    q: f.spec.q,
                    centers: f.spec.lag_sets.iter().map(|s| s.center()).collect(),
                    param_count: f.param_count,
                    sse: f.sse,
                    criterion_value: f.criterion_value,
                })
                .collect(),
        );
        self
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    /// Parses and validates a document produced by [`Self::to_json`].
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(text)?;
        doc.spec.validate()?;
        for set in &doc.spec.lag_sets {
            // reconstructing checks the per-set invariants
            SeasonalLagSet::from_parts(set.center(), set.lags().to_vec())?;
        }
        if !doc.coefficients.dims_match(&doc.spec) {
            return Err(MsError::InvalidConfig(
                "coefficient dimensions do not match the spec".into(),
            ));
        }
        if !doc.criterion.value.is_finite() || !doc.sse.is_finite() {
            return Err(MsError::InvalidConfig(
                "non-finite fit statistics in model document".into(),
            ));
        }
        Ok(doc)
    }

    /// Rebuilds the in-memory fitted model.
    pub fn to_fitted(&self) -> FittedModel {
        FittedModel {
            spec: self.spec.clone(),
            coef: self.coefficients.clone(),
            sse: self.sse,
            loglik: self.loglik,
            criterion: self.criterion.name,
            criterion_value: self.criterion.value,
            effective_count: self.effective_count,
            param_count: self.param_count,
        }
    }
}
