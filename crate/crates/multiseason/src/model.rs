//! The generalized multi-seasonal ARMA model: residual recursion,
//! sum-of-squares objective, Gaussian log-likelihood, and analytic
//! gradients.
//!
//! The model explains `X_t` by short-term AR/MA terms plus, for each
//! seasonal component `i`, blocks of lagged observations and residuals
//! over a lag set `S_i`:
//!
//! ```text
//! X_t = Φ'X_{t-1..t-p} + Ψ'ε_{t-1..t-q}
//!       + Σ_i (Γ_i'X_{S_i} + Λ_i'ε_{S_i}) + ε_t
//! ```
//!
//! Residuals are conditioned on the first `t₀ − 1` observations, where
//! `t₀ = max(p, q, largest seasonal lag) + 1` is the first index at which
//! every referenced observation exists; residuals (and their derivatives)
//! before `t₀` are taken as zero. Estimation minimizes `Σ_{t≥t₀} ε_t²`,
//! which is the Gaussian likelihood with the noise scale profiled out.

use serde::{Deserialize, Serialize};

use crate::error::{MsError, Result};
use crate::series::TimeSeries;
use crate::spectrum::SeasonalLagSet;

/// Floor applied to the residual variance so that exact fits keep the
/// log-likelihood and criterion values finite.
pub(crate) const SIGMA2_FLOOR: f64 = 1e-12;

/// One candidate model: AR order, MA order, and seasonal lag sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub p: usize,
    pub q: usize,
    pub lag_sets: Vec<SeasonalLagSet>,
}

impl ModelSpec {
    pub fn new(p: usize, q: usize, lag_sets: Vec<SeasonalLagSet>) -> Self {
        Self { p, q, lag_sets }
    }

    /// Checks that lag sets are pairwise disjoint and sit beyond the
    /// short-term lags, so seasonal columns cannot alias AR/MA columns.
    pub fn validate(&self) -> Result<()> {
        let short = self.p.max(self.q);
        for (i, a) in self.lag_sets.iter().enumerate() {
            if a.min_lag() <= short {
                return Err(MsError::InvalidConfig(format!(
                    "seasonal lag {} does not exceed max(p, q) = {short}",
                    a.min_lag()
                )));
            }
            for b in &self.lag_sets[i + 1..] {
                if a.overlaps(b) {
                    return Err(MsError::InvalidConfig(format!(
                        "lag sets {}..{} and {}..{} overlap",
                        a.min_lag(),
                        a.max_lag(),
                        b.min_lag(),
                        b.max_lag()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of free mean parameters: `p + q + 2 Σ_i |S_i|`.
    pub fn param_count(&self) -> usize {
        self.p + self.q + 2 * self.lag_sets.iter().map(|s| s.len()).sum::<usize>()
    }

    /// Largest lag referenced by the model (0 for the null model).
    pub fn max_lag(&self) -> usize {
        self.lag_sets
            .iter()
            .map(|s| s.max_lag())
            .max()
            .unwrap_or(0)
            .max(self.p)
            .max(self.q)
    }

    /// First 1-based index `t₀` at which the recursion is defined.
    pub fn burn_in(&self) -> usize {
        self.max_lag() + 1
    }
}

/// Estimated parameter bundle for a [`ModelSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    /// Seasonal observation weights, one `tau`-vector per lag set.
    pub gamma: Vec<Vec<f64>>,
    /// Seasonal residual weights, one `tau`-vector per lag set.
    pub lambda: Vec<Vec<f64>>,
    /// Innovation standard deviation (profiled estimate after fitting).
    pub sigma: f64,
}

impl Coefficients {
    /// All-zero mean parameters with unit noise scale.
    pub fn zeros(spec: &ModelSpec) -> Self {
        Self {
            phi: vec![0.0; spec.p],
            psi: vec![0.0; spec.q],
            gamma: spec.lag_sets.iter().map(|s| vec![0.0; s.len()]).collect(),
            lambda: spec.lag_sets.iter().map(|s| vec![0.0; s.len()]).collect(),
            sigma: 1.0,
        }
    }

    pub fn dims_match(&self, spec: &ModelSpec) -> bool {
        self.phi.len() == spec.p
            && self.psi.len() == spec.q
            && self.gamma.len() == spec.lag_sets.len()
            && self.lambda.len() == spec.lag_sets.len()
            && self
                .gamma
                .iter()
                .zip(&spec.lag_sets)
                .all(|(g, s)| g.len() == s.len())
            && self
                .lambda
                .iter()
                .zip(&spec.lag_sets)
                .all(|(l, s)| l.len() == s.len())
            && self.sigma > 0.0
            && self.sigma.is_finite()
    }

    /// Packs the mean parameters as `[Φ | Ψ | Γ_1 | Λ_1 | … | Γ_r | Λ_r]`.
    pub fn to_theta(&self) -> Vec<f64> {
        let mut theta = Vec::new();
        theta.extend_from_slice(&self.phi);
        theta.extend_from_slice(&self.psi);
        for (g, l) in self.gamma.iter().zip(&self.lambda) {
            theta.extend_from_slice(g);
            theta.extend_from_slice(l);
        }
        theta
    }

    /// Unpacks a flat parameter vector laid out as in [`Self::to_theta`].
    pub fn from_theta(spec: &ModelSpec, theta: &[f64], sigma: f64) -> Result<Self> {
        if theta.len() != spec.param_count() {
            return Err(MsError::DimensionMismatch {
                expected: spec.param_count(),
                got: theta.len(),
            });
        }
        let mut offset = 0;
        let mut take = |len: usize| {
            let part = theta[offset..offset + len].to_vec();
            offset += len;
            part
        };
        let phi = take(spec.p);
        let psi = take(spec.q);
        let mut gamma = Vec::with_capacity(spec.lag_sets.len());
        let mut lambda = Vec::with_capacity(spec.lag_sets.len());
        for set in &spec.lag_sets {
            gamma.push(take(set.len()));
            lambda.push(take(set.len()));
        }
        Ok(Self {
            phi,
            psi,
            gamma,
            lambda,
            sigma,
        })
    }
}

/// Residuals and their sum of squares over the post-burn-in range.
#[derive(Debug, Clone)]
pub struct ResidualState {
    residuals: Vec<f64>,
    burn_in: usize,
    sse: f64,
}

impl ResidualState {
    /// Residuals `ε_t` for `t = burn_in()..=N`, in order.
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    /// First 1-based index with a defined residual.
    pub fn burn_in(&self) -> usize {
        self.burn_in
    }

    /// Residual at 1-based index `t`; zero outside the computed range.
    pub fn residual_at(&self, t: usize) -> f64 {
        if t < self.burn_in {
            return 0.0;
        }
        self.residuals
            .get(t - self.burn_in)
            .copied()
            .unwrap_or(0.0)
    }

    pub fn sse(&self) -> f64 {
        self.sse
    }

    /// Number of residuals contributing to the objective, `M = N − t₀ + 1`.
    pub fn effective_count(&self) -> usize {
        self.residuals.len()
    }
}

fn check_burn_in(series: &TimeSeries, spec: &ModelSpec, burn_in: usize) -> Result<()> {
    if burn_in < spec.burn_in() {
        return Err(MsError::InvalidConfig(format!(
            "burn-in {burn_in} precedes the first defined residual {}",
            spec.burn_in()
        )));
    }
    if series.len() < burn_in {
        return Err(MsError::SeriesTooShort {
            needed: burn_in,
            got: series.len(),
            largest_lag: spec.max_lag(),
        });
    }
    Ok(())
}

/// Runs the residual recursion of the model over `t = t₀..=N`.
///
/// Residuals referenced at indices before `t₀` enter as zero.
pub fn residuals(
    series: &TimeSeries,
    spec: &ModelSpec,
    coef: &Coefficients,
) -> Result<ResidualState> {
    residuals_from(series, spec, coef, spec.burn_in())
}

/// Residual recursion starting at an explicit burn-in at or after the
/// spec's own, so competing models can be scored on a common effective
/// sample.
pub fn residuals_from(
    series: &TimeSeries,
    spec: &ModelSpec,
    coef: &Coefficients,
    burn_in: usize,
) -> Result<ResidualState> {
    if !coef.dims_match(spec) {
        return Err(MsError::DimensionMismatch {
            expected: spec.param_count(),
            got: coef.to_theta().len(),
        });
    }
    check_burn_in(series, spec, burn_in)?;
    let n = series.len();
    let t0 = burn_in;
    let x = series.values();
    // 1-based residual buffer; entries before t0 stay zero.
    let mut eps = vec![0.0; n + 1];
    let mut sse = 0.0;
    for t in t0..=n {
        let mut e = x[t - 1];
        for (j, w) in coef.phi.iter().enumerate() {
            e -= w * x[t - j - 2];
        }
        for (m, w) in coef.psi.iter().enumerate() {
            e -= w * eps[t - m - 1];
        }
        for (i, set) in spec.lag_sets.iter().enumerate() {
            for (l, &lag) in set.lags().iter().enumerate() {
                e -= coef.gamma[i][l] * x[t - lag - 1] + coef.lambda[i][l] * eps[t - lag];
            }
        }
        eps[t] = e;
        sse += e * e;
        // Explosive coefficient regions overflow quickly; no point
        // finishing the pass once the objective is unusable.
        if sse > 1e290 {
            sse = f64::INFINITY;
            break;
        }
    }
    Ok(ResidualState {
        residuals: eps[t0..=n].to_vec(),
        burn_in: t0,
        sse,
    })
}

/// Gaussian log-likelihood of a residual state with the noise scale at
/// its profiled maximizer `σ̂² = SSE / M`. Returns `(loglik, σ̂)`.
pub fn log_likelihood(state: &ResidualState) -> (f64, f64) {
    let m = state.effective_count() as f64;
    let sigma2 = (state.sse / m).max(SIGMA2_FLOOR);
    let loglik = -0.5 * m * ((std::f64::consts::TAU * sigma2).ln() + 1.0);
    (loglik, sigma2.sqrt())
}

/// Sum of squared residuals and its exact gradient in the flat parameter
/// layout `[Φ | Ψ | Γ_1 | Λ_1 | … | Γ_r | Λ_r]`.
///
/// The derivative of each residual follows the same recursion as the
/// residual itself: a direct term plus feedback through Ψ and through
/// every Λ_i, with rows before the burn-in identically zero. The gradient
/// is `∂/∂θ_k Σ ε_t² = 2 Σ ε_t ∂ε_t/∂θ_k`.
pub fn sse_and_gradient(
    series: &TimeSeries,
    spec: &ModelSpec,
    theta: &[f64],
) -> Result<(f64, Vec<f64>)> {
    sse_and_gradient_from(series, spec, theta, spec.burn_in())
}

/// [`sse_and_gradient`] with an explicit burn-in at or after the spec's
/// own; residuals and Jacobian rows before it are zero.
pub fn sse_and_gradient_from(
    series: &TimeSeries,
    spec: &ModelSpec,
    theta: &[f64],
    burn_in: usize,
) -> Result<(f64, Vec<f64>)> {
    let d = spec.param_count();
    if theta.len() != d {
        return Err(MsError::DimensionMismatch {
            expected: d,
            got: theta.len(),
        });
    }
    check_burn_in(series, spec, burn_in)?;
    let n = series.len();
    let t0 = burn_in;
    let x = series.values();

    let (phi, rest) = theta.split_at(spec.p);
    let (psi, mut seasonal) = rest.split_at(spec.q);
    let mut gamma: Vec<&[f64]> = Vec::with_capacity(spec.lag_sets.len());
    let mut lambda: Vec<&[f64]> = Vec::with_capacity(spec.lag_sets.len());
    for set in &spec.lag_sets {
        let (g, rest) = seasonal.split_at(set.len());
        let (l, rest) = rest.split_at(set.len());
        gamma.push(g);
        lambda.push(l);
        seasonal = rest;
    }

    let mut eps = vec![0.0; n + 1];
    // Jacobian rows ∂ε_t/∂θ, flat (n+1) × d, 1-based in t; rows < t0 are zero.
    let mut jac = vec![0.0; (n + 1) * d];
    let mut row = vec![0.0; d];
    let mut grad = vec![0.0; d];
    let mut sse = 0.0;

    for t in t0..=n {
        let mut e = x[t - 1];
        row.fill(0.0);
        let mut k = 0;
        for (j, w) in phi.iter().enumerate() {
            let lagged = x[t - j - 2];
            e -= w * lagged;
            row[k] = -lagged;
            k += 1;
        }
        for (m, w) in psi.iter().enumerate() {
            let lagged = eps[t - m - 1];
            e -= w * lagged;
            row[k] = -lagged;
            k += 1;
        }
        for (i, set) in spec.lag_sets.iter().enumerate() {
            for (l, &lag) in set.lags().iter().enumerate() {
                let x_lag = x[t - lag - 1];
                let e_lag = eps[t - lag];
                e -= gamma[i][l] * x_lag + lambda[i][l] * e_lag;
                row[k] = -x_lag;
                row[k + set.len()] = -e_lag;
                k += 1;
            }
            k += set.len();
        }
        // Feedback of earlier Jacobian rows through the MA-type weights.
        for (m, &w) in psi.iter().enumerate() {
            if w != 0.0 {
                let prev = &jac[(t - m - 1) * d..(t - m) * d];
                for (r, p) in row.iter_mut().zip(prev) {
                    *r -= w * p;
                }
            }
        }
        for (i, set) in spec.lag_sets.iter().enumerate() {
            for (l, &lag) in set.lags().iter().enumerate() {
                let w = lambda[i][l];
                if w != 0.0 {
                    let prev = &jac[(t - lag) * d..(t - lag + 1) * d];
                    for (r, p) in row.iter_mut().zip(prev) {
                        *r -= w * p;
                    }
                }
            }
        }
        eps[t] = e;
        sse += e * e;
        let scale = 2.0 * e;
        for (g, r) in grad.iter_mut().zip(&row) {
            *g += scale * r;
        }
        jac[t * d..(t + 1) * d].copy_from_slice(&row);
        if sse > 1e290 {
            return Ok((f64::INFINITY, vec![f64::INFINITY; d]));
        }
    }
    Ok((sse, grad))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(values: Vec<f64>) -> TimeSeries {
        TimeSeries::new(values).unwrap()
    }

    fn wavy(n: usize) -> TimeSeries {
        ts((1..=n).map(|t| ((t as f64) * 0.37).sin() * 2.0 + ((t as f64) * 0.11).cos()).collect())
    }

    #[test]
    fn zero_coefficients_give_identity_residuals() {
        let series = wavy(40);
        let set = SeasonalLagSet::from_period(10, 3, 2);
        let spec = ModelSpec::new(1, 1, vec![set]);
        let state = residuals(&series, &spec, &Coefficients::zeros(&spec)).unwrap();
        let t0 = spec.burn_in();
        assert_eq!(t0, 12);
        let expected_sse: f64 = (t0..=40).map(|t| series.at(t) * series.at(t)).sum();
        assert!((state.sse() - expected_sse).abs() < 1e-12 * expected_sse);
        for t in t0..=40 {
            assert_eq!(state.residual_at(t), series.at(t));
        }
    }

    #[test]
    fn exact_ar1_has_zero_residuals() {
        let series = ts(vec![1.0, 0.5, 0.25]);
        let spec = ModelSpec::new(1, 0, vec![]);
        let coef = Coefficients {
            phi: vec![0.5],
            ..Coefficients::zeros(&spec)
        };
        let state = residuals(&series, &spec, &coef).unwrap();
        assert_eq!(state.burn_in(), 2);
        assert_eq!(state.effective_count(), 2);
        assert!(state.sse().abs() < 1e-15);
    }

    #[test]
    fn sse_matches_stored_residuals() {
        let series = wavy(60);
        let spec = ModelSpec::new(2, 1, vec![SeasonalLagSet::from_period(12, 3, 2)]);
        let coef = Coefficients {
            phi: vec![0.3, -0.1],
            psi: vec![0.2],
            gamma: vec![vec![0.1, 0.05, -0.02]],
            lambda: vec![vec![0.04, -0.03, 0.02]],
            sigma: 1.0,
        };
        let state = residuals(&series, &spec, &coef).unwrap();
        let recomputed: f64 = state.residuals().iter().map(|e| e * e).sum();
        assert!((state.sse() - recomputed).abs() <= 1e-10 * recomputed.max(1.0));
    }

    #[test]
    fn too_short_series_names_largest_lag() {
        let series = ts(vec![1.0; 10]);
        let spec = ModelSpec::new(1, 0, vec![SeasonalLagSet::from_period(12, 3, 1)]);
        match residuals(&series, &spec, &Coefficients::zeros(&spec)) {
            Err(MsError::SeriesTooShort { largest_lag, .. }) => assert_eq!(largest_lag, 13),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn log_likelihood_formula() {
        let state = ResidualState {
            residuals: vec![1.0; 100],
            burn_in: 1,
            sse: 100.0,
        };
        let (ll, sigma) = log_likelihood(&state);
        let expected = -50.0 * ((std::f64::consts::TAU).ln() + 1.0);
        assert!((ll - expected).abs() < 1e-12);
        assert!((sigma - 1.0).abs() < 1e-15);
    }

    #[test]
    fn log_likelihood_scaling_law() {
        let series = wavy(50);
        let spec = ModelSpec::new(0, 0, vec![]);
        let coef = Coefficients::zeros(&spec);
        let state1 = residuals(&series, &spec, &coef).unwrap();
        let scaled = ts(series.values().iter().map(|v| 3.0 * v).collect());
        let state2 = residuals(&scaled, &spec, &coef).unwrap();
        let (ll1, s1) = log_likelihood(&state1);
        let (ll2, s2) = log_likelihood(&state2);
        let m = state1.effective_count() as f64;
        assert!((s2 / s1 - 3.0).abs() < 1e-12);
        assert!((ll2 - (ll1 - m * 3.0f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn log_likelihood_matches_density_sum() {
        let series = wavy(80);
        let spec = ModelSpec::new(1, 0, vec![]);
        let coef = Coefficients {
            phi: vec![0.4],
            ..Coefficients::zeros(&spec)
        };
        let state = residuals(&series, &spec, &coef).unwrap();
        let (ll, sigma) = log_likelihood(&state);
        // independent: sum of Gaussian log-densities at sigma-hat
        let oracle: f64 = state
            .residuals()
            .iter()
            .map(|e| {
                -0.5 * (std::f64::consts::TAU * sigma * sigma).ln()
                    - e * e / (2.0 * sigma * sigma)
            })
            .sum();
        assert!((ll - oracle).abs() < 1e-9, "{ll} vs {oracle}");
    }

    #[test]
    fn sigma_floor_keeps_exact_fit_finite() {
        let state = ResidualState {
            residuals: vec![0.0; 10],
            burn_in: 1,
            sse: 0.0,
        };
        let (ll, sigma) = log_likelihood(&state);
        assert!(ll.is_finite());
        assert!((sigma * sigma - SIGMA2_FLOOR).abs() < 1e-24);
    }

    #[test]
    fn gradient_collapses_for_pure_ar_at_zero() {
        let series = wavy(30);
        let spec = ModelSpec::new(2, 0, vec![]);
        let theta = vec![0.0, 0.0];
        let (sse, grad) = sse_and_gradient(&series, &spec, &theta).unwrap();
        let t0 = spec.burn_in();
        let expected_sse: f64 = (t0..=30).map(|t| series.at(t) * series.at(t)).sum();
        assert!((sse - expected_sse).abs() < 1e-12 * expected_sse);
        for j in 1..=2usize {
            let expected: f64 = (t0..=30).map(|t| -2.0 * series.at(t) * series.at(t - j)).sum();
            assert!(
                (grad[j - 1] - expected).abs() < 1e-10 * expected.abs().max(1.0),
                "phi_{j}: {} vs {expected}",
                grad[j - 1]
            );
        }
    }

    /// Central finite differences of the SSE, the independent check for
    /// the analytic recursion.
    fn fd_gradient(series: &TimeSeries, spec: &ModelSpec, theta: &[f64]) -> Vec<f64> {
        let mut grad = Vec::with_capacity(theta.len());
        for k in 0..theta.len() {
            let h = 1e-6 * theta[k].abs().max(1.0);
            let mut plus = theta.to_vec();
            plus[k] += h;
            let mut minus = theta.to_vec();
            minus[k] -= h;
            let (f_plus, _) = sse_and_gradient(series, spec, &plus).unwrap();
            let (f_minus, _) = sse_and_gradient(series, spec, &minus).unwrap();
            grad.push((f_plus - f_minus) / (2.0 * h));
        }
        grad
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let series = wavy(90);
        let spec = ModelSpec::new(2, 2, vec![SeasonalLagSet::from_period(15, 4, 2)]);
        let d = spec.param_count();
        // deterministic non-trivial point, MA weights small enough to stay stable
        let theta: Vec<f64> = (0..d).map(|k| 0.2 * ((k as f64) * 0.9).sin()).collect();
        let (_, analytic) = sse_and_gradient(&series, &spec, &theta).unwrap();
        let numeric = fd_gradient(&series, &spec, &theta);
        for k in 0..d {
            let scale = numeric[k].abs().max(analytic[k].abs());
            let err = (analytic[k] - numeric[k]).abs();
            assert!(
                err <= (1e-4 * scale).max(1e-7),
                "coordinate {k}: analytic {} vs fd {}",
                analytic[k],
                numeric[k]
            );
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let series = wavy(30);
        let spec = ModelSpec::new(2, 0, vec![]);
        assert!(matches!(
            sse_and_gradient(&series, &spec, &[0.0]),
            Err(MsError::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn residuals_linear_in_data_without_ma_feedback() {
        let xs = wavy(50);
        let ys = ts((1..=50).map(|t| ((t as f64) * 0.77).cos() * 1.5).collect());
        let spec = ModelSpec::new(2, 0, vec![SeasonalLagSet::from_period(9, 3, 2)]);
        let coef = Coefficients {
            phi: vec![0.5, -0.2],
            gamma: vec![vec![0.3, -0.1, 0.2]],
            ..Coefficients::zeros(&spec)
        };
        let (a, b) = (2.0, -0.7);
        let combined = ts(xs
            .values()
            .iter()
            .zip(ys.values())
            .map(|(x, y)| a * x + b * y)
            .collect());
        let res_x = residuals(&xs, &spec, &coef).unwrap();
        let res_y = residuals(&ys, &spec, &coef).unwrap();
        let res_c = residuals(&combined, &spec, &coef).unwrap();
        for t in spec.burn_in()..=50 {
            let expect = a * res_x.residual_at(t) + b * res_y.residual_at(t);
            assert!((res_c.residual_at(t) - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn model_spec_validation() {
        let close = SeasonalLagSet::from_period(3, 3, 0);
        assert!(ModelSpec::new(2, 2, vec![close]).validate().is_err());
        let a = SeasonalLagSet::from_period(10, 4, 2);
        let b = SeasonalLagSet::from_period(12, 4, 2);
        assert!(ModelSpec::new(1, 1, vec![a.clone(), b]).validate().is_err());
        let far = SeasonalLagSet::from_period(20, 4, 2);
        assert!(ModelSpec::new(1, 1, vec![a, far]).validate().is_ok());
    }

    #[test]
    fn theta_roundtrip() {
        let spec = ModelSpec::new(2, 1, vec![SeasonalLagSet::from_period(8, 3, 2)]);
        let theta: Vec<f64> = (0..spec.param_count()).map(|k| k as f64 * 0.1).collect();
        let coef = Coefficients::from_theta(&spec, &theta, 2.5).unwrap();
        assert_eq!(coef.to_theta(), theta);
        assert_eq!(coef.sigma, 2.5);
        assert!(coef.dims_match(&spec));
        assert!(Coefficients::from_theta(&spec, &theta[1..], 1.0).is_err());
    }

    #[test]
    fn residual_cost_scales_linearly_in_length() {
        use std::time::Instant;
        let n = 40_000;
        let series = wavy(2 * n);
        let spec = ModelSpec::new(2, 1, vec![SeasonalLagSet::from_period(20, 3, 2)]);
        let coef = Coefficients {
            phi: vec![0.4, -0.2],
            psi: vec![0.3],
            gamma: vec![vec![0.1, 0.1, 0.1]],
            lambda: vec![vec![0.05, 0.05, 0.05]],
            sigma: 1.0,
        };
        let short = series.prefix(n).unwrap();
        let time_of = |s: &TimeSeries| {
            let mut times: Vec<u128> = (0..9)
                .map(|_| {
                    let start = Instant::now();
                    let st = residuals(s, &spec, &coef).unwrap();
                    std::hint::black_box(st.sse());
                    start.elapsed().as_nanos()
                })
                .collect();
            times.sort_unstable();
            times[4] as f64
        };
        // warmup
        let _ = residuals(&series, &spec, &coef).unwrap();
        let t_short = time_of(&short);
        let t_long = time_of(&series);
        let ratio = t_long / t_short;
        assert!(
            (1.5..=2.5).contains(&ratio),
            "doubling N changed runtime by x{ratio:.2}"
        );
    }
}
