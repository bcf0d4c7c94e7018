//! Independent oracles shared by the integration and acceptance suites.
//!
//! Everything here is written directly from the model equations with
//! plain nested loops and 1-based arrays, deliberately avoiding the
//! production recursion code so the two paths can check each other.

use multiseason::model::ModelSpec;
use multiseason::rng::GaussianStream;
use multiseason::selection::FittedModel;
use multiseason::series::TimeSeries;
use multiseason::spectrum::SeasonalLagSet;

/// Naive double-loop evaluator of the residual recursion.
///
/// Works on 1-based copies of the data, looks up every coefficient from
/// the spec layout on the fly, treats residuals before the burn-in as
/// zero, and returns (residuals for `t = t0..=n`, sse).
pub fn naive_residuals(series: &TimeSeries, spec: &ModelSpec, theta: &[f64]) -> (Vec<f64>, f64) {
    let n = series.len();
    let mut x1 = vec![0.0; n + 1];
    for t in 1..=n {
        x1[t] = series.values()[t - 1];
    }
    let tau: usize = spec.lag_sets.iter().map(|s| s.len()).sum();
    assert_eq!(theta.len(), spec.p + spec.q + 2 * tau);

    let mut largest = spec.p.max(spec.q);
    for set in &spec.lag_sets {
        for &lag in set.lags() {
            largest = largest.max(lag);
        }
    }
    let t0 = largest + 1;

    let mut eps = vec![0.0; n + 1];
    let mut sse = 0.0;
    for t in t0..=n {
        let mut value = x1[t];
        for j in 1..=spec.p {
            value -= theta[j - 1] * x1[t - j];
        }
        for m in 1..=spec.q {
            value -= theta[spec.p + m - 1] * eps[t - m];
        }
        let mut offset = spec.p + spec.q;
        for set in &spec.lag_sets {
            for (l, &lag) in set.lags().iter().enumerate() {
                value -= theta[offset + l] * x1[t - lag];
                value -= theta[offset + set.len() + l] * eps[t - lag];
            }
            offset += 2 * set.len();
        }
        eps[t] = value;
        sse += value * value;
    }
    (eps[t0..=n].to_vec(), sse)
}

/// Central finite differences of the naive SSE.
pub fn fd_gradient(series: &TimeSeries, spec: &ModelSpec, theta: &[f64]) -> Vec<f64> {
    (0..theta.len())
        .map(|k| {
            let h = 1e-6 * theta[k].abs().max(1.0);
            let mut plus = theta.to_vec();
            plus[k] += h;
            let mut minus = theta.to_vec();
            minus[k] -= h;
            let (_, f_plus) = naive_residuals(series, spec, &plus);
            let (_, f_minus) = naive_residuals(series, spec, &minus);
            (f_plus - f_minus) / (2.0 * h)
        })
        .collect()
}

/// A deterministic battery of 20 model/parameter instances spanning
/// p, q in 0..=3, r in 0..=2, tau in 3..=6.
pub fn gradient_instances() -> Vec<(TimeSeries, ModelSpec, Vec<f64>)> {
    let mut out = Vec::new();
    let combos: [(usize, usize, usize, usize); 20] = [
        (0, 0, 0, 3),
        (1, 0, 0, 3),
        (0, 1, 0, 4),
        (2, 1, 0, 5),
        (3, 3, 0, 6),
        (0, 0, 1, 3),
        (1, 1, 1, 4),
        (2, 0, 1, 5),
        (0, 2, 1, 6),
        (3, 1, 1, 3),
        (2, 2, 1, 6),
        (1, 3, 1, 5),
        (0, 0, 2, 3),
        (1, 1, 2, 4),
        (2, 2, 2, 5),
        (3, 3, 2, 6),
        (2, 3, 2, 3),
        (3, 0, 2, 4),
        (0, 3, 2, 5),
        (3, 2, 2, 6),
    ];
    for (idx, &(p, q, r, tau)) in combos.iter().enumerate() {
        let seed = 1000 + idx as u64;
        let mut noise = GaussianStream::new(seed, 0);
        let n = 160;
        let series = TimeSeries::new(
            (1..=n)
                .map(|t| {
                    2.5 * (std::f64::consts::TAU * t as f64 / 20.0).sin() + noise.next_standard()
                })
                .collect(),
        )
        .unwrap();
        let mut lag_sets = Vec::new();
        for i in 0..r {
            // well-separated centers beyond the short-term lags
            let center = 18 + 14 * i;
            lag_sets.push(SeasonalLagSet::from_period(center, tau, p.max(q).max(3)));
        }
        let spec = ModelSpec::new(p, q, lag_sets);
        let mut coef_rng = GaussianStream::new(seed, 1);
        let theta: Vec<f64> = (0..spec.param_count())
            .map(|_| coef_rng.next_normal(0.0, 0.15))
            .collect();
        out.push((series, spec, theta));
    }
    out
}

/// Simulates futures from a fitted model and averages them: a Monte-Carlo
/// estimate of the conditional expectation. Returns per-horizon
/// (mean, standard error) for `j = 1..=horizon`.
pub fn monte_carlo_forecast(
    series: &TimeSeries,
    model: &FittedModel,
    horizon: usize,
    draws: usize,
    seed: u64,
) -> Vec<(f64, f64)> {
    let spec = &model.spec;
    let coef = &model.coef;
    let n = series.len();
    let state = multiseason::model::residuals(series, spec, coef).expect("residuals");

    let mut base_x = vec![0.0; n + horizon + 1];
    for t in 1..=n {
        base_x[t] = series.values()[t - 1];
    }
    let mut base_eps = vec![0.0; n + horizon + 1];
    for t in state.burn_in()..=n {
        base_eps[t] = state.residual_at(t);
    }

    let mut sums = vec![0.0; horizon];
    let mut sq_sums = vec![0.0; horizon];
    let mut rng = GaussianStream::new(seed, 0);
    for _ in 0..draws {
        let mut x = base_x.clone();
        let mut eps = base_eps.clone();
        for j in 1..=horizon {
            let t = n + j;
            let innovation = rng.next_normal(0.0, coef.sigma);
            let mut value = innovation;
            for (jj, w) in coef.phi.iter().enumerate() {
                value += w * x[t - jj - 1];
            }
            for (m, w) in coef.psi.iter().enumerate() {
                value += w * eps[t - m - 1];
            }
            for (i, set) in spec.lag_sets.iter().enumerate() {
                for (l, &lag) in set.lags().iter().enumerate() {
                    value += coef.gamma[i][l] * x[t - lag] + coef.lambda[i][l] * eps[t - lag];
                }
            }
            x[t] = value;
            eps[t] = innovation;
            sums[j - 1] += value;
            sq_sums[j - 1] += value * value;
        }
    }
    (0..horizon)
        .map(|j| {
            let mean = sums[j] / draws as f64;
            let var = (sq_sums[j] / draws as f64 - mean * mean).max(0.0);
            (mean, (var / draws as f64).sqrt())
        })
        .collect()
}

/// Ordinary-least-squares estimate and standard errors for an AR(2)
/// regression of `x_t` on `(x_{t-1}, x_{t-2})`, from the normal
/// equations.
pub fn ar2_ols(series: &TimeSeries) -> ([f64; 2], [f64; 2]) {
    let x = series.values();
    let n = x.len();
    let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut count = 0.0;
    for t in 2..n {
        let (y, x1, x2) = (x[t], x[t - 1], x[t - 2]);
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        b1 += x1 * y;
        b2 += x2 * y;
        count += 1.0;
    }
    let det = s11 * s22 - s12 * s12;
    let phi1 = (s22 * b1 - s12 * b2) / det;
    let phi2 = (-s12 * b1 + s11 * b2) / det;
    let mut sse = 0.0;
    for t in 2..n {
        let e = x[t] - phi1 * x[t - 1] - phi2 * x[t - 2];
        sse += e * e;
    }
    let sigma2 = sse / count;
    let se1 = (sigma2 * s22 / det).sqrt();
    let se2 = (sigma2 * s11 / det).sqrt();
    ([phi1, phi2], [se1, se2])
}
