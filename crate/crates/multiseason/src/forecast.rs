//! Recursive multi-step point prediction from a fitted model.

use crate::error::Result;
use crate::model::residuals;
use crate::selection::FittedModel;
use crate::series::{ForecastResult, TimeSeries};

/// Predicts `n` steps ahead as the conditional expectation under the
/// fitted recursion.
///
/// In-sample residuals are reconstructed first; then each future value is
/// rolled forward with observed values and residuals where available and
/// already-predicted values beyond the origin. Residuals at future (and
/// pre-burn-in) indices enter as zero, their conditional mean.
pub fn predict(series: &TimeSeries, model: &FittedModel, n: usize) -> Result<ForecastResult> {
    if n == 0 {
        return Err(crate::error::MsError::InvalidHorizon);
    }
    let spec = &model.spec;
    let coef = &model.coef;
    let state = residuals(series, spec, coef)?;
    let origin = series.len();

    // 1-based working arrays over t = 1..=origin+n.
    let mut extended = vec![0.0; origin + n + 1];
    extended[1..=origin].copy_from_slice(series.values());
    let mut innovations = vec![0.0; origin + n + 1];
    for t in state.burn_in()..=origin {
        innovations[t] = state.residual_at(t);
    }

    let mut predictions = Vec::with_capacity(n);
    for step in 1..=n {
        let t = origin + step;
        let mut value = 0.0;
        for (j, w) in coef.phi.iter().enumerate() {
            value += w * extended[t - j - 1];
        }
        for (m, w) in coef.psi.iter().enumerate() {
            value += w * innovations[t - m - 1];
        }
        for (i, set) in spec.lag_sets.iter().enumerate() {
            for (l, &lag) in set.lags().iter().enumerate() {
                value += coef.gamma[i][l] * extended[t - lag]
                    + coef.lambda[i][l] * innovations[t - lag];
            }
        }
        extended[t] = value;
        predictions.push(value);
    }
    ForecastResult::new(origin, predictions)
}
