//! Forecasting for univariate time series with multiple, unknown
//! seasonal periods.
//!
//! The procedure runs in two stages. Detection decomposes the series with
//! a discrete Fourier transform, ranks frequencies by signal strength,
//! and places blocks of consecutive lags around the strongest periods
//! ([`spectrum`]). Selection then fits a generalized seasonal ARMA model
//! by maximum likelihood at every admissible order combination and keeps
//! the one minimizing an information criterion ([`model`], [`selection`]);
//! forecasts are conditional expectations rolled forward through the
//! fitted recursion ([`forecast`]).
//!
//! The crate also ships seeded generators for the synthetic study designs
//! ([`simgen`]) and a rolling-origin benchmark harness ([`bench`]), so
//! the accuracy tables and the linear-runtime behavior can be reproduced
//! from the command line (`multiseason benchmark`).
//!
//! All model math is 1-based in time (`t = 1..=N`), with `X_t` stored at
//! `values()[t - 1]`; see [`series::TimeSeries`].

pub mod bench;
pub mod error;
pub mod forecast;
pub mod model;
pub mod optimizer;
pub mod rng;
pub mod selection;
pub mod series;
pub mod simgen;
pub mod spectrum;

pub use error::{MsError, Result};
pub use forecast::predict;
pub use model::{Coefficients, ModelSpec};
pub use selection::{select_model, Criterion, FittedModel, ModelDocument, MsConfig, Selection};
pub use series::{cmse, ForecastResult, TimeSeries};
pub use simgen::{gen_setup, SetupKind, SimSetup};
pub use spectrum::{build_candidate_sets, periodogram, SeasonalLagSet};
