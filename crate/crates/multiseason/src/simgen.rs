//! Seeded generators for the four synthetic study designs.
//!
//! Every design shares the same short-term disturbance, an ARMA(2,1)
//! process `Z_t = 0.8 Z_{t−1} − 0.3 Z_{t−2} + 0.5 ε_{t−1} + ε_t` with
//! `ε_t ~ N(0, 2²)`, warmed up for 200 discarded steps so the zero
//! initialization leaves no transient. Seasonal content is either
//! trigonometric (periods 50 and 15) or the periodic repetition of a
//! white-noise seeding segment, or both.

use serde::{Deserialize, Serialize};

use crate::error::{MsError, Result};
use crate::rng::{GaussianStream, STREAM_COMPONENT_A, STREAM_COMPONENT_B, STREAM_NOISE};
use crate::series::TimeSeries;

pub const AR_COEFS: [f64; 2] = [0.8, -0.3];
pub const MA_COEF: f64 = 0.5;
pub const NOISE_SD: f64 = 2.0;
const WARMUP: usize = 200;
/// Repetition of the non-trigonometric components starts at this index.
const SEED_SEGMENT_END: usize = 100;
const PERIOD_LONG: usize = 50;
const PERIOD_SHORT: usize = 15;
const AMPLITUDE_LONG: f64 = 10.0;
const AMPLITUDE_SHORT: f64 = 5.0;

/// The four data designs of the simulation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetupKind {
    /// `X_t = 10 sin(2πt/50) + Z_t`
    TrigSingle,
    /// `X_t = 10 sin(2πt/50) + 5 sin(2πt/15) + Z_t`
    TrigDouble,
    /// `X_t = A_t + B_t + Z_t` with periodically repeated noise segments.
    NonTrigDouble,
    /// All seasonal components combined.
    Mixed,
}

impl SetupKind {
    fn needs_seed_segment(self) -> bool {
        matches!(self, SetupKind::NonTrigDouble | SetupKind::Mixed)
    }

    fn has_trig(self) -> bool {
        !matches!(self, SetupKind::NonTrigDouble)
    }
}

impl std::fmt::Display for SetupKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            SetupKind::TrigSingle => "trig-single",
            SetupKind::TrigDouble => "trig-double",
            SetupKind::NonTrigDouble => "non-trig-double",
            SetupKind::Mixed => "mixed",
        };
        write!(f, "{name}")
    }
}

impl std::str::FromStr for SetupKind {
    type Err = MsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "trig-single" => Ok(SetupKind::TrigSingle),
            "trig-double" => Ok(SetupKind::TrigDouble),
            "non-trig-double" => Ok(SetupKind::NonTrigDouble),
            "mixed" => Ok(SetupKind::Mixed),
            other => Err(MsError::InvalidConfig(format!(
                "unknown setup kind '{other}'"
            ))),
        }
    }
}

/// One simulation request.
#[derive(Debug, Clone, Copy)]
pub struct SimSetup {
    pub kind: SetupKind,
    pub n: usize,
    pub seed: u64,
}

/// A generated series with its components kept separate, so tests and the
/// CLI can inspect each part.
#[derive(Debug, Clone)]
pub struct SimulatedSeries {
    pub series: TimeSeries,
    /// Deterministic trigonometric part (absent for the non-trig design).
    pub trig: Option<Vec<f64>>,
    /// Period-50 repeated-noise component.
    pub a: Option<Vec<f64>>,
    /// Period-15 repeated-noise component.
    pub b: Option<Vec<f64>>,
    /// Short-term ARMA(2,1) disturbance.
    pub z: Vec<f64>,
}

/// Generates the shared ARMA(2,1) disturbance, zero-initialized and
/// warmed up with 200 discarded steps.
pub fn gen_arma_noise(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = GaussianStream::new(seed, STREAM_NOISE);
    let mut z1 = 0.0; // Z_{t-1}
    let mut z2 = 0.0; // Z_{t-2}
    let mut e1 = 0.0; // ε_{t-1}
    let mut out = Vec::with_capacity(n);
    for t in 1..=WARMUP + n {
        let e = rng.next_normal(0.0, NOISE_SD);
        let z = AR_COEFS[0] * z1 + AR_COEFS[1] * z2 + MA_COEF * e1 + e;
        if t > WARMUP {
            out.push(z);
        }
        z2 = z1;
        z1 = z;
        e1 = e;
    }
    out
}

/// Period-`period` component: i.i.d. N(0,1) draws over the seeding
/// segment `t = 1..100`, then `C_t = C_{t−period}` from `t = 100` on.
fn gen_repeated_noise(n: usize, period: usize, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng = GaussianStream::new(seed, stream);
    let mut out = Vec::with_capacity(n);
    for t in 1..=n {
        if t < SEED_SEGMENT_END {
            out.push(rng.next_standard());
        } else {
            out.push(out[t - 1 - period]);
        }
    }
    out
}

/// Sine component evaluated through `t mod period`, so perfect periodicity
/// holds exactly in floating point.
fn sine(t: usize, period: usize, amplitude: f64) -> f64 {
    amplitude * (std::f64::consts::TAU * (t % period) as f64 / period as f64).sin()
}

/// Generates one series for the requested design.
pub fn gen_setup(setup: &SimSetup) -> Result<SimulatedSeries> {
    if setup.n == 0 {
        return Err(MsError::EmptySeries);
    }
    if setup.kind.needs_seed_segment() && setup.n < 150 {
        return Err(MsError::InvalidConfig(format!(
            "setup {} needs n >= 150 (100-step seeding segment plus usable data), got {}",
            setup.kind, setup.n
        )));
    }
    let n = setup.n;
    let z = gen_arma_noise(n, setup.seed);
    let trig: Option<Vec<f64>> = setup.kind.has_trig().then(|| {
        (1..=n)
            .map(|t| match setup.kind {
                SetupKind::TrigSingle => sine(t, PERIOD_LONG, AMPLITUDE_LONG),
                _ => sine(t, PERIOD_LONG, AMPLITUDE_LONG) + sine(t, PERIOD_SHORT, AMPLITUDE_SHORT),
            })
            .collect()
    });
    let (a, b) = if setup.kind.needs_seed_segment() {
        (
            Some(gen_repeated_noise(n, PERIOD_LONG, setup.seed, STREAM_COMPONENT_A)),
            Some(gen_repeated_noise(n, PERIOD_SHORT, setup.seed, STREAM_COMPONENT_B)),
        )
    } else {
        (None, None)
    };
    let mut values = z.clone();
    if let Some(trig) = &trig {
        for (v, t) in values.iter_mut().zip(trig) {
            *v += t;
        }
    }
    for component in [&a, &b].into_iter().flatten() {
        for (v, c) in values.iter_mut().zip(component) {
            *v += c;
        }
    }
    Ok(SimulatedSeries {
        series: TimeSeries::new(values)?,
        trig,
        a,
        b,
        z,
    })
}
