//! C ABI for the multiseason forecasting library.
//!
//! Conventions:
//! - Handles (`MsSeries`, `MsModel`) are opaque; create/free in pairs.
//! - Every fallible call returns an [`MsStatus`]; outputs go through
//!   pointer arguments and are written only on `MS_STATUS_OK`.
//! - [`ms_last_error`] returns a thread-local message describing the most
//!   recent failure on the calling thread.
//! - Strings returned by the library are NUL-terminated and must be
//!   released with [`ms_string_free`].
//!
//! The companion header `include/multiseason.h` is generated by cbindgen
//! at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use multiseason::selection::{select_model, Criterion, ModelDocument, MsConfig};
use multiseason::series::{read_series_csv, TimeSeries};
use multiseason::simgen::{gen_setup, SetupKind, SimSetup};
use multiseason::spectrum::detect_candidates;

/// Status code of every fallible FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer,
    /// An argument value violates the documented constraints.
    InvalidArgument,
    /// The input data is unusable (parse failure, non-finite values, too short).
    DataError,
    /// Detection or fitting failed on valid input.
    FitError,
    /// A model document could not be serialized or parsed.
    JsonError,
    /// A string argument was not valid UTF-8.
    Utf8Error,
    /// An internal panic was caught at the boundary.
    Panic,
}

/// Opaque time-series handle.
pub struct MsSeries {
    inner: TimeSeries,
}

/// Opaque fitted-model handle (model, configuration, centering shift).
pub struct MsModel {
    document: ModelDocument,
}

/// Fit options understood by [`ms_fit`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MsFitOptions {
    /// Seasonal components; 0 fits the plain ARMA baseline.
    pub r: usize,
    /// Lags per seasonal set; must exceed both order bounds.
    pub tau: usize,
    pub p_max: usize,
    pub q_max: usize,
    /// 0 = bridge criterion, 1 = AIC, 2 = BIC.
    pub criterion: i32,
    /// Nonzero: subtract the sample mean before fitting and shift
    /// forecasts back.
    pub center: i32,
    /// Nonzero: also try models with fewer than `r` seasonal sets.
    pub allow_fewer: i32,
    pub seed: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl AsRef<str>) {
    let sanitized = message.as_ref().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn classify(err: &multiseason::MsError) -> MsStatus {
    use multiseason::MsError::*;
    match err {
        EmptySeries | NonFinite { .. } | LengthMismatch { .. } | CsvParse { .. } | Io(_) => {
            MsStatus::DataError
        }
        SeriesTooShort { .. } | DetectionFailed | AllSpecsFailed(_) | NonFinitePrediction { .. } => {
            MsStatus::FitError
        }
        DimensionMismatch { .. } | InvalidConfig(_) | InvalidHorizon => MsStatus::InvalidArgument,
        Json(_) => MsStatus::JsonError,
    }
}

fn fail(err: &multiseason::MsError) -> MsStatus {
    set_error(err.to_string());
    classify(err)
}

/// Runs a body with panic containment, translating panics to a status.
fn guarded(body: impl FnOnce() -> MsStatus) -> MsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            MsStatus::Panic
        }
    }
}

/// Most recent error message on this thread; empty string when the last
/// call succeeded. The pointer stays valid until the next failing call
/// on the same thread.
#[no_mangle]
pub extern "C" fn ms_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Builds a series from `len` finite values.
///
/// # Safety
/// `values` must point to `len` readable doubles and `out` must be a
/// valid location for a handle pointer.
#[no_mangle]
pub unsafe extern "C" fn ms_series_create(
    values: *const f64,
    len: usize,
    out: *mut *mut MsSeries,
) -> MsStatus {
    guarded(|| {
        if values.is_null() || out.is_null() {
            set_error("null pointer argument");
            return MsStatus::NullPointer;
        }
        let slice = std::slice::from_raw_parts(values, len);
        match TimeSeries::new(slice.to_vec()) {
            Ok(series) => {
                *out = Box::into_raw(Box::new(MsSeries { inner: series }));
                MsStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Reads a single-column CSV (optional header) into a series handle.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn ms_series_from_csv(
    path: *const c_char,
    out: *mut *mut MsSeries,
) -> MsStatus {
    guarded(|| {
        if path.is_null() || out.is_null() {
            set_error("null pointer argument");
            return MsStatus::NullPointer;
        }
        let Ok(path) = CStr::from_ptr(path).to_str() else {
            set_error("path is not valid UTF-8");
            return MsStatus::Utf8Error;
        };
        match read_series_csv(Path::new(path)) {
            Ok(series) => {
                *out = Box::into_raw(Box::new(MsSeries { inner: series }));
                MsStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Number of observations behind the handle (0 for null).
///
/// # Safety
/// `series` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ms_series_len(series: *const MsSeries) -> usize {
    if series.is_null() {
        return 0;
    }
    (*series).inner.len()
}

/// Releases a series handle; null is a no-op.
///
/// # Safety
/// `series` must be null or an unreleased handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ms_series_free(series: *mut MsSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Fills `out` with the default options for `r` seasonal components
/// (tau 6, order bounds 3, bridge criterion, centering on).
///
/// # Safety
/// `out` must be a valid location for an options struct.
#[no_mangle]
pub unsafe extern "C" fn ms_fit_options_init(r: usize, out: *mut MsFitOptions) -> MsStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null pointer argument");
            return MsStatus::NullPointer;
        }
        *out = MsFitOptions {
            r,
            tau: 6,
            p_max: 3,
            q_max: 3,
            criterion: 0,
            center: 1,
            allow_fewer: 0,
            seed: 0,
        };
        MsStatus::Ok
    })
}

fn config_from_options(options: &MsFitOptions) -> Result<MsConfig, MsStatus> {
    let criterion = match options.criterion {
        0 => Criterion::Bc,
        1 => Criterion::Aic,
        2 => Criterion::Bic,
        other => {
            set_error(format!("unknown criterion code {other}"));
            return Err(MsStatus::InvalidArgument);
        }
    };
    let mut cfg = MsConfig::new(options.r);
    cfg.tau = options.tau;
    cfg.p_max = options.p_max;
    cfg.q_max = options.q_max;
    cfg.criterion = criterion;
    cfg.allow_fewer = options.allow_fewer != 0;
    cfg.seed = options.seed;
    if let Err(err) = cfg.validate() {
        return Err(fail(&err));
    }
    Ok(cfg)
}

/// Runs detection and model selection, returning a fitted-model handle.
///
/// # Safety
/// All pointers must be valid; `series` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ms_fit(
    series: *const MsSeries,
    options: *const MsFitOptions,
    out: *mut *mut MsModel,
) -> MsStatus {
    guarded(|| {
        if series.is_null() || options.is_null() || out.is_null() {
            set_error("null pointer argument");
            return MsStatus::NullPointer;
        }
        let options = &*options;
        let cfg = match config_from_options(options) {
            Ok(cfg) => cfg,
            Err(status) => return status,
        };
        let raw = &(*series).inner;
        let (fit_input, center_mean) = if options.center != 0 {
            let (centered, mean) = raw.centered();
            (centered, Some(mean))
        } else {
            (raw.clone(), None)
        };
        match select_model(&fit_input, &cfg) {
            Ok(selection) => {
                let document = ModelDocument::new(&selection.best, &cfg, center_mean);
                *out = Box::into_raw(Box::new(MsModel { document }));
                MsStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Releases a model handle; null is a no-op.
///
/// # Safety
/// `model` must be null or an unreleased handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ms_model_free(model: *mut MsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Serializes the model to its JSON document form. The returned string
/// must be released with [`ms_string_free`].
///
/// # Safety
/// `model` must be a live handle and `out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn ms_model_to_json(
    model: *const MsModel,
    out: *mut *mut c_char,
) -> MsStatus {
    guarded(|| {
        if model.is_null() || out.is_null() {
            set_error("null pointer argument");
            return MsStatus::NullPointer;
        }
        match (*model).document.to_json() {
            Ok(json) => match CString::new(json) {
                Ok(text) => {
                    *out = text.into_raw();
                    MsStatus::Ok
                }
                Err(_) => {
                    set_error("document contained an interior NUL byte");
                    MsStatus::JsonError
                }
            },
            Err(err) => fail(&err),
        }
    })
}

/// Restores a model handle from a JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn ms_model_from_json(
    json: *const c_char,
    out: *mut *mut MsModel,
) -> MsStatus {
    guarded(|| {
        if json.is_null() || out.is_null() {
            set_error("null pointer argument");
            return MsStatus::NullPointer;
        }
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            set_error("document is not valid UTF-8");
            return MsStatus::Utf8Error;
        };
        match ModelDocument::from_json(text) {
            Ok(document) => {
                *out = Box::into_raw(Box::new(MsModel { document }));
                MsStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Releases a string produced by this library; null is a no-op.
///
/// # Safety
/// `text` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ms_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

/// Predicts `horizon` steps ahead from the end of `series`, writing the
/// predictions into `out` (which must hold `horizon` doubles). Centering
/// recorded in the model is applied and inverted automatically.
///
/// # Safety
/// All pointers must be valid; `out` must have room for `horizon` values.
#[no_mangle]
pub unsafe extern "C" fn ms_forecast(
    model: *const MsModel,
    series: *const MsSeries,
    horizon: usize,
    out: *mut f64,
) -> MsStatus {
    guarded(|| {
        if model.is_null() || series.is_null() || out.is_null() {
            set_error("null pointer argument");
            return MsStatus::NullPointer;
        }
        let document = &(*model).document;
        let raw = &(*series).inner;
        let mean = document.center_mean.unwrap_or(0.0);
        let prepared = if document.center_mean.is_some() {
            match TimeSeries::new(raw.values().iter().map(|v| v - mean).collect()) {
                Ok(series) => series,
                Err(err) => return fail(&err),
            }
        } else {
            raw.clone()
        };
        match multiseason::predict(&prepared, &document.to_fitted(), horizon) {
            Ok(result) => {
                for (slot, value) in std::slice::from_raw_parts_mut(out, horizon)
                    .iter_mut()
                    .zip(result.predictions())
                {
                    *slot = value + mean;
                }
                MsStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Detects up to `capacity` candidate seasonal periods, writing their
/// center lags into `out_centers` (strongest first) and the number
/// written into `out_count`.
///
/// # Safety
/// All pointers must be valid; `out_centers` must have room for
/// `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn ms_detect_periods(
    series: *const MsSeries,
    r: usize,
    tau: usize,
    min_lag: usize,
    max_lag: usize,
    out_centers: *mut usize,
    capacity: usize,
    out_count: *mut usize,
) -> MsStatus {
    guarded(|| {
        if series.is_null() || out_centers.is_null() || out_count.is_null() {
            set_error("null pointer argument");
            return MsStatus::NullPointer;
        }
        match detect_candidates(&(*series).inner, r, tau, min_lag, max_lag) {
            Ok(candidates) => {
                let slots = std::slice::from_raw_parts_mut(out_centers, capacity);
                let count = candidates.len().min(capacity);
                for (slot, candidate) in slots.iter_mut().zip(candidates.iter().take(count)) {
                    *slot = candidate.lag_set.center();
                }
                *out_count = count;
                MsStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Generates one of the synthetic study designs into `out` (`n` doubles).
/// `kind`: 0 single trig, 1 double trig, 2 repeated-noise double, 3 mixed.
///
/// # Safety
/// `out` must have room for `n` values.
#[no_mangle]
pub unsafe extern "C" fn ms_simulate(kind: i32, n: usize, seed: u64, out: *mut f64) -> MsStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null pointer argument");
            return MsStatus::NullPointer;
        }
        let kind = match kind {
            0 => SetupKind::TrigSingle,
            1 => SetupKind::TrigDouble,
            2 => SetupKind::NonTrigDouble,
            3 => SetupKind::Mixed,
            other => {
                set_error(format!("unknown setup kind code {other}"));
                return MsStatus::InvalidArgument;
            }
        };
        match gen_setup(&SimSetup { kind, n, seed }) {
            Ok(sim) => {
                std::slice::from_raw_parts_mut(out, n).copy_from_slice(sim.series.values());
                MsStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}
