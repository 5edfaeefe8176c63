//! C interface to `nsk-core`.
//!
//! Every function returns an [`NskStatus`]; on failure a message is kept
//! per thread and read with [`nsk_last_error`]. Handles are opaque and are
//! released with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use nsk_core::analysis::predicted_exponent;
use nsk_core::io::{parse_config, run_scenario, Outcome, ScenarioConfig};
use nsk_core::model::{FluidParams, MAX_DIM};
use nsk_core::symbols::{matexp_oracle, solution_symbol, Discriminant, Regime};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NskStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Parameters or configuration rejected by validation.
    Rejected = 3,
    /// The scenario ran and at least one verdict failed.
    VerdictFailed = 4,
    /// Execution error while running a scenario.
    RunFailed = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NskRegime {
    PositiveReal = 0,
    NegativeOscillatory = 1,
    Degenerate = 2,
}

/// Opaque fluid parameters.
pub struct NskParams(FluidParams);

/// Opaque validated scenario configuration.
pub struct NskConfig(ScenarioConfig);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

fn fail(status: NskStatus, message: impl Into<String>) -> NskStatus {
    set_error(message);
    status
}

fn guard(body: impl FnOnce() -> NskStatus) -> NskStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => {
            if status == NskStatus::Ok {
                set_error("");
            }
            status
        }
        Err(_) => fail(NskStatus::Panic, "internal panic"),
    }
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn nsk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Toolkit version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nsk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parameters with the critical quadratic law `k (rho - rho_star)^2`.
///
/// # Safety
/// `out` must be null or point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn nsk_params_new(
    mu: f64,
    nu: f64,
    kappa: f64,
    rho: f64,
    k: f64,
    out: *mut *mut NskParams,
) -> NskStatus {
    guard(|| {
        if out.is_null() {
            return fail(NskStatus::NullPointer, "out is null");
        }
        match FluidParams::with_quadratic_pressure(mu, nu, kappa, rho, k) {
            Ok(p) => {
                unsafe { *out = Box::into_raw(Box::new(NskParams(p))) };
                NskStatus::Ok
            }
            Err(e) => fail(NskStatus::Rejected, e.to_string()),
        }
    })
}

/// # Safety
/// `params` must be null or a handle from [`nsk_params_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nsk_params_free(params: *mut NskParams) {
    if !params.is_null() {
        drop(unsafe { Box::from_raw(params) });
    }
}

/// Discriminant value and regime.
///
/// # Safety
/// Pointers must be null or valid; `params` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn nsk_params_discriminant(
    params: *const NskParams,
    out_value: *mut f64,
    out_regime: *mut NskRegime,
) -> NskStatus {
    guard(|| {
        if params.is_null() || out_value.is_null() || out_regime.is_null() {
            return fail(NskStatus::NullPointer, "null argument");
        }
        let d = Discriminant::of(unsafe { &(*params).0 });
        unsafe {
            *out_value = d.value;
            *out_regime = match d.regime {
                Regime::PositiveReal => NskRegime::PositiveReal,
                Regime::NegativeOscillatory => NskRegime::NegativeOscillatory,
                Regime::Degenerate => NskRegime::Degenerate,
            };
        }
        NskStatus::Ok
    })
}

unsafe fn wavevector<'a>(xi: *const f64, dim: usize) -> Result<&'a [f64], NskStatus> {
    if xi.is_null() {
        return Err(fail(NskStatus::NullPointer, "xi is null"));
    }
    if dim == 0 || dim > MAX_DIM {
        return Err(fail(NskStatus::InvalidArgument, format!("dim must be in 1..={MAX_DIM}")));
    }
    Ok(unsafe { std::slice::from_raw_parts(xi, dim) })
}

/// Solution operator at `(xi, t)` as a row-major `(dim+1) x (dim+1)`
/// complex matrix split into real and imaginary parts.
///
/// # Safety
/// `xi` must hold `dim` values; `out_re` and `out_im` must each hold
/// `(dim+1)^2` values.
#[no_mangle]
pub unsafe extern "C" fn nsk_solution_symbol(
    params: *const NskParams,
    xi: *const f64,
    dim: usize,
    t: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> NskStatus {
    guard(|| {
        if params.is_null() || out_re.is_null() || out_im.is_null() {
            return fail(NskStatus::NullPointer, "null argument");
        }
        let xi = match unsafe { wavevector(xi, dim) } {
            Ok(x) => x,
            Err(s) => return s,
        };
        if !(t >= 0.0 && t.is_finite()) {
            return fail(NskStatus::InvalidArgument, "t must be finite and non-negative");
        }
        let m = solution_symbol(unsafe { &(*params).0 }, xi, t);
        let n = dim + 1;
        let (re, im) = unsafe { (std::slice::from_raw_parts_mut(out_re, n * n), std::slice::from_raw_parts_mut(out_im, n * n)) };
        for r in 0..n {
            for c in 0..n {
                re[r * n + c] = m.0[(r, c)].re;
                im[r * n + c] = m.0[(r, c)].im;
            }
        }
        NskStatus::Ok
    })
}

/// Relative Frobenius deviation of the closed-form symbol from the matrix
/// exponential reference.
///
/// # Safety
/// `xi` must hold `dim` values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nsk_symbol_deviation(
    params: *const NskParams,
    xi: *const f64,
    dim: usize,
    t: f64,
    out: *mut f64,
) -> NskStatus {
    guard(|| {
        if params.is_null() || out.is_null() {
            return fail(NskStatus::NullPointer, "null argument");
        }
        let xi = match unsafe { wavevector(xi, dim) } {
            Ok(x) => x,
            Err(s) => return s,
        };
        if !(t >= 0.0 && t.is_finite()) {
            return fail(NskStatus::InvalidArgument, "t must be finite and non-negative");
        }
        let p = unsafe { &(*params).0 };
        unsafe { *out = solution_symbol(p, xi, t).relative_deviation(&matexp_oracle(p, xi, t)) };
        NskStatus::Ok
    })
}

/// `-(N/2)(1/q - 1/p) - j/2`; pass `INFINITY` for the sup norm.
#[no_mangle]
pub extern "C" fn nsk_predicted_exponent(dim: usize, p: f64, q: f64, j: u32) -> f64 {
    predicted_exponent(dim, p, q, j)
}

unsafe fn utf8<'a>(s: *const c_char, what: &str) -> Result<&'a str, NskStatus> {
    if s.is_null() {
        return Err(fail(NskStatus::NullPointer, format!("{what} is null")));
    }
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map_err(|_| fail(NskStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Parses and validates a scenario TOML document.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nsk_config_parse(text: *const c_char, out: *mut *mut NskConfig) -> NskStatus {
    guard(|| {
        if out.is_null() {
            return fail(NskStatus::NullPointer, "out is null");
        }
        let text = match unsafe { utf8(text, "text") } {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_config(text) {
            Ok(c) => {
                unsafe { *out = Box::into_raw(Box::new(NskConfig(c))) };
                NskStatus::Ok
            }
            Err(e) => fail(NskStatus::Rejected, e.to_string()),
        }
    })
}

/// # Safety
/// `config` must be null or a handle from [`nsk_config_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nsk_config_free(config: *mut NskConfig) {
    if !config.is_null() {
        drop(unsafe { Box::from_raw(config) });
    }
}

/// Runs the scenario and writes its artifacts into `out_dir`. Returns
/// `Ok` when every verdict passes and `VerdictFailed` otherwise.
///
/// # Safety
/// `config` must be a live handle and `out_dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn nsk_run_scenario(config: *const NskConfig, out_dir: *const c_char) -> NskStatus {
    guard(|| {
        if config.is_null() {
            return fail(NskStatus::NullPointer, "config is null");
        }
        let dir = match unsafe { utf8(out_dir, "out_dir") } {
            Ok(d) => d,
            Err(s) => return s,
        };
        match run_scenario(unsafe { &(*config).0 }, None, Path::new(dir)) {
            Ok(Outcome::Pass) => NskStatus::Ok,
            Ok(Outcome::Fail) => fail(NskStatus::VerdictFailed, "at least one verdict failed"),
            Err(e) => fail(NskStatus::RunFailed, e.to_string()),
        }
    })
}
