//! C ABI over `quasizero`.
//!
//! Every fallible call returns a [`QzStatus`]; on failure the message is
//! available from [`qz_last_error`] on the same thread. Objects are opaque
//! handles released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use quasizero::factorizer::{factor, FactorConfig, FactorOutcome};
use quasizero::{expand_sine_product, find_zeros, AtomicMeasure, Error, ExpPolynomial, Rect, SineProduct};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QzStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Numerical = 4,
    OutOfRange = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QzVerdict {
    SineProduct = 0,
    NotSineProduct = 1,
    Inconclusive = 2,
}

/// Exponential polynomial handle.
pub struct QzPolynomial(ExpPolynomial);

/// Zeros found in a rectangle.
pub struct QzZeroSet {
    measure: AtomicMeasure,
    count: usize,
}

/// Outcome of [`qz_factor`].
pub struct QzFactorResult(FactorOutcome);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: QzStatus, msg: impl Into<String>) -> QzStatus {
    set_error(msg);
    status
}

fn lib_error(e: Error) -> QzStatus {
    let status = match e.root() {
        Error::InvalidArgument(_) | Error::EmptyPolynomial | Error::ZeroFree | Error::Precondition(_) => {
            QzStatus::InvalidArgument
        }
        _ => QzStatus::Numerical,
    };
    fail(status, e.to_string())
}

fn guard<F: FnOnce() -> QzStatus>(f: F) -> QzStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(QzStatus::Panic, "internal panic"))
}

unsafe fn c_str<'a>(s: *const c_char) -> Result<&'a str, QzStatus> {
    if s.is_null() {
        return Err(fail(QzStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s).to_str().map_err(|e| fail(QzStatus::Parse, format!("string is not UTF-8: {e}")))
}

fn into_handle<T>(value: T, out: *mut *mut T) -> QzStatus {
    unsafe { *out = Box::into_raw(Box::new(value)) };
    QzStatus::Ok
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn qz_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds a polynomial from `n` terms `(omega[k], re[k] + i im[k])`.
///
/// # Safety
/// `omega`, `re` and `im` must each point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qz_polynomial_new(
    omega: *const f64,
    re: *const f64,
    im: *const f64,
    n: usize,
    out: *mut *mut QzPolynomial,
) -> QzStatus {
    guard(|| {
        if out.is_null() || (n > 0 && (omega.is_null() || re.is_null() || im.is_null())) {
            return fail(QzStatus::NullPointer, "null argument");
        }
        let terms: Vec<(f64, Complex64)> = if n == 0 {
            Vec::new()
        } else {
            let (w, r, i) = (
                std::slice::from_raw_parts(omega, n),
                std::slice::from_raw_parts(re, n),
                std::slice::from_raw_parts(im, n),
            );
            (0..n).map(|k| (w[k], Complex64::new(r[k], i[k]))).collect()
        };
        match ExpPolynomial::from_terms(terms) {
            Ok(p) => into_handle(QzPolynomial(p), out),
            Err(e) => lib_error(e),
        }
    })
}

/// Parses `{"terms": [...]}` or a sine product `{"C": [re, im], "a": ..., "factors": [...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qz_polynomial_from_json(json: *const c_char, out: *mut *mut QzPolynomial) -> QzStatus {
    guard(|| {
        if out.is_null() {
            return fail(QzStatus::NullPointer, "null output");
        }
        let text = match c_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let v: serde_json::Value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(e) => return fail(QzStatus::Parse, e.to_string()),
        };
        let parsed = if v.get("terms").is_some() {
            serde_json::from_value::<ExpPolynomial>(v).map_err(|e| e.to_string())
        } else {
            serde_json::from_value::<SineProduct>(v)
                .map_err(|e| e.to_string())
                .and_then(|s| expand_sine_product(&s).map_err(|e| e.to_string()))
        };
        match parsed {
            Ok(p) => into_handle(QzPolynomial(p), out),
            Err(e) => fail(QzStatus::Parse, e),
        }
    })
}

/// # Safety
/// `p` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qz_polynomial_free(p: *mut QzPolynomial) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of terms; 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qz_polynomial_len(p: *const QzPolynomial) -> usize {
    p.as_ref().map_or(0, |p| p.0.len())
}

/// # Safety
/// `p` must be a live handle; `out_re` and `out_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qz_polynomial_evaluate(
    p: *const QzPolynomial,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> QzStatus {
    guard(|| {
        let (Some(p), false, false) = (p.as_ref(), out_re.is_null(), out_im.is_null()) else {
            return fail(QzStatus::NullPointer, "null argument");
        };
        let v = p.0.evaluate(Complex64::new(re, im));
        *out_re = v.re;
        *out_im = v.im;
        QzStatus::Ok
    })
}

/// Locates all zeros in `[x0, x1] x [y0, y1]` to tolerance `tol`.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qz_find_zeros(
    p: *const QzPolynomial,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    tol: f64,
    out: *mut *mut QzZeroSet,
) -> QzStatus {
    guard(|| {
        let (Some(p), false) = (p.as_ref(), out.is_null()) else {
            return fail(QzStatus::NullPointer, "null argument");
        };
        let rect = match Rect::new(x0, x1, y0, y1) {
            Ok(r) => r,
            Err(e) => return lib_error(e),
        };
        match find_zeros(&p.0, &rect, tol) {
            Ok(rep) => into_handle(QzZeroSet { measure: rep.measure, count: rep.count }, out),
            Err(e) => lib_error(e),
        }
    })
}

/// Number of distinct zeros.
///
/// # Safety
/// `z` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qz_zero_set_len(z: *const QzZeroSet) -> usize {
    z.as_ref().map_or(0, |z| z.measure.len())
}

/// Zeros counted with multiplicity.
///
/// # Safety
/// `z` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qz_zero_set_count(z: *const QzZeroSet) -> usize {
    z.as_ref().map_or(0, |z| z.count)
}

/// Location and multiplicity of zero `i`, zeros sorted by real part.
///
/// # Safety
/// `z` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn qz_zero_set_get(
    z: *const QzZeroSet,
    i: usize,
    out_re: *mut f64,
    out_im: *mut f64,
    out_mult: *mut u32,
) -> QzStatus {
    guard(|| {
        let (Some(z), false, false, false) = (z.as_ref(), out_re.is_null(), out_im.is_null(), out_mult.is_null()) else {
            return fail(QzStatus::NullPointer, "null argument");
        };
        let Some(a) = z.measure.atoms().get(i) else {
            return fail(QzStatus::OutOfRange, format!("index {i} out of range ({} zeros)", z.measure.len()));
        };
        *out_re = a.location.re;
        *out_im = a.location.im;
        *out_mult = a.mass.re.round() as u32;
        QzStatus::Ok
    })
}

/// # Safety
/// `z` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qz_zero_set_free(z: *mut QzZeroSet) {
    if !z.is_null() {
        drop(Box::from_raw(z));
    }
}

/// Runs the full factorization. `config_json` may be null for defaults or
/// hold a JSON object with any of the `FactorConfig` fields.
///
/// # Safety
/// `p` must be a live handle, `config_json` null or NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qz_factor(
    p: *const QzPolynomial,
    config_json: *const c_char,
    out: *mut *mut QzFactorResult,
) -> QzStatus {
    guard(|| {
        let (Some(p), false) = (p.as_ref(), out.is_null()) else {
            return fail(QzStatus::NullPointer, "null argument");
        };
        let cfg = if config_json.is_null() {
            FactorConfig::default()
        } else {
            let text = match c_str(config_json) {
                Ok(t) => t,
                Err(s) => return s,
            };
            match serde_json::from_str::<FactorConfig>(text) {
                Ok(c) => c,
                Err(e) => return fail(QzStatus::Parse, e.to_string()),
            }
        };
        match factor(&p.0, &cfg) {
            Ok(o) => into_handle(QzFactorResult(o), out),
            Err(e) => lib_error(e),
        }
    })
}

/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qz_factor_verdict(r: *const QzFactorResult) -> QzVerdict {
    match r.as_ref().map(|r| &r.0) {
        Some(FactorOutcome::SineProduct(_)) => QzVerdict::SineProduct,
        Some(FactorOutcome::NotSineProduct { .. }) => QzVerdict::NotSineProduct,
        _ => QzVerdict::Inconclusive,
    }
}

/// Result as a JSON string owned by the caller; release with [`qz_string_free`].
/// Null for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qz_factor_json(r: *const QzFactorResult) -> *mut c_char {
    match r.as_ref() {
        Some(r) => CString::new(r.0.to_json().to_string()).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `r` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qz_factor_result_free(r: *mut QzFactorResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qz_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
