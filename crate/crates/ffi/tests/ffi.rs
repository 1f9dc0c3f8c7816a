use std::ffi::{CStr, CString};
use std::ptr;

use quasizero_ffi::*;

const SIN: &str = r#"{"terms":[{"omega":-0.5,"coeff":[0,0.5]},{"omega":0.5,"coeff":[0,-0.5]}]}"#;

fn poly(json: &str) -> *mut QzPolynomial {
    let text = CString::new(json).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { qz_polynomial_from_json(text.as_ptr(), &mut p) }, QzStatus::Ok);
    p
}

fn last_error() -> String {
    let e = qz_last_error();
    assert!(!e.is_null());
    unsafe { CStr::from_ptr(e) }.to_string_lossy().into_owned()
}

#[test]
fn builds_and_evaluates_from_arrays() {
    let omega = [-0.5, 0.5];
    let re = [0.0, 0.0];
    let im = [0.5, -0.5];
    let mut p = ptr::null_mut();
    let st = unsafe { qz_polynomial_new(omega.as_ptr(), re.as_ptr(), im.as_ptr(), 2, &mut p) };
    assert_eq!(st, QzStatus::Ok);
    assert_eq!(unsafe { qz_polynomial_len(p) }, 2);
    let (mut vr, mut vi) = (0.0, 0.0);
    assert_eq!(unsafe { qz_polynomial_evaluate(p, 0.5, 0.0, &mut vr, &mut vi) }, QzStatus::Ok);
    assert!((vr - 1.0).abs() < 1e-15 && vi.abs() < 1e-15);
    unsafe { qz_polynomial_free(p) };
}

#[test]
fn finds_integer_zeros() {
    let p = poly(SIN);
    let mut z = ptr::null_mut();
    assert_eq!(unsafe { qz_find_zeros(p, -3.4, 3.4, -1.0, 1.0, 1e-12, &mut z) }, QzStatus::Ok);
    assert_eq!(unsafe { qz_zero_set_len(z) }, 7);
    assert_eq!(unsafe { qz_zero_set_count(z) }, 7);
    for i in 0..7 {
        let (mut x, mut y, mut m) = (0.0, 0.0, 0u32);
        assert_eq!(unsafe { qz_zero_set_get(z, i, &mut x, &mut y, &mut m) }, QzStatus::Ok);
        assert!((x - (i as f64 - 3.0)).abs() < 1e-10 && y.abs() < 1e-10);
        assert_eq!(m, 1);
    }
    let (mut x, mut y, mut m) = (0.0, 0.0, 0u32);
    assert_eq!(unsafe { qz_zero_set_get(z, 7, &mut x, &mut y, &mut m) }, QzStatus::OutOfRange);
    assert!(last_error().contains("out of range"));
    unsafe {
        qz_zero_set_free(z);
        qz_polynomial_free(p);
    }
}

#[test]
fn factors_sine_product_and_rejects_cosh() {
    let p = poly(r#"{"C":[2,0],"a":0,"factors":[{"alpha":3.141592653589793,"beta":0.5,"mult":1}]}"#);
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { qz_factor(p, ptr::null(), &mut r) }, QzStatus::Ok);
    assert_eq!(unsafe { qz_factor_verdict(r) }, QzVerdict::SineProduct);
    let s = unsafe { qz_factor_json(r) };
    let json: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(s) }.to_str().unwrap()).unwrap();
    assert_eq!(json["verdict"], "sine_product");
    let beta = json["factors"][0]["beta"].as_f64().unwrap();
    assert!((beta - 0.5).abs() < 1e-8);
    unsafe {
        qz_string_free(s);
        qz_factor_result_free(r);
        qz_polynomial_free(p);
    }

    let q = poly(r#"{"terms":[{"omega":-1,"coeff":[1,0]},{"omega":0,"coeff":[4,0]},{"omega":1,"coeff":[1,0]}]}"#);
    let cfg = CString::new(r#"{"gamma_max": 16}"#).unwrap();
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { qz_factor(q, cfg.as_ptr(), &mut r) }, QzStatus::Ok);
    assert_eq!(unsafe { qz_factor_verdict(r) }, QzVerdict::NotSineProduct);
    unsafe {
        qz_factor_result_free(r);
        qz_polynomial_free(q);
    }
}

#[test]
fn reports_errors() {
    let bad = CString::new("{").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { qz_polynomial_from_json(bad.as_ptr(), &mut p) }, QzStatus::Parse);
    assert!(p.is_null());
    assert!(!last_error().is_empty());

    assert_eq!(unsafe { qz_polynomial_from_json(ptr::null(), &mut p) }, QzStatus::NullPointer);

    let omega = [f64::NAN];
    let zero = [1.0];
    let st = unsafe { qz_polynomial_new(omega.as_ptr(), zero.as_ptr(), zero.as_ptr(), 1, &mut p) };
    assert_eq!(st, QzStatus::InvalidArgument);

    let q = poly(SIN);
    let mut z = ptr::null_mut();
    assert_eq!(unsafe { qz_find_zeros(q, 1.0, 0.0, -1.0, 1.0, 1e-12, &mut z) }, QzStatus::InvalidArgument);
    let cfg = CString::new(r#"{"radii": "dyadic"}"#).unwrap();
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { qz_factor(q, cfg.as_ptr(), &mut r) }, QzStatus::Parse);
    unsafe { qz_polynomial_free(q) };

    // a successful call clears the message
    let q = poly(SIN);
    assert!(qz_last_error().is_null());
    unsafe { qz_polynomial_free(q) };
}

#[test]
fn null_handles_are_harmless() {
    unsafe {
        qz_polynomial_free(ptr::null_mut());
        qz_zero_set_free(ptr::null_mut());
        qz_factor_result_free(ptr::null_mut());
        qz_string_free(ptr::null_mut());
        assert_eq!(qz_polynomial_len(ptr::null()), 0);
        assert!(qz_factor_json(ptr::null()).is_null());
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/quasizero.h")).unwrap();
    for name in ["qz_polynomial_new", "qz_find_zeros", "qz_factor", "qz_last_error", "QZ_STATUS_OK", "QzPolynomial"] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
