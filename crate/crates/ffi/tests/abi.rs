//! Exercises the C entry points from Rust: handle lifecycle, JSON
//! round trips, status codes, and the generated header.

use curve_normals_ffi::*;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

fn last_error() -> String {
    unsafe { CStr::from_ptr(cn_last_error()) }
        .to_str()
        .unwrap()
        .to_owned()
}

fn parse(json: &str) -> *mut CnCurve {
    let text = CString::new(json).unwrap();
    let mut handle: *mut CnCurve = ptr::null_mut();
    let status = unsafe { cn_curve_parse_json(text.as_ptr(), &mut handle) };
    assert_eq!(status, CnStatus::Ok, "{}", last_error());
    assert!(!handle.is_null());
    handle
}

fn take_string(ptr: *mut c_char) -> String {
    assert!(!ptr.is_null());
    let text = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_owned();
    unsafe { cn_string_free(ptr) };
    text
}

const CIRCLE: &str = r#"{
    "type": "fourier",
    "order": 1,
    "coeffs": {
        "x": {"a0": 0.0, "a": [1.0], "b": [0.0]},
        "y": {"a0": 0.0, "a": [0.0], "b": [1.0]},
        "z": {"a0": 0.0, "a": [0.0], "b": [0.0]}
    }
}"#;

#[test]
fn circle_census_through_the_abi() {
    let curve = parse(CIRCLE);
    let mut out: *mut c_char = ptr::null_mut();
    let status = unsafe { cn_normals_json(curve, 0.5, 0.0, 0.0, 0, &mut out) };
    assert_eq!(status, CnStatus::Ok, "{}", last_error());
    let census: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(census["n"], 2);
    unsafe { cn_curve_free(curve) };
}

#[test]
fn on_curve_point_reports_non_generic() {
    let curve = parse(CIRCLE);
    let mut out: *mut c_char = ptr::null_mut();
    let status = unsafe { cn_normals_json(curve, 1.0, 0.0, 0.0, 0, &mut out) };
    assert_eq!(status, CnStatus::NonGeneric);
    assert!(out.is_null());
    assert!(last_error().contains("curve"));
    unsafe { cn_curve_free(curve) };
}

#[test]
fn null_arguments_are_rejected() {
    let mut handle: *mut CnCurve = ptr::null_mut();
    let status = unsafe { cn_curve_parse_json(ptr::null(), &mut handle) };
    assert_eq!(status, CnStatus::BadArgument);

    let mut out: *mut c_char = ptr::null_mut();
    let status = unsafe { cn_normals_json(ptr::null(), 0.0, 0.0, 0.0, 0, &mut out) };
    assert_eq!(status, CnStatus::BadArgument);

    unsafe {
        cn_curve_free(ptr::null_mut());
        cn_string_free(ptr::null_mut());
    }
}

#[test]
fn malformed_json_is_an_error() {
    let text = CString::new("{\"type\": \"dodecahedron\"}").unwrap();
    let mut handle: *mut CnCurve = ptr::null_mut();
    let status = unsafe { cn_curve_parse_json(text.as_ptr(), &mut handle) };
    assert_eq!(status, CnStatus::Error);
    assert!(handle.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn witness_on_a_stick_trefoil() {
    let curve = curve_normals::generate::stick_trefoil(6).unwrap();
    let text = canonical_curve_json(&curve_normals::Curve::Pl(curve));
    let handle = parse(&text);
    let mut out: *mut c_char = ptr::null_mut();
    let status = unsafe { cn_witness_json(handle, 0, 0, &mut out) };
    assert_eq!(status, CnStatus::Ok, "{}", last_error());
    let result: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert!(result["n"].as_u64().unwrap() >= 10);
    unsafe { cn_curve_free(handle) };
}

#[test]
fn ed_degree_bound_through_the_abi() {
    let mut bound = 0u64;
    let status = unsafe { cn_ed_degree_bound(2, 2, &mut bound) };
    assert_eq!(status, CnStatus::Ok);
    assert_eq!(bound, 8);

    let status = unsafe { cn_ed_degree_bound(0, 2, &mut bound) };
    assert_eq!(status, CnStatus::Error);
}

#[test]
fn header_exports_the_entry_points() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("curve_normals.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in [
        "cn_curve_parse_json",
        "cn_curve_free",
        "cn_normals_json",
        "cn_witness_json",
        "cn_ed_degree_bound",
        "cn_string_free",
        "cn_last_error",
        "CN_STATUS_NON_GENERIC",
    ] {
        assert!(text.contains(name), "header is missing {name}");
    }
}

fn canonical_curve_json(curve: &curve_normals::Curve) -> String {
    curve_normals::io::canonical_json(&curve_normals::io::curve_json(curve))
}
