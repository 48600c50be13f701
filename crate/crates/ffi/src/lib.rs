//! C ABI for the toolkit.
//!
//! Curves are opaque handles parsed from the same JSON schema the CLI
//! reads. Results come back as canonical JSON strings which the caller
//! releases with [`cn_string_free`]. Every fallible entry point returns
//! a [`CnStatus`]; after a failure, [`cn_last_error`] holds a message
//! for the calling thread.
//!
//! The generated header lives in `include/curve_normals.h`.

use curve_normals::io::{canonical_json, census_json, parse_curve, vec3_json};
use curve_normals::{witness, Curve, Error, Tolerances, Vec3};
use serde_json::json;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Outcome of an ABI call. The discriminants match the CLI exit codes:
/// non-generic inputs (perturb and retry) and exhausted searches are
/// distinguished from hard errors.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CnStatus {
    Ok = 0,
    Error = 1,
    NonGeneric = 2,
    SearchFailed = 3,
    BadArgument = 4,
}

/// Opaque curve handle. Create with [`cn_curve_parse_json`], release
/// with [`cn_curve_free`]. A handle is immutable and may be shared
/// across threads.
pub struct CnCurve {
    curve: Curve,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', "?")).unwrap();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

fn status_of(e: &Error) -> CnStatus {
    if e.is_non_generic() {
        CnStatus::NonGeneric
    } else if e.is_search_failure() {
        CnStatus::SearchFailed
    } else {
        CnStatus::Error
    }
}

fn fail(e: &Error) -> CnStatus {
    set_error(&e.to_string());
    status_of(e)
}

fn guard(f: impl FnOnce() -> CnStatus) -> CnStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| {
        set_error("internal panic");
        CnStatus::Error
    })
}

unsafe fn arg_str<'a>(ptr: *const c_char) -> Result<&'a str, CnStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(CnStatus::BadArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        CnStatus::BadArgument
    })
}

unsafe fn arg_curve<'a>(ptr: *const CnCurve) -> Result<&'a Curve, CnStatus> {
    if ptr.is_null() {
        set_error("null curve handle");
        return Err(CnStatus::BadArgument);
    }
    Ok(&(*ptr).curve)
}

unsafe fn emit(out: *mut *mut c_char, text: String) -> CnStatus {
    if out.is_null() {
        set_error("null output pointer");
        return CnStatus::BadArgument;
    }
    match CString::new(text) {
        Ok(s) => {
            *out = s.into_raw();
            CnStatus::Ok
        }
        Err(_) => {
            set_error("result contained an interior NUL");
            CnStatus::Error
        }
    }
}

/// Message describing the most recent failure on the calling thread.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn cn_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parse a curve from its JSON description and store a handle in
/// `out`. The schema matches the CLI curve files: either
/// `{"type": "pl", "vertices": [[x,y,z], ...]}` or
/// `{"type": "fourier", "order": m, "coeffs": {...}}`, optionally with
/// a `"knotted"` flag.
///
/// # Safety
///
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cn_curve_parse_json(
    text: *const c_char,
    out: *mut *mut CnCurve,
) -> CnStatus {
    guard(|| {
        let text = match arg_str(text) {
            Ok(t) => t,
            Err(status) => return status,
        };
        if out.is_null() {
            set_error("null output pointer");
            return CnStatus::BadArgument;
        }
        match parse_curve(text) {
            Ok(curve) => {
                *out = Box::into_raw(Box::new(CnCurve { curve }));
                CnStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Release a curve handle. Passing NULL is a no-op.
///
/// # Safety
///
/// `curve` must come from [`cn_curve_parse_json`] and must not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn cn_curve_free(curve: *mut CnCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Census of normals from the base point `(x, y, z)` as canonical
/// JSON. `grid` overrides the sample grid for smooth root isolation;
/// pass 0 for the default. Polylines ignore `grid`.
///
/// # Safety
///
/// `curve` must be a live handle and `out` a valid pointer. On success
/// the caller owns `*out` and releases it with [`cn_string_free`].
#[no_mangle]
pub unsafe extern "C" fn cn_normals_json(
    curve: *const CnCurve,
    x: f64,
    y: f64,
    z: f64,
    grid: usize,
    out: *mut *mut c_char,
) -> CnStatus {
    guard(|| {
        let curve = match arg_curve(curve) {
            Ok(c) => c,
            Err(status) => return status,
        };
        let tol = Tolerances::default();
        let grid = if grid == 0 { None } else { Some(grid) };
        match curve.normals(Vec3::new(x, y, z), grid, &tol) {
            Ok(census) => emit(out, canonical_json(&census_json(&census))),
            Err(e) => fail(&e),
        }
    })
}

/// Search for a witness point with many normals and return it as
/// canonical JSON (`y`, `n`, `method`, `census`). Polylines run the
/// structural search and ignore `budget` and `seed`; Fourier curves
/// run the seeded ascent within `budget` census evaluations.
///
/// # Safety
///
/// `curve` must be a live handle and `out` a valid pointer. On success
/// the caller owns `*out` and releases it with [`cn_string_free`].
#[no_mangle]
pub unsafe extern "C" fn cn_witness_json(
    curve: *const CnCurve,
    budget: usize,
    seed: u64,
    out: *mut *mut c_char,
) -> CnStatus {
    guard(|| {
        let curve = match arg_curve(curve) {
            Ok(c) => c,
            Err(status) => return status,
        };
        let tol = Tolerances::default();
        let result = match curve {
            Curve::Pl(c) => witness::pl_witness_search(c, &tol),
            Curve::Fourier(c) => witness::smooth_witness_search(c, budget, seed, &tol),
        };
        match result {
            Ok(w) => emit(
                out,
                canonical_json(&json!({
                    "y": vec3_json(w.y),
                    "n": w.n,
                    "method": w.method.tag(),
                    "census": census_json(&w.census),
                })),
            ),
            Err(e) => fail(&e),
        }
    })
}

/// Upper bound on the number of complex critical points of the squared
/// distance function for a generic degree-`(d1, d2)` curve.
///
/// # Safety
///
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cn_ed_degree_bound(d1: u32, d2: u32, out: *mut u64) -> CnStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return CnStatus::BadArgument;
        }
        match witness::ed_degree_bound(d1, d2) {
            Ok(bound) => {
                *out = bound;
                CnStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Release a string returned by this library. Passing NULL is a no-op.
///
/// # Safety
///
/// `text` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cn_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}
