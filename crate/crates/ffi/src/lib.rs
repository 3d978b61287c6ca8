//! C ABI for the covariance concentration laboratory.
//!
//! The surface follows the usual handle/status-code pattern: constructors
//! return an opaque pointer through an out-parameter plus a status code,
//! every fallible call reports `HtcovStatus`, and the last error message is
//! kept per thread and readable via [`htcov_last_error_message`].
//!
//! The header `include/htcov.h` is generated by cbindgen at build time.

use htcov::coloring;
use htcov::dist::{sample_matrix, DistributionSpec, SampleMatrix};
use htcov::experiments::fit_exponent;
use htcov::matrix::{deviation_report, gram, CovarianceTarget};
use htcov::Error;
use libc::c_char;
use std::cell::RefCell;
use std::ffi::{CStr, CString};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HtcovStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parameter = 3,
    Contract = 4,
    Numeric = 5,
    SearchFailure = 6,
    Json = 7,
    Internal = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> HtcovStatus {
    match err {
        Error::Parameter(_) | Error::InfiniteMoment { .. } | Error::Degenerate(_) | Error::Data(_) => {
            HtcovStatus::Parameter
        }
        Error::Contract(_) => HtcovStatus::Contract,
        Error::NoConvergence { .. } => HtcovStatus::Numeric,
        Error::SearchFailure { .. } => HtcovStatus::SearchFailure,
        Error::Json(_) => HtcovStatus::Json,
        Error::Io(_) => HtcovStatus::Internal,
    }
}

fn fail(err: Error) -> HtcovStatus {
    let status = status_of(&err);
    set_error(&err.to_string());
    status
}

/// Opaque sample-matrix handle.
pub struct HtcovSampleMatrix {
    inner: SampleMatrix,
}

/// Flat deviation report (identity target).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HtcovDeviationReport {
    pub n: usize,
    pub big_n: usize,
    pub seed: u64,
    pub deviation: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub max_norm_sq: f64,
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn htcov_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent error on this thread; empty when none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn htcov_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Build a sample matrix from a JSON distribution spec
/// (`{"family": ..., "params": {...}, "n": ...}`).
///
/// # Safety
/// `spec_json` must be a valid NUL-terminated string and `out` a valid
/// pointer; on success `*out` owns the handle and must be released with
/// [`htcov_sample_matrix_free`].
#[no_mangle]
pub unsafe extern "C" fn htcov_sample_matrix_new(
    spec_json: *const c_char,
    n: usize,
    big_n: usize,
    seed: u64,
    out: *mut *mut HtcovSampleMatrix,
) -> HtcovStatus {
    if spec_json.is_null() || out.is_null() {
        set_error("null pointer argument");
        return HtcovStatus::NullPointer;
    }
    let text = match CStr::from_ptr(spec_json).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("spec is not valid UTF-8");
            return HtcovStatus::InvalidUtf8;
        }
    };
    let spec: DistributionSpec = match serde_json::from_str(text) {
        Ok(s) => s,
        Err(e) => return fail(Error::Json(e)),
    };
    match sample_matrix(&spec, n, big_n, seed) {
        Ok(m) => {
            *out = Box::into_raw(Box::new(HtcovSampleMatrix { inner: m }));
            HtcovStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Release a handle returned by [`htcov_sample_matrix_new`]; NULL is a no-op.
///
/// # Safety
/// `m` must be a pointer previously returned by this library and not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn htcov_sample_matrix_free(m: *mut HtcovSampleMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Matrix dimensions (rows = N, cols = n).
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn htcov_sample_matrix_dims(
    m: *const HtcovSampleMatrix,
    rows: *mut usize,
    cols: *mut usize,
) -> HtcovStatus {
    if m.is_null() || rows.is_null() || cols.is_null() {
        set_error("null pointer argument");
        return HtcovStatus::NullPointer;
    }
    let matrix = &(*m).inner;
    *rows = matrix.sample_count();
    *cols = matrix.dimension();
    HtcovStatus::Ok
}

/// Copy the matrix into `buf` in row-major order; `len` must be exactly
/// rows * cols.
///
/// # Safety
/// `buf` must point to at least `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn htcov_sample_matrix_copy_rows(
    m: *const HtcovSampleMatrix,
    buf: *mut f64,
    len: usize,
) -> HtcovStatus {
    if m.is_null() || buf.is_null() {
        set_error("null pointer argument");
        return HtcovStatus::NullPointer;
    }
    let matrix = &(*m).inner;
    let (rows, cols) = (matrix.sample_count(), matrix.dimension());
    if len != rows * cols {
        set_error("buffer length does not match rows * cols");
        return HtcovStatus::Parameter;
    }
    for i in 0..rows {
        for j in 0..cols {
            *buf.add(i * cols + j) = matrix.rows()[(i, j)];
        }
    }
    HtcovStatus::Ok
}

/// Deviation of the sample covariance from the identity, with extreme
/// singular values and the largest squared row norm.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn htcov_deviation_report(
    m: *const HtcovSampleMatrix,
    out: *mut HtcovDeviationReport,
) -> HtcovStatus {
    if m.is_null() || out.is_null() {
        set_error("null pointer argument");
        return HtcovStatus::NullPointer;
    }
    match deviation_report(&(*m).inner, CovarianceTarget::Identity) {
        Ok(rep) => {
            *out = HtcovDeviationReport {
                n: rep.n,
                big_n: rep.big_n,
                seed: rep.seed,
                deviation: rep.deviation,
                s_min: rep.s_min,
                s_max: rep.s_max,
                max_norm_sq: rep.max_norm_sq,
            };
            HtcovStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Number of classes used by the greedy sample coloring at threshold `h`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn htcov_greedy_color_count(
    m: *const HtcovSampleMatrix,
    h: f64,
    out: *mut usize,
) -> HtcovStatus {
    if m.is_null() || out.is_null() {
        set_error("null pointer argument");
        return HtcovStatus::NullPointer;
    }
    let g = gram(&(*m).inner);
    match coloring::greedy_color(&g, h) {
        Ok(partition) => {
            *out = partition.color_count();
            HtcovStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// The threshold choice (B N)^{1/p} n^{1/2 - 1/p} / ln(n).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn htcov_default_threshold(
    b: f64,
    big_n: usize,
    n: usize,
    p: f64,
    out: *mut f64,
) -> HtcovStatus {
    if out.is_null() {
        set_error("null pointer argument");
        return HtcovStatus::NullPointer;
    }
    match coloring::default_threshold(b, big_n, n, p) {
        Ok(h) => {
            *out = h;
            HtcovStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Chromatic tail bound (B N H^{-p})^m n^{p/2}, raw and clamped to [0, 1].
///
/// # Safety
/// `raw` and `clamped` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn htcov_chromatic_tail_bound(
    b: f64,
    big_n: usize,
    h: f64,
    p: f64,
    n: usize,
    m: usize,
    raw: *mut f64,
    clamped: *mut f64,
) -> HtcovStatus {
    if raw.is_null() || clamped.is_null() {
        set_error("null pointer argument");
        return HtcovStatus::NullPointer;
    }
    match coloring::chromatic_tail_bound(b, big_n, h, p, n, m) {
        Ok(bound) => {
            *raw = bound.raw;
            *clamped = bound.clamped;
            HtcovStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Least-squares slope of log y against log x.
///
/// # Safety
/// `xs` and `ys` must point to `len` readable doubles; the three outputs
/// must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn htcov_fit_exponent(
    xs: *const f64,
    ys: *const f64,
    len: usize,
    alpha: *mut f64,
    intercept: *mut f64,
    r_squared: *mut f64,
) -> HtcovStatus {
    if xs.is_null() || ys.is_null() || alpha.is_null() || intercept.is_null() || r_squared.is_null()
    {
        set_error("null pointer argument");
        return HtcovStatus::NullPointer;
    }
    let points: Vec<(f64, f64)> = (0..len)
        .map(|i| (*xs.add(i), *ys.add(i)))
        .collect();
    match fit_exponent(&points) {
        Ok(fit) => {
            *alpha = fit.alpha;
            *intercept = fit.intercept;
            *r_squared = fit.r_squared;
            HtcovStatus::Ok
        }
        Err(e) => fail(e),
    }
}
