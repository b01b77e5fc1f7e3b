//! C ABI for equimax.
//!
//! Every fallible function returns an [`EquimaxStatus`]; on failure the
//! message is available from [`equimax_last_error`] on the same thread.
//! Objects cross the boundary as opaque handles created by `*_new`/`*_parse`
//! /`*_run` functions and released with the matching `*_free`. Strings
//! returned to the caller are owned by the caller and must be released with
//! [`equimax_string_free`]. Exact rationals travel as `"p/q"` strings.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use equimax::density::DensityModel;
use equimax::gof::{ks_statistic, permutation_pvalue, run_test, SampleBatch, TestReport, ENGINE_VERSION};
use equimax::numeric::{discrepancy_curve, DiscrepancyCurve};
use equimax::ruiz::{hni, verify_lemma2, verify_ruiz, verify_theorem_identity};
use equimax::series::{exp_density_series, verify_eq8};
use equimax::{Error, ExactRational};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquimaxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Domain = 3,
    Numeric = 4,
    Ingestion = 5,
    InvalidModel = 6,
    Io = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: EquimaxStatus, msg: impl Into<String>) -> EquimaxStatus {
    set_last_error(msg);
    status
}

fn from_error(e: Error) -> EquimaxStatus {
    let status = match e {
        Error::Domain(_) => EquimaxStatus::Domain,
        Error::Numeric { .. } => EquimaxStatus::Numeric,
        Error::Ingestion { .. } => EquimaxStatus::Ingestion,
        Error::Model { .. } => EquimaxStatus::InvalidModel,
        Error::Io(_) => EquimaxStatus::Io,
    };
    fail(status, e.to_string())
}

/// Runs `body`, converting panics into [`EquimaxStatus::Panic`].
fn guard(body: impl FnOnce() -> Result<(), EquimaxStatus>) -> EquimaxStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => EquimaxStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(EquimaxStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, EquimaxStatus> {
    if s.is_null() {
        return Err(fail(EquimaxStatus::NullPointer, format!("{what} is NULL")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(EquimaxStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn read_rational(s: *const c_char, what: &str) -> Result<ExactRational, EquimaxStatus> {
    read_str(s, what)?.parse().map_err(from_error)
}

unsafe fn read_slice<'a>(data: *const f64, len: usize, what: &str) -> Result<&'a [f64], EquimaxStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(fail(EquimaxStatus::NullPointer, format!("{what} is NULL")));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), EquimaxStatus> {
    if out.is_null() {
        return Err(fail(EquimaxStatus::NullPointer, format!("{what} is NULL")));
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

unsafe fn write_string(out: *mut *mut c_char, s: String, what: &str) -> Result<(), EquimaxStatus> {
    write_out(out, into_c_string(s), what)
}

/// Static, NUL-terminated engine version. Do not free.
#[no_mangle]
pub extern "C" fn equimax_version() -> *const c_char {
    static VERSION: std::sync::OnceLock<CString> = std::sync::OnceLock::new();
    VERSION
        .get_or_init(|| CString::new(ENGINE_VERSION).expect("ascii"))
        .as_ptr()
}

/// Copy of the last error message on this thread, or NULL if none.
/// Free with `equimax_string_free`.
#[no_mangle]
pub extern "C" fn equimax_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |m| m.clone().into_raw()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn equimax_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------------------
// exact identities

/// `H_{n,i}(x)` for a rational `x` given as `"p/q"`, written to `*out`.
///
/// # Safety
/// `x` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn equimax_hni(n: u64, i: u64, x: *const c_char, out: *mut *mut c_char) -> EquimaxStatus {
    guard(|| {
        let x = read_rational(x, "x")?;
        write_string(out, hni(n, i, &x).to_string(), "out")
    })
}

/// Checks the `H_{n,i}` closed form for all `n <= n_max` at `len` points.
///
/// # Safety
/// `xs` must point to `len` NUL-terminated strings; `passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn equimax_verify_ruiz(
    n_max: u64,
    xs: *const *const c_char,
    len: usize,
    passed: *mut bool,
) -> EquimaxStatus {
    guard(|| {
        if xs.is_null() && len > 0 {
            return Err(fail(EquimaxStatus::NullPointer, "xs is NULL"));
        }
        let mut points = Vec::with_capacity(len);
        for k in 0..len {
            points.push(read_rational(*xs.add(k), "xs[k]")?);
        }
        let report = verify_ruiz(n_max, &points).map_err(from_error)?;
        write_out(passed, report.passed(), "passed")
    })
}

/// Signed discrepancy of the `(m, k)` power-sum identity, as `"p/q"`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn equimax_power_sum_discrepancy(m: u64, k: u64, out: *mut *mut c_char) -> EquimaxStatus {
    guard(|| write_string(out, verify_lemma2(m, k).to_string(), "out"))
}

/// Signed discrepancy of the key identity at `n >= 3`, as `"p/q"`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn equimax_key_identity_discrepancy(n: u64, out: *mut *mut c_char) -> EquimaxStatus {
    guard(|| {
        let d = verify_theorem_identity(n).map_err(from_error)?;
        write_string(out, d.to_string(), "out")
    })
}

/// Series check of the convolution identity for `Exp(lambda)`;
/// `*mismatch_index` is -1 when every coefficient through `order` agrees.
///
/// # Safety
/// `lambda` must be a NUL-terminated string; `mismatch_index` writable.
#[no_mangle]
pub unsafe extern "C" fn equimax_convolution_check_exponential(
    lambda: *const c_char,
    n: u64,
    order: usize,
    mismatch_index: *mut i64,
) -> EquimaxStatus {
    guard(|| {
        let lambda = read_rational(lambda, "lambda")?;
        let f = exp_density_series(&lambda, order).map_err(from_error)?;
        let found = verify_eq8(&f, n, order).map_err(from_error)?;
        write_out(mismatch_index, found.map_or(-1, |m| m.index as i64), "mismatch_index")
    })
}

// ---------------------------------------------------------------------------
// density models

pub struct EquimaxModel(DensityModel);

/// Parses a model string such as `"weibull:shape=2,scale=1"`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn equimax_model_parse(spec: *const c_char, out: *mut *mut EquimaxModel) -> EquimaxStatus {
    guard(|| {
        let model: DensityModel = read_str(spec, "spec")?.parse().map_err(from_error)?;
        write_out(out, Box::into_raw(Box::new(EquimaxModel(model))), "out")
    })
}

/// # Safety
/// `model` must be NULL or a handle from `equimax_model_parse`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn equimax_model_free(model: *mut EquimaxModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

unsafe fn model_ref<'a>(model: *const EquimaxModel) -> Result<&'a DensityModel, EquimaxStatus> {
    model
        .as_ref()
        .map(|m| &m.0)
        .ok_or_else(|| fail(EquimaxStatus::NullPointer, "model is NULL"))
}

/// Canonical model string. Free with `equimax_string_free`.
///
/// # Safety
/// `model` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn equimax_model_to_string(model: *const EquimaxModel, out: *mut *mut c_char) -> EquimaxStatus {
    guard(|| write_string(out, model_ref(model)?.to_string(), "out"))
}

/// # Safety
/// `model` must be a live handle; `pdf` and `cdf` writable.
#[no_mangle]
pub unsafe extern "C" fn equimax_model_evaluate(
    model: *const EquimaxModel,
    x: f64,
    pdf: *mut f64,
    cdf: *mut f64,
) -> EquimaxStatus {
    guard(|| {
        let (p, c) = model_ref(model)?.evaluate(x).map_err(from_error)?;
        write_out(pdf, p, "pdf")?;
        write_out(cdf, c, "cdf")
    })
}

/// Fills `out[0..count]` with seeded draws.
///
/// # Safety
/// `model` must be a live handle; `out` must have room for `count` doubles.
#[no_mangle]
pub unsafe extern "C" fn equimax_model_sample(
    model: *const EquimaxModel,
    count: usize,
    seed: u64,
    out: *mut f64,
) -> EquimaxStatus {
    guard(|| {
        let draws = model_ref(model)?.sample(count, seed).map_err(from_error)?;
        if out.is_null() {
            return Err(fail(EquimaxStatus::NullPointer, "out is NULL"));
        }
        ptr::copy_nonoverlapping(draws.as_ptr(), out, draws.len());
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// numeric check

pub struct EquimaxCurve(DiscrepancyCurve);

/// # Safety
/// `model` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn equimax_curve_new(
    model: *const EquimaxModel,
    n: u32,
    x_max: f64,
    grid_points: usize,
    tol: f64,
    out: *mut *mut EquimaxCurve,
) -> EquimaxStatus {
    guard(|| {
        let curve = discrepancy_curve(model_ref(model)?, n, x_max, grid_points, tol).map_err(from_error)?;
        write_out(out, Box::into_raw(Box::new(EquimaxCurve(curve))), "out")
    })
}

/// # Safety
/// `curve` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn equimax_curve_free(curve: *mut EquimaxCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Number of grid points; 0 for a NULL handle.
///
/// # Safety
/// `curve` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn equimax_curve_len(curve: *const EquimaxCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.0.grid.len())
}

/// Largest `|lhs - rhs|` on the grid; NaN for a NULL handle.
///
/// # Safety
/// `curve` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn equimax_curve_max_abs_discrepancy(curve: *const EquimaxCurve) -> f64 {
    curve.as_ref().map_or(f64::NAN, |c| c.0.max_abs_discrepancy)
}

/// Copies grid, left and right cdf values into caller buffers of `capacity`
/// doubles each. Any of the three may be NULL to skip it.
///
/// # Safety
/// `curve` must be a live handle; non-NULL buffers must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn equimax_curve_copy(
    curve: *const EquimaxCurve,
    grid: *mut f64,
    lhs_cdf: *mut f64,
    rhs_cdf: *mut f64,
    capacity: usize,
) -> EquimaxStatus {
    guard(|| {
        let c = &curve
            .as_ref()
            .ok_or_else(|| fail(EquimaxStatus::NullPointer, "curve is NULL"))?
            .0;
        if capacity < c.grid.len() {
            return Err(fail(
                EquimaxStatus::BufferTooSmall,
                format!("need {} doubles, got {capacity}", c.grid.len()),
            ));
        }
        for (src, dst) in [(&c.grid, grid), (&c.lhs_cdf, lhs_cdf), (&c.rhs_cdf, rhs_cdf)] {
            if !dst.is_null() {
                ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
            }
        }
        Ok(())
    })
}

/// The curve as CSV (`x,lhs_cdf,rhs_cdf,discrepancy`).
///
/// # Safety
/// `curve` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn equimax_curve_to_csv(curve: *const EquimaxCurve, out: *mut *mut c_char) -> EquimaxStatus {
    guard(|| {
        let c = &curve
            .as_ref()
            .ok_or_else(|| fail(EquimaxStatus::NullPointer, "curve is NULL"))?
            .0;
        let mut buf = Vec::new();
        c.write_csv(&mut buf).map_err(|e| fail(EquimaxStatus::Io, e.to_string()))?;
        write_string(out, String::from_utf8(buf).expect("ascii"), "out")
    })
}

// ---------------------------------------------------------------------------
// goodness of fit

pub struct EquimaxTestReport(TestReport);

/// Two-sample KS distance.
///
/// # Safety
/// `u`/`v` must hold `u_len`/`v_len` doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn equimax_ks_statistic(
    u: *const f64,
    u_len: usize,
    v: *const f64,
    v_len: usize,
    out: *mut f64,
) -> EquimaxStatus {
    guard(|| {
        let d = ks_statistic(read_slice(u, u_len, "u")?, read_slice(v, v_len, "v")?).map_err(from_error)?;
        write_out(out, d, "out")
    })
}

/// Add-one permutation p-value of the KS distance.
///
/// # Safety
/// `u`/`v` must hold `u_len`/`v_len` doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn equimax_permutation_pvalue(
    u: *const f64,
    u_len: usize,
    v: *const f64,
    v_len: usize,
    permutations: usize,
    seed: u64,
    out: *mut f64,
) -> EquimaxStatus {
    guard(|| {
        let p = permutation_pvalue(read_slice(u, u_len, "u")?, read_slice(v, v_len, "v")?, permutations, seed)
            .map_err(from_error)?;
        write_out(out, p, "out")
    })
}

/// Runs the goodness-of-fit test on `len` positive values. The seed drives
/// both the grouping shuffle and the permutations.
///
/// # Safety
/// `values` must hold `len` doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn equimax_gof_run(
    values: *const f64,
    len: usize,
    n: usize,
    permutations: usize,
    alpha: f64,
    seed: u64,
    out: *mut *mut EquimaxTestReport,
) -> EquimaxStatus {
    guard(|| {
        let values = read_slice(values, len, "values")?.to_vec();
        let batch = SampleBatch::new(values, "ffi", seed).map_err(from_error)?;
        let report = run_test(&batch, n, permutations, alpha, seed).map_err(from_error)?;
        write_out(out, Box::into_raw(Box::new(EquimaxTestReport(report))), "out")
    })
}

/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn equimax_test_report_free(report: *mut EquimaxTestReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Flat copy of a test report's numeric fields.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquimaxTestSummary {
    pub n: usize,
    pub m1: usize,
    pub m2: usize,
    pub ks_statistic: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub reject: bool,
    pub permutations: usize,
    pub seed: u64,
}

/// # Safety
/// `report` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn equimax_test_report_summary(
    report: *const EquimaxTestReport,
    out: *mut EquimaxTestSummary,
) -> EquimaxStatus {
    guard(|| {
        let r = &report
            .as_ref()
            .ok_or_else(|| fail(EquimaxStatus::NullPointer, "report is NULL"))?
            .0;
        let summary = EquimaxTestSummary {
            n: r.n,
            m1: r.m1,
            m2: r.m2,
            ks_statistic: r.ks_statistic,
            p_value: r.p_value,
            alpha: r.alpha,
            reject: r.reject,
            permutations: r.permutations,
            seed: r.seed,
        };
        write_out(out, summary, "out")
    })
}

/// The report as JSON, keys in field order. Free with `equimax_string_free`.
///
/// # Safety
/// `report` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn equimax_test_report_to_json(
    report: *const EquimaxTestReport,
    out: *mut *mut c_char,
) -> EquimaxStatus {
    guard(|| {
        let r = &report
            .as_ref()
            .ok_or_else(|| fail(EquimaxStatus::NullPointer, "report is NULL"))?
            .0;
        let json = report_json(r).map_err(|e| fail(EquimaxStatus::Io, e))?;
        write_string(out, json, "out")
    })
}

fn report_json(r: &TestReport) -> Result<String, String> {
    let mut s = serde_json::to_string(r).map_err(|e| e.to_string())?;
    s.push('\n');
    Ok(s)
}
