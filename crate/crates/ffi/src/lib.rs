//! C ABI for the online-sdp library: opaque handles, integer status codes,
//! and a thread-local last-error message. The header is generated by
//! cbindgen into `include/online_sdp.h` at build time.
//!
//! Ownership rules: every `*_new`/`*_execute` output is released with the
//! matching `*_free`; strings returned through `char**` are released with
//! `osdp_text_free`. Buffers are caller-allocated where a length is passed.

use online_sdp::harness::{csv_text, execute_run, run_suite, RunArtifacts, RunConfig};
use online_sdp::reg::logdet_reg;
use online_sdp::{frobenius_inner, norms, psd_floor, sym_eig, Error, SymMatrix};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OsdpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NumericalFailure = 3,
    LengthMismatch = 4,
}

/// Which per-round series of a run to copy out.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OsdpSeries {
    Loss = 0,
    CumLoss = 1,
    ComparatorCum = 2,
    Regret = 3,
    Bound = 4,
}

/// Scalar summary of a finished run. `epsilon` is NaN when the regularizer
/// has no shift parameter.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct OsdpRunSummary {
    pub final_regret: f64,
    pub bound: f64,
    pub ratio: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub strong_convexity: f64,
    pub regularizer_range: f64,
    pub seed: u64,
    pub rounds: u64,
}

/// Opaque symmetric matrix handle.
pub struct OsdpMatrix(SymMatrix);

/// Opaque handle to a finished run.
pub struct OsdpRun(RunArtifacts);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(message: impl Into<String>) {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = message.into());
}

fn status_of(err: &Error) -> OsdpStatus {
    match err {
        Error::InvalidParam(_)
        | Error::UnknownSuite(_)
        | Error::UnknownVariant(_)
        | Error::DimensionMismatch(..)
        | Error::IndexOutOfRange(..)
        | Error::ComparatorSizeCap(..)
        | Error::RatingsParse { .. }
        | Error::Io(_) => OsdpStatus::InvalidArgument,
        _ => OsdpStatus::NumericalFailure,
    }
}

fn fail(err: Error) -> OsdpStatus {
    let code = status_of(&err);
    set_error(err.to_string());
    code
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn osdp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `cap`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must point to `cap` writable bytes (or be NULL to query the length).
#[no_mangle]
pub unsafe extern "C" fn osdp_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let message = slot.borrow();
        let bytes = message.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Releases a string returned through a `char**` output.
///
/// # Safety
/// `text` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn osdp_text_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

/// Builds a symmetric matrix from `order*order` row-major entries
/// (symmetrized as `(A+Aᵀ)/2`).
///
/// # Safety
/// `entries` must point to `order*order` doubles; `out` must be non-NULL.
#[no_mangle]
pub unsafe extern "C" fn osdp_matrix_new(
    order: usize,
    entries: *const f64,
    out: *mut *mut OsdpMatrix,
) -> OsdpStatus {
    if entries.is_null() || out.is_null() {
        return OsdpStatus::NullPointer;
    }
    let data = std::slice::from_raw_parts(entries, order * order).to_vec();
    match SymMatrix::new(order, data) {
        Ok(m) => {
            *out = Box::into_raw(Box::new(OsdpMatrix(m)));
            OsdpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `matrix` must be a live handle from `osdp_matrix_new` (or NULL).
#[no_mangle]
pub unsafe extern "C" fn osdp_matrix_free(matrix: *mut OsdpMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// # Safety
/// `matrix` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn osdp_matrix_order(matrix: *const OsdpMatrix) -> usize {
    matrix.as_ref().map_or(0, |m| m.0.order())
}

/// Eigendecomposition: descending eigenvalues into `values` (length `order`)
/// and, unless NULL, the orthogonal eigenvector matrix into `vectors`
/// (row-major `order*order`, columns are eigenvectors).
///
/// # Safety
/// Buffers must match the matrix order as described.
#[no_mangle]
pub unsafe extern "C" fn osdp_matrix_eig(
    matrix: *const OsdpMatrix,
    values: *mut f64,
    vectors: *mut f64,
) -> OsdpStatus {
    let Some(m) = matrix.as_ref() else { return OsdpStatus::NullPointer };
    if values.is_null() {
        return OsdpStatus::NullPointer;
    }
    let n = m.0.order();
    match sym_eig(&m.0) {
        Ok(eig) => {
            std::ptr::copy_nonoverlapping(eig.values().as_ptr(), values, n);
            if !vectors.is_null() {
                for k in 0..n {
                    let column = eig.vector(k);
                    for i in 0..n {
                        *vectors.add(i * n + k) = column[i];
                    }
                }
            }
            OsdpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Trace, spectral and Frobenius norms (each output optional).
///
/// # Safety
/// `matrix` must be a live handle; non-NULL outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn osdp_matrix_norms(
    matrix: *const OsdpMatrix,
    trace: *mut f64,
    spectral: *mut f64,
    frobenius: *mut f64,
) -> OsdpStatus {
    let Some(m) = matrix.as_ref() else { return OsdpStatus::NullPointer };
    match norms(&m.0) {
        Ok(v) => {
            if !trace.is_null() {
                *trace = v.trace;
            }
            if !spectral.is_null() {
                *spectral = v.spectral;
            }
            if !frobenius.is_null() {
                *frobenius = v.frobenius;
            }
            OsdpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Frobenius inner product of two matrices of equal order.
///
/// # Safety
/// Both handles must be live; `out` must be non-NULL.
#[no_mangle]
pub unsafe extern "C" fn osdp_matrix_inner(
    a: *const OsdpMatrix,
    b: *const OsdpMatrix,
    out: *mut f64,
) -> OsdpStatus {
    let (Some(a), Some(b)) = (a.as_ref(), b.as_ref()) else { return OsdpStatus::NullPointer };
    if out.is_null() {
        return OsdpStatus::NullPointer;
    }
    match frobenius_inner(&a.0, &b.0) {
        Ok(v) => {
            *out = v;
            OsdpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Frobenius-nearest matrix with eigenvalues at least `floor`.
///
/// # Safety
/// `matrix` must be a live handle; `out` must be non-NULL.
#[no_mangle]
pub unsafe extern "C" fn osdp_matrix_psd_floor(
    matrix: *const OsdpMatrix,
    floor: f64,
    out: *mut *mut OsdpMatrix,
) -> OsdpStatus {
    let Some(m) = matrix.as_ref() else { return OsdpStatus::NullPointer };
    if out.is_null() {
        return OsdpStatus::NullPointer;
    }
    match psd_floor(&m.0, floor) {
        Ok(f) => {
            *out = Box::into_raw(Box::new(OsdpMatrix(f)));
            OsdpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Log-determinant regularizer `−ln det(X+εE)`: value, and unless NULL the
/// gradient entries (row-major `order*order`).
///
/// # Safety
/// `matrix` must be a live handle; `value` non-NULL; `gradient` NULL or
/// `order*order` doubles.
#[no_mangle]
pub unsafe extern "C" fn osdp_logdet(
    matrix: *const OsdpMatrix,
    epsilon: f64,
    value: *mut f64,
    gradient: *mut f64,
) -> OsdpStatus {
    let Some(m) = matrix.as_ref() else { return OsdpStatus::NullPointer };
    if value.is_null() {
        return OsdpStatus::NullPointer;
    }
    match logdet_reg(&m.0, epsilon) {
        Ok((v, g)) => {
            *value = v;
            if !gradient.is_null() {
                std::ptr::copy_nonoverlapping(g.data().as_ptr(), gradient, g.data().len());
            }
            OsdpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Executes a run described by a TOML configuration string with the same
/// keys as the CLI flags (`problem = "logdet-main"`, `horizon = 128`, ...).
///
/// # Safety
/// `config_toml` must be a NUL-terminated string; `out` must be non-NULL.
#[no_mangle]
pub unsafe extern "C" fn osdp_run_execute(
    config_toml: *const c_char,
    out: *mut *mut OsdpRun,
) -> OsdpStatus {
    if config_toml.is_null() || out.is_null() {
        return OsdpStatus::NullPointer;
    }
    let Ok(text) = CStr::from_ptr(config_toml).to_str() else {
        set_error("configuration is not valid UTF-8");
        return OsdpStatus::InvalidArgument;
    };
    let config: RunConfig = match toml::from_str(text) {
        Ok(c) => c,
        Err(e) => {
            set_error(format!("configuration: {e}"));
            return OsdpStatus::InvalidArgument;
        }
    };
    let resolved = match config.resolve() {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    match execute_run(&resolved) {
        Ok(artifacts) => {
            *out = Box::into_raw(Box::new(OsdpRun(artifacts)));
            OsdpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `run` must be a live handle from `osdp_run_execute` (or NULL).
#[no_mangle]
pub unsafe extern "C" fn osdp_run_free(run: *mut OsdpRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Number of recorded rounds.
///
/// # Safety
/// `run` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn osdp_run_rounds(run: *const OsdpRun) -> usize {
    run.as_ref().map_or(0, |r| r.0.rows.len())
}

/// Copies one per-round series into `out`, which must hold exactly
/// `osdp_run_rounds` doubles.
///
/// # Safety
/// `run` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn osdp_run_series(
    run: *const OsdpRun,
    series: OsdpSeries,
    out: *mut f64,
    len: usize,
) -> OsdpStatus {
    let Some(r) = run.as_ref() else { return OsdpStatus::NullPointer };
    if out.is_null() {
        return OsdpStatus::NullPointer;
    }
    if len != r.0.rows.len() {
        set_error(format!("series buffer holds {len}, run has {} rounds", r.0.rows.len()));
        return OsdpStatus::LengthMismatch;
    }
    for (k, row) in r.0.rows.iter().enumerate() {
        *out.add(k) = match series {
            OsdpSeries::Loss => row.loss,
            OsdpSeries::CumLoss => row.cum_loss,
            OsdpSeries::ComparatorCum => row.comparator_cum,
            OsdpSeries::Regret => row.regret,
            OsdpSeries::Bound => row.bound,
        };
    }
    OsdpStatus::Ok
}

/// Scalar summary of the run.
///
/// # Safety
/// `run` must be a live handle; `out` must be non-NULL.
#[no_mangle]
pub unsafe extern "C" fn osdp_run_summary(
    run: *const OsdpRun,
    out: *mut OsdpRunSummary,
) -> OsdpStatus {
    let Some(r) = run.as_ref() else { return OsdpStatus::NullPointer };
    if out.is_null() {
        return OsdpStatus::NullPointer;
    }
    let s = &r.0.summary;
    *out = OsdpRunSummary {
        final_regret: s.final_regret,
        bound: s.bound,
        ratio: s.ratio,
        eta: s.eta,
        epsilon: s.epsilon.unwrap_or(f64::NAN),
        strong_convexity: s.s,
        regularizer_range: s.h0,
        seed: s.seed,
        rounds: r.0.rows.len() as u64,
    };
    OsdpStatus::Ok
}

/// The run's per-round table as CSV text (`osdp_text_free` to release).
///
/// # Safety
/// `run` must be a live handle; `out` must be non-NULL.
#[no_mangle]
pub unsafe extern "C" fn osdp_run_csv(run: *const OsdpRun, out: *mut *mut c_char) -> OsdpStatus {
    let Some(r) = run.as_ref() else { return OsdpStatus::NullPointer };
    if out.is_null() {
        return OsdpStatus::NullPointer;
    }
    match CString::new(csv_text(&r.0.rows)) {
        Ok(text) => {
            *out = text.into_raw();
            OsdpStatus::Ok
        }
        Err(_) => {
            set_error("CSV text contained an interior NUL");
            OsdpStatus::NumericalFailure
        }
    }
}

/// Runs a validation suite. `samples = 0` keeps each suite's default count.
/// On success `all_pass` is 1 when every check passed and `report` (unless
/// NULL) receives one line per check.
///
/// # Safety
/// `suite` must be NUL-terminated; `all_pass` non-NULL; `report` NULL or a
/// writable `char**`.
#[no_mangle]
pub unsafe extern "C" fn osdp_validate(
    suite: *const c_char,
    samples: usize,
    seed: u64,
    all_pass: *mut i32,
    report: *mut *mut c_char,
) -> OsdpStatus {
    if suite.is_null() || all_pass.is_null() {
        return OsdpStatus::NullPointer;
    }
    let Ok(name) = CStr::from_ptr(suite).to_str() else {
        set_error("suite name is not valid UTF-8");
        return OsdpStatus::InvalidArgument;
    };
    let counts = if samples == 0 { None } else { Some(samples) };
    match run_suite(name, counts, seed) {
        Ok(reports) => {
            let pass = reports.iter().all(|r| r.pass());
            *all_pass = i32::from(pass);
            if !report.is_null() {
                let text: String =
                    reports.iter().map(|r| format!("{r}\n")).collect::<Vec<_>>().concat();
                match CString::new(text) {
                    Ok(c) => *report = c.into_raw(),
                    Err(_) => *report = std::ptr::null_mut(),
                }
            }
            OsdpStatus::Ok
        }
        Err(e) => fail(e),
    }
}
