//! C ABI over `rahman-core`.
//!
//! Matrices are returned as opaque [`RahmanMatrix`] handles. Rationals cross
//! the boundary as NUL-terminated `"num/den"` strings. Every fallible call
//! returns a [`RahmanStatus`] whose values match the CLI exit codes; the
//! message for the most recent failure on the calling thread is available
//! from [`rahman_last_error`].
//!
//! Strings returned by the library are freed with [`rahman_string_free`],
//! matrices with [`rahman_matrix_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rahman_core::bispectral::solve_bispectral;
use rahman_core::io::matrix_json;
use rahman_core::params::{compatible_alpha2, compatible_beta};
use rahman_core::simulator::{run_chain, ChainState};
use rahman_core::spectral::{verify_eigen_chain, verify_orthogonality};
use rahman_core::{build_kernel, build_poly_matrix, scalar, ChainParams, Error, ExactMatrix, ParamSet, Scalar, State};

/// Status codes, equal to the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RahmanStatus {
    Ok = 0,
    /// A verification did not hold, or an I/O or internal error occurred.
    Failure = 1,
    /// Malformed arguments: null pointers, bad rationals, out-of-range values.
    InvalidInput = 2,
    /// Parameters at which a required quantity is undefined or singular.
    Degenerate = 3,
}

/// Exact rational matrix with simplex-ordered rows and columns.
pub struct RahmanMatrix {
    matrix: ExactMatrix,
    states: Vec<State>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> RahmanStatus {
    match e.exit_code() {
        2 => RahmanStatus::InvalidInput,
        3 => RahmanStatus::Degenerate,
        _ => RahmanStatus::Failure,
    }
}

/// Runs `f`, recording any error or panic as the last error.
fn guard(f: impl FnOnce() -> Result<RahmanStatus, Error>) -> RahmanStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(e)) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            RahmanStatus::Failure
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Error> {
    if s.is_null() {
        return Err(Error::Usage(format!("{what} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Error::Usage(format!("{what} is not UTF-8")))
}

unsafe fn read_rational(s: *const c_char, what: &str) -> Result<Scalar, Error> {
    scalar::parse(read_str(s, what)?)
}

unsafe fn read_params(p: *const *const c_char) -> Result<ParamSet, Error> {
    if p.is_null() {
        return Err(Error::Usage("p is null".into()));
    }
    let v = std::slice::from_raw_parts(p, 4);
    Ok(ParamSet::new(
        read_rational(v[0], "p1")?,
        read_rational(v[1], "p2")?,
        read_rational(v[2], "p3")?,
        read_rational(v[3], "p4")?,
    ))
}

unsafe fn read_chain(
    alpha1: *const c_char,
    alpha2: *const c_char,
    beta1: *const c_char,
    beta2: *const c_char,
) -> Result<ChainParams, Error> {
    Ok(ChainParams::new(
        read_rational(alpha1, "alpha1")?,
        read_rational(alpha2, "alpha2")?,
        read_rational(beta1, "beta1")?,
        read_rational(beta2, "beta2")?,
    ))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Error> {
    if out.is_null() {
        return Err(Error::Usage("output pointer is null".into()));
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

unsafe fn emit_matrix(out: *mut *mut RahmanMatrix, matrix: ExactMatrix, states: &[State]) -> Result<(), Error> {
    let handle = Box::into_raw(Box::new(RahmanMatrix { matrix, states: states.to_vec() }));
    if out.is_null() {
        drop(Box::from_raw(handle));
        return Err(Error::Usage("output pointer is null".into()));
    }
    out.write(handle);
    Ok(())
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rahman_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn rahman_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Transition matrix of the `size`-dice chain.
///
/// # Safety
/// The four rationals must be valid NUL-terminated strings; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn rahman_kernel(
    size: usize,
    alpha1: *const c_char,
    alpha2: *const c_char,
    beta1: *const c_char,
    beta2: *const c_char,
    out: *mut *mut RahmanMatrix,
) -> RahmanStatus {
    guard(|| {
        let cp = read_chain(alpha1, alpha2, beta1, beta2)?;
        let k = build_kernel(size, &cp)?;
        emit_matrix(out, k.matrix, k.space.states())?;
        Ok(RahmanStatus::Ok)
    })
}

/// Values `P_{m,n}(x,y)`; rows are frequency states, columns physical states.
///
/// # Safety
/// `p` must point to four valid NUL-terminated strings; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn rahman_poly_matrix(size: usize, p: *const *const c_char, out: *mut *mut RahmanMatrix) -> RahmanStatus {
    guard(|| {
        let pm = build_poly_matrix(size, &read_params(p)?)?;
        emit_matrix(out, pm.matrix, pm.space.states())?;
        Ok(RahmanStatus::Ok)
    })
}

/// Five-point operator for multiplication by `(p1+p2)x - (p3+p4)y`.
///
/// # Safety
/// As for [`rahman_poly_matrix`].
#[no_mangle]
pub unsafe extern "C" fn rahman_bispectral(size: usize, p: *const *const c_char, out: *mut *mut RahmanMatrix) -> RahmanStatus {
    guard(|| {
        let op = solve_bispectral(size, &read_params(p)?)?;
        emit_matrix(out, op.matrix, op.space.states())?;
        Ok(RahmanStatus::Ok)
    })
}

/// Checks the eigenvalue relation. `alpha2` may be null, in which case it is
/// derived from `alpha1`; `beta` always comes from the stationarity map.
/// Returns `Ok` when every relation holds exactly and `Failure` otherwise.
///
/// # Safety
/// `p` must point to four valid strings, `alpha1` must be valid, `alpha2`
/// valid or null.
#[no_mangle]
pub unsafe extern "C" fn rahman_verify_eigen(
    size: usize,
    p: *const *const c_char,
    alpha1: *const c_char,
    alpha2: *const c_char,
) -> RahmanStatus {
    guard(|| {
        let p = read_params(p)?;
        let a1 = read_rational(alpha1, "alpha1")?;
        let a2 = if alpha2.is_null() { compatible_alpha2(&p, &a1)? } else { read_rational(alpha2, "alpha2")? };
        let (b1, b2) = compatible_beta(&p, &a1, &a2)?;
        let report = verify_eigen_chain(size, &p, &ChainParams::new(a1, a2, b1, b2))?;
        if report.pass {
            Ok(RahmanStatus::Ok)
        } else {
            let bad = report.entries.iter().filter(|e| !e.exact).count();
            set_error(&format!("{bad} frequency states fail the eigenvalue relation"));
            Ok(RahmanStatus::Failure)
        }
    })
}

/// Checks that the Gram matrix under the trinomial weight is diagonal.
///
/// # Safety
/// `p` must point to four valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn rahman_verify_orthogonality(size: usize, p: *const *const c_char) -> RahmanStatus {
    guard(|| {
        let report = verify_orthogonality(size, &read_params(p)?)?;
        if report.off_diagonal_zero {
            Ok(RahmanStatus::Ok)
        } else {
            set_error(&format!("{} nonzero off-diagonal entries", report.nonzero_off_diagonal.len()));
            Ok(RahmanStatus::Failure)
        }
    })
}

/// Runs the chain and returns transition counts as CSV in `*out_csv`.
///
/// # Safety
/// The rationals must be valid strings and `out_csv` writable.
#[no_mangle]
pub unsafe extern "C" fn rahman_simulate(
    size: usize,
    alpha1: *const c_char,
    alpha2: *const c_char,
    beta1: *const c_char,
    beta2: *const c_char,
    start_red: usize,
    start_black: usize,
    steps: u64,
    seed: u64,
    out_csv: *mut *mut c_char,
) -> RahmanStatus {
    guard(|| {
        let cp = read_chain(alpha1, alpha2, beta1, beta2)?;
        let tc = run_chain(size, ChainState::new(start_red, start_black), steps, &cp, seed)?;
        write_out(out_csv, into_c_string(tc.to_csv()))?;
        Ok(RahmanStatus::Ok)
    })
}

/// Number of rows; 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rahman_matrix_rows(m: *const RahmanMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.matrix.rows())
}

/// Number of columns; 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rahman_matrix_cols(m: *const RahmanMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.matrix.cols())
}

unsafe fn entry<'a>(m: *const RahmanMatrix, row: usize, col: usize) -> Result<&'a Scalar, Error> {
    let m = m.as_ref().ok_or_else(|| Error::Usage("matrix handle is null".into()))?;
    if row >= m.matrix.rows() || col >= m.matrix.cols() {
        return Err(Error::Range(format!("entry ({row}, {col}) outside {}x{}", m.matrix.rows(), m.matrix.cols())));
    }
    Ok(&m.matrix[(row, col)])
}

/// Entry as a `"num/den"` string in `*out`.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rahman_matrix_entry(m: *const RahmanMatrix, row: usize, col: usize, out: *mut *mut c_char) -> RahmanStatus {
    guard(|| {
        let q = entry(m, row, col)?;
        write_out(out, into_c_string(scalar::format(q)))?;
        Ok(RahmanStatus::Ok)
    })
}

/// Entry rounded to the nearest double in `*out`.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rahman_matrix_entry_f64(m: *const RahmanMatrix, row: usize, col: usize, out: *mut f64) -> RahmanStatus {
    guard(|| {
        let q = entry(m, row, col)?;
        write_out(out, scalar::to_f64(q))?;
        Ok(RahmanStatus::Ok)
    })
}

/// Canonical JSON of the matrix with its state ordering; null on a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rahman_matrix_to_json(m: *const RahmanMatrix) -> *mut c_char {
    let Some(m) = m.as_ref() else {
        set_error("matrix handle is null");
        return ptr::null_mut();
    };
    let v = matrix_json(&m.matrix, &m.states, &m.states);
    match serde_json::to_string(&v) {
        Ok(s) => into_c_string(s),
        Err(e) => {
            set_error(&e.to_string());
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `m` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rahman_matrix_free(m: *mut RahmanMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rahman_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
