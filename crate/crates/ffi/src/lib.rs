//! C ABI over `qdisp`.
//!
//! Every fallible entry point returns a [`QdispStatus`] and writes results
//! through out-pointers. Handles are opaque and must be released with the
//! matching `_free` function. On failure the message is available from
//! [`qdisp_last_error`] on the same thread. Panics never cross the boundary.
//!
//! 2×2 matrices are exchanged as four doubles in row-major order.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use nalgebra::Matrix2;
use qdisp::estimation::{self, AnalyzeOptions, DisplacementModel, EstimationReport, QfiMatrix, UhlmannMatrix};
use qdisp::gaussian::{cm_of_state, CovMat2};
use qdisp::hilbert::{self, Probe, State};
use qdisp::linalg::C64;
use qdisp::purification::purify_cm;
use qdisp::Error;

/// Result of every fallible call. Values 1 to 4 match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdispStatus {
    Ok = 0,
    InternalInconsistency = 1,
    InvalidInput = 2,
    UnphysicalInput = 3,
    Truncation = 4,
    NullPointer = 5,
    Panic = 6,
}

/// Opaque probe state.
pub struct QdispState(Probe);

/// Opaque estimation report.
pub struct QdispReport(EstimationReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Fail {
    Core(Error),
    Null,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn status_of(e: &Error) -> QdispStatus {
    match e.exit_code() {
        2 => QdispStatus::InvalidInput,
        3 => QdispStatus::UnphysicalInput,
        4 => QdispStatus::Truncation,
        _ => QdispStatus::InternalInconsistency,
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QdispStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QdispStatus::Ok,
        Ok(Err(Fail::Core(e))) => {
            set_last_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null)) => {
            set_last_error("null pointer argument");
            QdispStatus::NullPointer
        }
        Err(_) => {
            set_last_error("panic inside qdisp");
            QdispStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null)
}

unsafe fn input<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null)
}

unsafe fn slice<'a>(p: *const f64, len: usize) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(Fail::Null);
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn input4<'a>(p: *const f64) -> Result<&'a [f64; 4], Fail> {
    input(p.cast::<[f64; 4]>())
}

unsafe fn out4<'a>(p: *mut f64) -> Result<&'a mut [f64; 4], Fail> {
    out(p.cast::<[f64; 4]>())
}

fn write_matrix(m: &Matrix2<f64>, dst: &mut [f64; 4]) {
    *dst = [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]];
}

fn read_matrix(src: &[f64; 4]) -> Matrix2<f64> {
    Matrix2::new(src[0], src[1], src[2], src[3])
}

unsafe fn emit_state(dst: *mut *mut QdispState, build: impl FnOnce() -> qdisp::Result<Probe>) -> QdispStatus {
    guard(|| {
        let dst = out(dst)?;
        *dst = Box::into_raw(Box::new(QdispState(build()?)));
        Ok(())
    })
}

/// Fock state `|n⟩` on `dim` levels.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn qdisp_state_fock(n: usize, dim: usize, out: *mut *mut QdispState) -> QdispStatus {
    emit_state(out, || Ok(hilbert::fock(n, dim)?.into()))
}

/// Coherent state with amplitude `re + i·im`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn qdisp_state_coherent(re: f64, im: f64, dim: usize, out: *mut *mut QdispState) -> QdispStatus {
    emit_state(out, || Ok(hilbert::coherent(C64::new(re, im), dim)?.into()))
}

/// Squeezed vacuum; positive `r` squeezes `x`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn qdisp_state_squeezed_vacuum(r: f64, dim: usize, out: *mut *mut QdispState) -> QdispStatus {
    emit_state(out, || Ok(hilbert::squeezed_vacuum(r, dim)?.into()))
}

/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn qdisp_state_thermal(nbar: f64, dim: usize, out: *mut *mut QdispState) -> QdispStatus {
    emit_state(out, || Ok(hilbert::thermal(nbar, dim)?.into()))
}

/// Diagonal state with Fock populations `probs[0..len]`.
///
/// # Safety
/// `probs` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qdisp_state_fock_diagonal(
    probs: *const f64,
    len: usize,
    dim: usize,
    out: *mut *mut QdispState,
) -> QdispStatus {
    guard(|| {
        let probs = slice(probs, len)?;
        let dst = self::out(out)?;
        *dst = Box::into_raw(Box::new(QdispState(hilbert::fock_diagonal(probs, dim)?.into())));
        Ok(())
    })
}

/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn qdisp_state_photon_added_thermal(
    lambda: f64,
    dim: usize,
    out: *mut *mut QdispState,
) -> QdispStatus {
    emit_state(out, || Ok(hilbert::photon_added_thermal(lambda, dim)?.into()))
}

/// Balanced mixture of the vacua squeezed by `r` and `-r`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn qdisp_state_squeezed_mixture(r: f64, dim: usize, out: *mut *mut QdispState) -> QdispStatus {
    emit_state(out, || Ok(hilbert::squeezed_mixture(r, dim)?.into()))
}

/// Pure state whose covariance matrix is `sigma`. `n_fock = 0` picks the
/// default seed level.
///
/// # Safety
/// `sigma` must point to four doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qdisp_state_purify(
    sigma: *const f64,
    dim: usize,
    n_fock: usize,
    out: *mut *mut QdispState,
) -> QdispStatus {
    guard(|| {
        let sigma = CovMat2::from_slice(input4(sigma)?)?;
        let dst = self::out(out)?;
        let n = (n_fock > 0).then_some(n_fock);
        let (psi, _) = purify_cm(&sigma, dim, n)?;
        *dst = Box::into_raw(Box::new(QdispState(psi.into())));
        Ok(())
    })
}

/// # Safety
/// `state` must come from a `qdisp_state_*` constructor and not be freed
/// twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qdisp_state_free(state: *mut QdispState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qdisp_state_dim(state: *const QdispState, out: *mut usize) -> QdispStatus {
    guard(|| {
        *self::out(out)? = input(state)?.0.dim();
        Ok(())
    })
}

/// Covariance matrix of the state, after the truncation gate.
///
/// # Safety
/// `state` must be a live handle; `out` must point to four doubles.
#[no_mangle]
pub unsafe extern "C" fn qdisp_state_covariance(state: *const QdispState, out: *mut f64) -> QdispStatus {
    guard(|| {
        let (_, sigma) = cm_of_state(&input(state)?.0)?;
        write_matrix(sigma.matrix(), out4(out)?);
        Ok(())
    })
}

/// Runs the full estimation analysis for joint `x`/`p` displacements.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qdisp_analyze(
    state: *const QdispState,
    strict: bool,
    out: *mut *mut QdispReport,
) -> QdispStatus {
    guard(|| {
        let probe = input(state)?.0.clone();
        let dst = self::out(out)?;
        let opts = AnalyzeOptions {
            strict,
            ..Default::default()
        };
        let rep = estimation::analyze(&DisplacementModel::new(probe), &opts)?;
        *dst = Box::into_raw(Box::new(QdispReport(rep)));
        Ok(())
    })
}

/// # Safety
/// `report` must come from [`qdisp_analyze`] and not be freed twice. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn qdisp_report_free(report: *mut QdispReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` must be a live handle; `out` must point to four doubles.
#[no_mangle]
pub unsafe extern "C" fn qdisp_report_qfi(report: *const QdispReport, out: *mut f64) -> QdispStatus {
    guard(|| {
        write_matrix(input(report)?.0.qfi.matrix(), out4(out)?);
        Ok(())
    })
}

/// # Safety
/// `report` must be a live handle; `out` must point to four doubles.
#[no_mangle]
pub unsafe extern "C" fn qdisp_report_uhlmann(report: *const QdispReport, out: *mut f64) -> QdispStatus {
    guard(|| {
        write_matrix(input(report)?.0.uhlmann.matrix(), out4(out)?);
        Ok(())
    })
}

/// Incompatibility parameter `R ∈ [0, 1]`.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qdisp_report_r(report: *const QdispReport, out: *mut f64) -> QdispStatus {
    guard(|| {
        *self::out(out)? = input(report)?.0.r.get();
        Ok(())
    })
}

/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qdisp_report_det_q(report: *const QdispReport, out: *mut f64) -> QdispStatus {
    guard(|| {
        *self::out(out)? = input(report)?.0.det_q;
        Ok(())
    })
}

/// Serializes the report as JSON. Release the string with
/// [`qdisp_string_free`].
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qdisp_report_to_json(report: *const QdispReport, out: *mut *mut c_char) -> QdispStatus {
    guard(|| {
        let text = serde_json::to_string(&input(report)?.0)
            .map_err(|e| Error::InternalInconsistency(format!("report serialization: {e}")))?;
        let c = CString::new(text).map_err(|e| Error::InternalInconsistency(e.to_string()))?;
        *self::out(out)? = c.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qdisp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Closed-form QFI diagonal entry for a Fock-diagonal state.
///
/// # Safety
/// `probs` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qdisp_qfi_fock_diagonal(probs: *const f64, len: usize, out: *mut f64) -> QdispStatus {
    guard(|| {
        let probs = slice(probs, len)?;
        *self::out(out)? = estimation::qfi_fock_diagonal(probs)?;
        Ok(())
    })
}

/// `R` from a QFI matrix and an Uhlmann curvature matrix.
///
/// # Safety
/// `q` and `d` must point to four doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qdisp_r_parameter(q: *const f64, d: *const f64, out: *mut f64) -> QdispStatus {
    guard(|| {
        // caller-supplied matrices: a failed invariant is bad input, not an internal fault
        let rejected = |e: Error| Error::InvalidInput(e.to_string());
        let q = QfiMatrix::new(read_matrix(input4(q)?)).map_err(rejected)?;
        let d = UhlmannMatrix::new(read_matrix(input4(d)?)).map_err(rejected)?;
        *self::out(out)? = estimation::r_parameter(&q, &d)?.get();
        Ok(())
    })
}

/// Message of the most recent failure on this thread, or an empty string.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qdisp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qdisp_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping_mirrors_exit_codes() {
        assert_eq!(
            status_of(&Error::InvalidInput(String::new())),
            QdispStatus::InvalidInput
        );
        assert_eq!(
            status_of(&Error::DegenerateInput(String::new())),
            QdispStatus::InvalidInput
        );
        assert_eq!(
            status_of(&Error::UnphysicalInput(String::new())),
            QdispStatus::UnphysicalInput
        );
        assert_eq!(
            status_of(&Error::InternalInconsistency(String::new())),
            QdispStatus::InternalInconsistency
        );
    }

    #[test]
    fn panics_are_caught() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, QdispStatus::Panic);
        let msg = unsafe { CStr::from_ptr(qdisp_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "panic inside qdisp");
    }

    #[test]
    fn nul_bytes_in_messages_are_replaced() {
        set_last_error("a\0b");
        let msg = unsafe { CStr::from_ptr(qdisp_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "a b");
    }
}
