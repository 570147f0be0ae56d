//! C ABI over `entanglyze`.
//!
//! States are opaque `EzState` handles created by `ez_state_from_*` or
//! `ez_project` and released with `ez_state_free`. Every fallible call
//! returns an `EzStatus`; on failure `ez_last_error_message` gives a
//! description that stays valid until the next failing call on the same
//! thread. Axes are passed as three consecutive doubles and need not be
//! normalized. Output pointers must be valid for the documented number of
//! elements; a null pointer yields `EZ_STATUS_NULL_POINTER`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use entanglyze::measurement::{project, Outcome};
use entanglyze::report::{analyze, AxisChoice};
use entanglyze::structure::persistency_upper_bound;
use entanglyze::{
    ed_single, em_matrix, mieb_matrix, optimal_breaking_axis, optimal_pair_axes, total_entanglement, Axis,
    Complex64, Error, PauliFactor, QubitId, StateSpec, StateVector,
};

/// Opaque state handle.
pub struct EzState(StateVector);

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EzStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    Numeric = 5,
    NotMaximallyEntangled = 6,
    ZeroProbability = 7,
    TooLarge = 8,
    Panic = 9,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> EzStatus {
    match e {
        Error::Parse(_) | Error::Json(_) => EzStatus::Parse,
        Error::Io(_) => EzStatus::Io,
        Error::NotMaximallyEntangled { .. } => EzStatus::NotMaximallyEntangled,
        Error::ZeroProbabilityOutcome { .. } | Error::ZeroDenominator => EzStatus::ZeroProbability,
        Error::TooLarge { .. } => EzStatus::TooLarge,
        Error::ImaginaryResidue(_) | Error::NotSymmetric(_) | Error::ZeroNorm => EzStatus::Numeric,
        _ => EzStatus::InvalidArgument,
    }
}

struct Fail(EzStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null() -> Fail {
    Fail(EzStatus::NullPointer, "null pointer argument".into())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> EzStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EzStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic".into());
            EzStatus::Panic
        }
    }
}

unsafe fn state<'a>(s: *const EzState) -> Result<&'a StateVector, Fail> {
    s.as_ref().map(|h| &h.0).ok_or_else(null)
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(null)
}

unsafe fn slice<'a, T>(p: *const T, len: usize) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn axis(p: *const f64) -> Result<Axis, Fail> {
    let v = slice(p, 3)?;
    Ok(Axis::normalized(v[0], v[1], v[2])?)
}

unsafe fn axes(p: *const f64, n: usize) -> Result<Vec<Axis>, Fail> {
    slice(p, 3 * n)?.chunks_exact(3).map(|v| Axis::normalized(v[0], v[1], v[2]).map_err(Fail::from)).collect()
}

unsafe fn c_str<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(EzStatus::Parse, "string is not UTF-8".into()))
}

fn into_handle(s: StateVector) -> *mut EzState {
    Box::into_raw(Box::new(EzState(s)))
}

/// Message for the last failing call on this thread, or null.
#[no_mangle]
pub extern "C" fn ez_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ez_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a state from `2^n_qubits` interleaved `(re, im)` pairs, normalizing.
/// `len` counts doubles.
#[no_mangle]
pub unsafe extern "C" fn ez_state_from_amplitudes(
    n_qubits: usize,
    re_im: *const f64,
    len: usize,
    out_state: *mut *mut EzState,
) -> EzStatus {
    guard(|| {
        let dst = out(out_state)?;
        let v = slice(re_im, len)?;
        if !len.is_multiple_of(2) {
            return Err(Fail(EzStatus::InvalidArgument, "odd number of doubles".into()));
        }
        let amps = v.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
        *dst = into_handle(StateVector::new(n_qubits, amps)?);
        Ok(())
    })
}

/// Builds a state from a textual spec such as `"brs:6"` or `"s4:0,0,1,0"`.
/// `seed` applies to `random:N` specs without an explicit seed.
#[no_mangle]
pub unsafe extern "C" fn ez_state_from_spec(
    spec: *const c_char,
    seed: u64,
    out_state: *mut *mut EzState,
) -> EzStatus {
    guard(|| {
        let dst = out(out_state)?;
        let s = c_str(spec)?.parse::<StateSpec>()?.build(seed)?;
        *dst = into_handle(s);
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ez_state_free(s: *mut EzState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Qubit count, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ez_state_n_qubits(s: *const EzState) -> usize {
    s.as_ref().map_or(0, |h| h.0.n_qubits())
}

/// Copies the amplitudes as interleaved `(re, im)`; `len` must be `2^(n+1)`.
#[no_mangle]
pub unsafe extern "C" fn ez_state_amplitudes(s: *const EzState, out_re_im: *mut f64, len: usize) -> EzStatus {
    guard(|| {
        let st = state(s)?;
        if len != 2 * st.dim() {
            return Err(Fail(
                EzStatus::InvalidArgument,
                format!("buffer holds {len} doubles, need {}", 2 * st.dim()),
            ));
        }
        let dst = slice_mut(out_re_im, len)?;
        for (pair, a) in dst.chunks_exact_mut(2).zip(st.amplitudes()) {
            pair[0] = a.re;
            pair[1] = a.im;
        }
        Ok(())
    })
}

/// Writes `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)` of qubit `q` to `out3`.
#[no_mangle]
pub unsafe extern "C" fn ez_bloch_vector(s: *const EzState, q: usize, out3: *mut f64) -> EzStatus {
    guard(|| {
        let b = state(s)?.bloch_vector(QubitId(q))?;
        slice_mut(out3, 3)?.copy_from_slice(&b);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ez_expectation(
    s: *const EzState,
    q: usize,
    axis3: *const f64,
    out_value: *mut f64,
) -> EzStatus {
    guard(|| {
        let dst = out(out_value)?;
        *dst = state(s)?.expectation(&PauliFactor::new(q, axis(axis3)?))?;
        Ok(())
    })
}

/// `⟨∏ σ⟩` over `k` distinct qubits; `axes` holds `3k` doubles.
#[no_mangle]
pub unsafe extern "C" fn ez_correlator(
    s: *const EzState,
    qubits: *const usize,
    axes3k: *const f64,
    k: usize,
    out_value: *mut f64,
) -> EzStatus {
    guard(|| {
        let dst = out(out_value)?;
        let qs = slice(qubits, k)?;
        let factors: Vec<PauliFactor> =
            qs.iter().zip(axes(axes3k, k)?).map(|(&q, a)| PauliFactor::new(q, a)).collect();
        *dst = state(s)?.correlator(&factors)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ez_ed_single(s: *const EzState, q: usize, out_value: *mut f64) -> EzStatus {
    guard(|| {
        let dst = out(out_value)?;
        *dst = ed_single(state(s)?, QubitId(q))?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ez_total_entanglement(s: *const EzState, out_value: *mut f64) -> EzStatus {
    guard(|| {
        let dst = out(out_value)?;
        *dst = total_entanglement(state(s)?);
        Ok(())
    })
}

/// Row-major `n×n` EM for `n` axes (`3n` doubles).
#[no_mangle]
pub unsafe extern "C" fn ez_em_matrix(s: *const EzState, axes3n: *const f64, out_nn: *mut f64) -> EzStatus {
    guard(|| {
        let st = state(s)?;
        let n = st.n_qubits();
        let em = em_matrix(st, &axes(axes3n, n)?)?;
        let dst = slice_mut(out_nn, n * n)?;
        for (row, src) in dst.chunks_exact_mut(n).zip(&em.g) {
            row.copy_from_slice(src);
        }
        Ok(())
    })
}

/// Row-major 3×3 MIEB matrix. A null `targets` selects every other qubit.
#[no_mangle]
pub unsafe extern "C" fn ez_mieb_matrix(
    s: *const EzState,
    nu: usize,
    targets: *const usize,
    n_targets: usize,
    out9: *mut f64,
) -> EzStatus {
    guard(|| {
        let t: Option<Vec<QubitId>> = if targets.is_null() {
            None
        } else {
            Some(slice(targets, n_targets)?.iter().map(|&q| QubitId(q)).collect())
        };
        let b = mieb_matrix(state(s)?, QubitId(nu), t.as_deref())?;
        slice_mut(out9, 9)?.copy_from_slice(&b.b.concat());
        Ok(())
    })
}

/// Axis maximizing the entanglement broken on all other qubits. Requires a
/// maximally entangled state.
#[no_mangle]
pub unsafe extern "C" fn ez_optimal_breaking_axis(
    s: *const EzState,
    nu: usize,
    out_axis3: *mut f64,
    out_eigenvalue: *mut f64,
) -> EzStatus {
    guard(|| {
        let ev = out(out_eigenvalue)?;
        let b = optimal_breaking_axis(state(s)?, QubitId(nu), None, true)?;
        slice_mut(out_axis3, 3)?.copy_from_slice(&b.axis.to_array());
        *ev = b.eigenvalue;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ez_optimal_pair_axes(
    s: *const EzState,
    mu: usize,
    nu: usize,
    out_v_mu3: *mut f64,
    out_v_nu3: *mut f64,
    out_lambda: *mut f64,
) -> EzStatus {
    guard(|| {
        let l = out(out_lambda)?;
        let p = optimal_pair_axes(state(s)?, QubitId(mu), QubitId(nu))?;
        slice_mut(out_v_mu3, 3)?.copy_from_slice(&p.v_mu.to_array());
        slice_mut(out_v_nu3, 3)?.copy_from_slice(&p.v_nu.to_array());
        *l = p.lambda;
        Ok(())
    })
}

/// Projects qubit `q` onto outcome `+1` or `-1` along the axis and returns a
/// new handle. `out_probability` may be null.
#[no_mangle]
pub unsafe extern "C" fn ez_project(
    s: *const EzState,
    q: usize,
    axis3: *const f64,
    outcome: i32,
    out_state: *mut *mut EzState,
    out_probability: *mut f64,
) -> EzStatus {
    guard(|| {
        let dst = out(out_state)?;
        let (post, rec) = project(state(s)?, QubitId(q), axis(axis3)?, Outcome::from_sign(outcome)?)?;
        if let Some(p) = out_probability.as_mut() {
            *p = rec.probability;
        }
        *dst = into_handle(post);
        Ok(())
    })
}

/// Block count of the quantized EM and the persistency bound (`-1` when the
/// bound does not apply). A null `axes3n` uses the optimal axis set.
#[no_mangle]
pub unsafe extern "C" fn ez_persistency_upper_bound(
    s: *const EzState,
    axes3n: *const f64,
    tol: f64,
    out_n_blocks: *mut usize,
    out_bound: *mut i64,
) -> EzStatus {
    guard(|| {
        let st = state(s)?;
        let nb = out(out_n_blocks)?;
        let bd = out(out_bound)?;
        let given = if axes3n.is_null() { None } else { Some(axes(axes3n, st.n_qubits())?) };
        let pb = persistency_upper_bound(st, given.as_deref(), tol)?;
        *nb = pb.n_blocks;
        *bd = pb.bound.map_or(-1, |b| b as i64);
        Ok(())
    })
}

/// Full analysis report as JSON. Free the string with `ez_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ez_analyze_json(
    spec: *const c_char,
    seed: u64,
    optimal_axes: bool,
    tol: f64,
    out_json: *mut *mut c_char,
) -> EzStatus {
    guard(|| {
        let dst = out(out_json)?;
        let label = c_str(spec)?;
        let s = label.parse::<StateSpec>()?.build(seed)?;
        let choice = if optimal_axes { AxisChoice::Optimal } else { AxisChoice::None };
        let report = analyze(&s, label, &choice, tol)?;
        let text = serde_json::to_string(&report).map_err(Error::from)?;
        *dst = CString::new(text).map_err(|_| Fail(EzStatus::Numeric, "NUL in report".into()))?.into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ez_string_free(p: *mut c_char) {
    if !p.is_null() {
        drop(CString::from_raw(p));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&Error::Parse("x".into())), EzStatus::Parse);
        assert_eq!(status_of(&Error::ZeroNorm), EzStatus::Numeric);
        assert_eq!(status_of(&Error::ZeroDenominator), EzStatus::ZeroProbability);
        assert_eq!(status_of(&Error::TooLarge { n_qubits: 11, max: 10 }), EzStatus::TooLarge);
        assert_eq!(status_of(&Error::QubitOutOfRange { qubit: 3, n_qubits: 2 }), EzStatus::InvalidArgument);
    }

    #[test]
    fn panics_become_status() {
        assert_eq!(guard(|| panic!("boom")), EzStatus::Panic);
        let msg = unsafe { CStr::from_ptr(ez_last_error_message()) };
        assert_eq!(msg.to_str().unwrap(), "internal panic");
    }

    #[test]
    fn interior_nul_is_sanitized() {
        set_error("a\0b".into());
        let msg = unsafe { CStr::from_ptr(ez_last_error_message()) };
        assert_eq!(msg.to_str().unwrap(), "a b");
    }
}
