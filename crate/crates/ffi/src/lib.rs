//! C ABI for the parapulse library.
//!
//! Sequences are opaque handles created by `pp_synth_*` or
//! `pp_sequence_from_text` and released with `pp_sequence_free`. Every
//! function returns a [`PpStatus`]; on failure `pp_last_error_message`
//! describes the error for the calling thread. Angles are in radians.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use parapulse::analysis::{avg_gate_fidelity, suppression_order, ErrorAxis, FidelityParams};
use parapulse::cli::{FamilyRequest, TargetSpec};
use parapulse::sequences::io::{format_sequence, parse_sequence};
use parapulse::sequences::{evaluate, stats_with_slowdown, ControlScheme, PulseSequence};
use parapulse::su2::{ErrorParams, Su2};
use parapulse::Error;

/// Result code of every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    NoConvergence = 4,
    Verification = 5,
    Io = 6,
    Panic = 7,
}

/// Opaque sequence handle.
pub struct PpSequence(PulseSequence);

/// `U = w − i(x σx + y σy + z σz)`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpQuaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Quasistatic errors: amplitude ε, detuning δ, Stark ε_s.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpErrorParams {
    pub epsilon: f64,
    pub delta: f64,
    pub epsilon_s: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpStats {
    /// Physical pulse count.
    pub k: usize,
    /// Total global pulse area in units of π.
    pub t: f64,
    /// Duration in units of 1/Ω, Z rotations weighted by the slowdown.
    pub duration: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpAxis {
    Epsilon = 0,
    Delta = 1,
    EpsilonS = 2,
    /// ε = δ.
    Diagonal = 3,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(PpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidArgument(_) | Error::Domain { .. } => PpStatus::InvalidArgument,
            Error::Parse { .. } => PpStatus::Parse,
            Error::NoConvergence { .. } => PpStatus::NoConvergence,
            Error::Verification(_) => PpStatus::Verification,
            Error::Io(_) => PpStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PpStatus::NullPointer, format!("{what} is NULL"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PpStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {msg}"));
            PpStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(PpStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn seq_arg<'a>(p: *const PpSequence) -> Result<&'a PulseSequence, Failure> {
    p.as_ref().map(|s| &s.0).ok_or_else(|| null("sequence"))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

fn scheme_arg(p: *const c_char) -> Result<Option<ControlScheme>, Failure> {
    if p.is_null() {
        return Ok(None);
    }
    Ok(Some(unsafe { str_arg(p, "scheme") }?.parse()?))
}

/// Accepts targets whose norm is 1 within 1e-9.
fn quaternion(q: PpQuaternion) -> Result<Su2, Failure> {
    let norm = (q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z).sqrt();
    if !((norm - 1.0).abs() <= 1e-9) {
        return Err(Failure(PpStatus::InvalidArgument, format!("target is not a unit quaternion (norm {norm})")));
    }
    Ok(Su2::from_vector([q.w, q.x, q.y, q.z]).expect("unit norm"))
}

fn error_params(e: PpErrorParams) -> Result<ErrorParams, Failure> {
    let err = ErrorParams::new(e.epsilon, e.delta, e.epsilon_s);
    if !err.is_finite() {
        return Err(Failure(PpStatus::InvalidArgument, "error parameters must be finite".into()));
    }
    Ok(err)
}

fn to_pp(u: Su2) -> PpQuaternion {
    let [w, x, y, z] = u.components();
    PpQuaternion { w, x, y, z }
}

fn synth(
    family: *const c_char,
    n: u32,
    scheme: *const c_char,
    target: TargetSpec,
    out: *mut *mut PpSequence,
) -> PpStatus {
    guard(|| {
        let out = unsafe { out_arg(out, "out") }?;
        let family = unsafe { str_arg(family, "family") }?;
        let n = (n > 0).then_some(n as usize);
        let seq = FamilyRequest::new(family, n, scheme_arg(scheme)?, Some(target))?.build()?.sequence;
        *out = Box::into_raw(Box::new(PpSequence(seq)));
        Ok(())
    })
}

/// Builds a family instance for the gate given by the scheme's three
/// basic-sequence angles (PC: α β γ, AC: XYX, ZC: ZYZ). `n = 0` selects the
/// family's default order; `scheme` may be NULL for the family's default.
///
/// # Safety
/// `family` (and `scheme` unless NULL) must be NUL-terminated strings; `out`
/// must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pp_synth_gate(
    family: *const c_char,
    n: u32,
    scheme: *const c_char,
    alpha: f64,
    beta: f64,
    gamma: f64,
    out: *mut *mut PpSequence,
) -> PpStatus {
    synth(family, n, scheme, TargetSpec::Angles([alpha, beta, gamma]), out)
}

/// Builds a family instance replacing the single rotation `[θ]_φ` (`Z(θ)`
/// for RZ).
///
/// # Safety
/// As for [`pp_synth_gate`].
#[no_mangle]
pub unsafe extern "C" fn pp_synth_rotation(
    family: *const c_char,
    n: u32,
    scheme: *const c_char,
    theta: f64,
    phi: f64,
    out: *mut *mut PpSequence,
) -> PpStatus {
    synth(family, n, scheme, TargetSpec::Rotation { theta, phi }, out)
}

/// Parses the plain-text sequence format (angles in units of π).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pp_sequence_from_text(text: *const c_char, out: *mut *mut PpSequence) -> PpStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let seq = parse_sequence(str_arg(text, "text")?)?;
        *out = Box::into_raw(Box::new(PpSequence(seq)));
        Ok(())
    })
}

/// Formats a sequence as text; release the string with `pp_string_free`.
///
/// # Safety
/// `seq` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pp_sequence_to_text(seq: *const PpSequence, out: *mut *mut c_char) -> PpStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let text = format_sequence(seq_arg(seq)?);
        *out = CString::new(text).expect("sequence text has no NULs").into_raw();
        Ok(())
    })
}

/// Number of elements (global pulses and Z rotations).
///
/// # Safety
/// `seq` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pp_sequence_len(seq: *const PpSequence, out: *mut usize) -> PpStatus {
    guard(|| {
        *out_arg(out, "out")? = seq_arg(seq)?.len();
        Ok(())
    })
}

/// Unitary implemented under `err`.
///
/// # Safety
/// `seq` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pp_evaluate(seq: *const PpSequence, err: PpErrorParams, out: *mut PpQuaternion) -> PpStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = to_pp(evaluate(seq_arg(seq)?, error_params(err)?));
        Ok(())
    })
}

/// Pulse count, area and duration.
///
/// # Safety
/// `seq` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pp_stats(seq: *const PpSequence, z_slowdown: f64, out: *mut PpStats) -> PpStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        if !(z_slowdown.is_finite() && z_slowdown >= 0.0) {
            return Err(Failure(PpStatus::InvalidArgument, format!("bad z_slowdown {z_slowdown}")));
        }
        let s = stats_with_slowdown(seq_arg(seq)?, z_slowdown);
        *out = PpStats { k: s.k, t: s.t, duration: s.duration };
        Ok(())
    })
}

/// Average gate fidelity against `target` under `err` and depolarization at
/// rate `gamma` over the sequence's duration.
///
/// # Safety
/// `seq` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pp_avg_gate_fidelity(
    seq: *const PpSequence,
    target: PpQuaternion,
    err: PpErrorParams,
    gamma: f64,
    z_slowdown: f64,
    out: *mut f64,
) -> PpStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let fp = FidelityParams::new(gamma)?.with_z_slowdown(z_slowdown);
        *out = avg_gate_fidelity(seq_arg(seq)?, quaternion(target)?, error_params(err)?, fp);
        Ok(())
    })
}

/// Fitted infidelity slope along `axis` (a [`PpAxis`] value) and the
/// certified order, or `-1` when the slope lies outside every order's window.
///
/// # Safety
/// `seq` must be a live handle; `slope` and `order` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pp_suppression_order(
    seq: *const PpSequence,
    target: PpQuaternion,
    axis: u32,
    slope: *mut f64,
    order: *mut i32,
) -> PpStatus {
    guard(|| {
        let slope = out_arg(slope, "slope")?;
        let order = out_arg(order, "order")?;
        let axis = match axis {
            a if a == PpAxis::Epsilon as u32 => ErrorAxis::Epsilon,
            a if a == PpAxis::Delta as u32 => ErrorAxis::Delta,
            a if a == PpAxis::EpsilonS as u32 => ErrorAxis::EpsilonS,
            a if a == PpAxis::Diagonal as u32 => ErrorAxis::Diagonal,
            a => return Err(Failure(PpStatus::InvalidArgument, format!("unknown axis {a}"))),
        };
        let fit = suppression_order(seq_arg(seq)?, quaternion(target)?, axis)?;
        *slope = fit.slope;
        *order = fit.order.map_or(-1, |n| n as i32);
        Ok(())
    })
}

/// Releases a sequence handle; NULL is ignored.
///
/// # Safety
/// `seq` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pp_sequence_free(seq: *mut PpSequence) {
    if !seq.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(seq))));
    }
}

/// Releases a string returned by this library; NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string from `pp_sequence_to_text` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pp_string_free(s: *mut c_char) {
    if !s.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(CString::from_raw(s))));
    }
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
