//! C ABI over the spinforge library.
//!
//! Parameters live behind the opaque `SfParams` handle. Every fallible call
//! returns an `SfStatus`; on failure `sf_last_error_message` describes the
//! most recent error on the calling thread. Matrices cross the boundary as
//! `SfUnitary4` (row-major, split real and imaginary parts) in the basis
//! `{↑↑, ↓↑, ↑↓, ↓↓}`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use spinforge::analysis::{fidelity, local_invariants, LocalsSource, TargetGate};
use spinforge::cphase::design_cphase;
use spinforge::designs::{DesignTag, GateDesign};
use spinforge::linalg::{c, Mat4};
use spinforge::model::{to_mhz, to_ns, TWO_PI};
use spinforge::noise::{average_infidelity, NoiseRun};
use spinforge::{DeviceParams, Error, Unitary4};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    UnknownTag = 4,
    DomainError = 5,
    NotLocallyEquivalent = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfTarget {
    Cnot = 0,
    Cz = 1,
    SqrtCnot = 2,
    Cphase = 3,
}

/// Opaque device parameters.
pub struct SfParams(DeviceParams);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SfUnitary4 {
    pub re: [f64; 16],
    pub im: [f64; 16],
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SfGateReport {
    pub fidelity: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub gate_time_ns: f64,
    pub peak_amplitude_mhz: f64,
    /// 1 when numerically optimized corrections replaced the printed ones
    pub locals_optimized: c_int,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SfCphaseDesign {
    pub theta: f64,
    pub n: f64,
    pub m: f64,
    pub alpha: f64,
    pub tau_ns: f64,
    pub peak_amplitude_mhz: f64,
    /// angular frequency, rad/s
    pub carrier: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SfNoiseResult {
    pub sigma_delta_khz: f64,
    pub mean_infidelity: f64,
    pub standard_error: f64,
    pub n_samples: usize,
    pub rejected_samples: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(e: &Error) -> SfStatus {
    match e {
        Error::UnknownTag(_) => SfStatus::UnknownTag,
        Error::Parse(_) => SfStatus::ParseError,
        Error::InvalidParameter(_) => SfStatus::InvalidArgument,
        Error::InvariantMismatch { .. } => SfStatus::NotLocallyEquivalent,
        _ => SfStatus::DomainError,
    }
}

/// Runs `f`, mapping errors and panics to a status and recording the message.
fn guard<F>(f: F) -> SfStatus
where
    F: FnOnce() -> Result<(), (SfStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SfStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SfStatus::Panic
        }
    }
}

fn lib(e: Error) -> (SfStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (SfStatus, String) {
    (SfStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (SfStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        (
            SfStatus::InvalidArgument,
            format!("{what} is not valid UTF-8"),
        )
    })
}

unsafe fn params_ref<'a>(p: *const SfParams) -> Result<&'a DeviceParams, (SfStatus, String)> {
    p.as_ref().map(|h| &h.0).ok_or_else(|| null("params"))
}

fn step_from_ps(step_ps: f64) -> Result<f64, (SfStatus, String)> {
    if step_ps > 0.0 && step_ps.is_finite() {
        Ok(step_ps * 1e-12)
    } else {
        Err((
            SfStatus::InvalidArgument,
            format!("step_ps must be positive, got {step_ps}"),
        ))
    }
}

fn to_ffi(u: &Unitary4) -> SfUnitary4 {
    let mut out = SfUnitary4::default();
    for r in 0..4 {
        for col in 0..4 {
            let z = u.matrix()[(r, col)];
            out.re[4 * r + col] = z.re;
            out.im[4 * r + col] = z.im;
        }
    }
    out
}

fn from_ffi(u: &SfUnitary4) -> Mat4 {
    Mat4::from_fn(|r, col| c(u.re[4 * r + col], u.im[4 * r + col]))
}

fn checked_unitary(u: *const SfUnitary4, what: &str) -> Result<Unitary4, (SfStatus, String)> {
    let u = unsafe { u.as_ref() }.ok_or_else(|| null(what))?;
    Unitary4::new(from_ffi(u), 1e-6).map_err(lib)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread ("" after a success).
/// Valid until the next `sf_*` call on the same thread.
#[no_mangle]
pub extern "C" fn sf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Built-in device parameters. Free with `sf_params_free`.
#[no_mangle]
pub extern "C" fn sf_params_default() -> *mut SfParams {
    Box::into_raw(Box::new(SfParams(DeviceParams::default())))
}

/// Parses a JSON parameter document (cyclic MHz) into `*out`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_params_from_json(
    json: *const c_char,
    out: *mut *mut SfParams,
) -> SfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = read_str(json, "json")?;
        let params = DeviceParams::from_json(text).map_err(lib)?;
        *out = Box::into_raw(Box::new(SfParams(params)));
        Ok(())
    })
}

/// Serializes `params` to JSON; release the string with `sf_string_free`.
///
/// # Safety
/// `params` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_params_to_json(
    params: *const SfParams,
    out: *mut *mut c_char,
) -> SfStatus {
    guard(|| {
        let p = params_ref(params)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = CString::new(p.to_json())
            .map_err(|e| (SfStatus::DomainError, e.to_string()))?
            .into_raw();
        Ok(())
    })
}

/// Exchange coupling in cyclic MHz, or NaN for a null handle.
///
/// # Safety
/// `params` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn sf_params_j_mhz(params: *const SfParams) -> f64 {
    params.as_ref().map_or(f64::NAN, |p| to_mhz(p.0.j))
}

/// # Safety
/// `params` must be null or come from this library, and not be used again.
#[no_mangle]
pub unsafe extern "C" fn sf_params_free(params: *mut SfParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn sf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn design_for(params: &DeviceParams, tag: *const c_char) -> Result<GateDesign, (SfStatus, String)> {
    let tag: DesignTag = unsafe { read_str(tag, "tag") }?.parse().map_err(lib)?;
    GateDesign::new(tag, params).map_err(lib)
}

/// Simulates the named design and scores it against its target gate.
///
/// # Safety
/// Pointers must be valid; `tag` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn sf_gate_report(
    params: *const SfParams,
    tag: *const c_char,
    step_ps: f64,
    optimize_locals: c_int,
    out: *mut SfGateReport,
) -> SfStatus {
    guard(|| {
        let p = params_ref(params)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let design = design_for(p, tag)?;
        let (r, _) = design
            .report(p, step_from_ps(step_ps)?, optimize_locals != 0)
            .map_err(lib)?;
        *out = SfGateReport {
            fidelity: r.fidelity,
            g1: r.g1,
            g2: r.g2,
            g3: r.g3,
            gate_time_ns: r.gate_time_ns,
            peak_amplitude_mhz: r.peak_amplitude_mhz,
            locals_optimized: c_int::from(r.locals_source == LocalsSource::Optimized),
        };
        Ok(())
    })
}

/// Interaction-picture propagator of the named design's pulse (no locals).
///
/// # Safety
/// Pointers must be valid; `tag` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn sf_pulse_unitary(
    params: *const SfParams,
    tag: *const c_char,
    step_ps: f64,
    out: *mut SfUnitary4,
) -> SfStatus {
    guard(|| {
        let p = params_ref(params)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let u = design_for(p, tag)?
            .simulate_pulse(p, step_from_ps(step_ps)?)
            .map_err(lib)?;
        *out = to_ffi(&u);
        Ok(())
    })
}

/// Full gate of the named design with its printed single-qubit corrections.
///
/// # Safety
/// Pointers must be valid; `tag` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn sf_gate_unitary(
    params: *const SfParams,
    tag: *const c_char,
    step_ps: f64,
    out: *mut SfUnitary4,
) -> SfStatus {
    guard(|| {
        let p = params_ref(params)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let u = design_for(p, tag)?
            .simulate(p, step_from_ps(step_ps)?)
            .map_err(lib)?;
        *out = to_ffi(&u);
        Ok(())
    })
}

/// Reference gate; `theta` is used only for `SF_TARGET_CPHASE`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sf_target_gate(
    target: SfTarget,
    theta: f64,
    out: *mut SfUnitary4,
) -> SfStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let gate = match target {
            SfTarget::Cnot => TargetGate::Cnot,
            SfTarget::Cz => TargetGate::Cz,
            SfTarget::SqrtCnot => TargetGate::SqrtCnot,
            SfTarget::Cphase => TargetGate::Cphase(theta),
        };
        *out = to_ffi(&gate.matrix());
        Ok(())
    })
}

/// `(G₁, G₂, G₃)` into `out[0..3]`.
///
/// # Safety
/// `u` must be valid and `out` point to three doubles.
#[no_mangle]
pub unsafe extern "C" fn sf_local_invariants(u: *const SfUnitary4, out: *mut f64) -> SfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inv = local_invariants(&checked_unitary(u, "u")?).map_err(lib)?;
        ptr::copy_nonoverlapping([inv.g1, inv.g2, inv.g3].as_ptr(), out, 3);
        Ok(())
    })
}

/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sf_fidelity(
    u: *const SfUnitary4,
    target: *const SfUnitary4,
    out: *mut f64,
) -> SfStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = fidelity(
            &checked_unitary(u, "u")?,
            &checked_unitary(target, "target")?,
        );
        Ok(())
    })
}

/// Standard sech θ-CPHASE design.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sf_design_cphase(
    params: *const SfParams,
    theta: f64,
    out: *mut SfCphaseDesign,
) -> SfStatus {
    guard(|| {
        let p = params_ref(params)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let d = design_cphase(theta, p).map_err(lib)?;
        *out = SfCphaseDesign {
            theta: d.theta,
            n: d.n,
            m: d.m,
            alpha: d.alpha,
            tau_ns: to_ns(d.tau),
            peak_amplitude_mhz: to_mhz(d.peak_amplitude()),
            carrier: d.drive.carrier,
        };
        Ok(())
    })
}

/// Mean infidelity of the named design under quasistatic noise of strength
/// `sigma_delta_khz` (σ_δ/2π).
///
/// # Safety
/// Pointers must be valid; `tag` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn sf_noise_average(
    params: *const SfParams,
    tag: *const c_char,
    sigma_delta_khz: f64,
    n_samples: usize,
    seed: u64,
    step_ps: f64,
    out: *mut SfNoiseResult,
) -> SfStatus {
    guard(|| {
        let p = params_ref(params)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let design = design_for(p, tag)?;
        let run = NoiseRun {
            n_samples,
            seed,
            step: step_from_ps(step_ps)?,
        };
        let r =
            average_infidelity(&design, p, TWO_PI * sigma_delta_khz * 1e3, &run, 0).map_err(lib)?;
        *out = SfNoiseResult {
            sigma_delta_khz: r.sigma_delta_khz(),
            mean_infidelity: r.mean_infidelity,
            standard_error: r.stderr,
            n_samples: r.n_samples,
            rejected_samples: r.rejected_samples,
        };
        Ok(())
    })
}
