//! Pulse envelopes: the reverse-engineered χ family, sech pulses, square
//! pulses and sampled waveforms, plus the catalog of named designs.
//!
//! An envelope's value is the drive amplitude `B_{y,L}^1(t)`, applied
//! identically to the right dot.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use crate::cphase::{design_cphase, CphaseDesign};
use crate::error::{Error, Result};
use crate::model::{block_resonances, mhz, ns, to_mhz, to_ns, DeviceParams};
use crate::quadrature;

/// Relative tolerance used for pulse areas.
pub const AREA_REL_TOL: f64 = 1e-9;
/// Grid used to verify `|χ'| ≤ |Δ/2|`.
pub const CHI_CHECK_POINTS: usize = 10_000;
/// Grid used for peak-amplitude estimates.
pub const PEAK_SAMPLES: usize = 20_001;

/// Quartic-bump ansatz `χ(t) = A (t/τ)⁴ (1 - t/τ)⁴ + π/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSpec {
    a: f64,
    tau: f64,
    delta: f64,
}

impl ChiSpec {
    /// Validates the spec, including `|χ'| ≤ |Δ/2|` on a dense grid.
    pub fn new(a: f64, tau: f64, delta: f64) -> Result<Self> {
        if !a.is_finite()
            || !(tau > 0.0)
            || !tau.is_finite()
            || !(delta.abs() > 0.0)
            || !delta.is_finite()
        {
            return Err(Error::InvalidParameter(format!(
                "chi spec needs finite A, tau > 0, delta != 0 (got A={a}, tau={tau:e}, delta={delta:e})"
            )));
        }
        let spec = Self { a, tau, delta };
        let bound = delta.abs() / 2.0;
        for k in 0..=CHI_CHECK_POINTS {
            let t = tau * k as f64 / CHI_CHECK_POINTS as f64;
            let (_, d1, _) = spec.eval(t);
            if d1.abs() > bound {
                return Err(Error::ConstraintViolation {
                    t,
                    radicand: bound * bound - d1 * d1,
                });
            }
        }
        Ok(spec)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `(χ, χ', χ'')` without range checks.
    #[inline]
    pub(crate) fn eval(&self, t: f64) -> (f64, f64, f64) {
        let s = t / self.tau;
        let u = 1.0 - s;
        let s2 = s * s;
        let u2 = u * u;
        let p = s2 * s2 * u2 * u2;
        let dp = 4.0 * s2 * s * u2 * u * (1.0 - 2.0 * s);
        let ddp = 4.0 * s2 * u2 * (3.0 * u2 - 8.0 * s * u + 3.0 * s2);
        (
            self.a * p + FRAC_PI_4,
            self.a * dp / self.tau,
            self.a * ddp / (self.tau * self.tau),
        )
    }

    /// Largest `|χ'|` on the verification grid.
    pub fn max_chi_rate(&self) -> f64 {
        (0..=CHI_CHECK_POINTS)
            .map(|k| {
                self.eval(self.tau * k as f64 / CHI_CHECK_POINTS as f64)
                    .1
                    .abs()
            })
            .fold(0.0, f64::max)
    }
}

/// `(χ, χ', χ'')` at `t`; the derivatives are exact.
pub fn chi(t: f64, spec: &ChiSpec) -> Result<(f64, f64, f64)> {
    if !(0.0..=spec.tau).contains(&t) {
        return Err(Error::OutsideWindow {
            t,
            duration: spec.tau,
        });
    }
    Ok(spec.eval(t))
}

/// Two-level drive `Ω(t)` that realizes the χ trajectory with detuning `Δ`.
pub fn omega_from_chi(t: f64, spec: &ChiSpec) -> Result<f64> {
    let (x, d1, d2) = chi(t, spec)?;
    let radicand = spec.delta * spec.delta / 4.0 - d1 * d1;
    if radicand <= 0.0 {
        return Err(Error::ConstraintViolation { t, radicand });
    }
    let root = radicand.sqrt();
    let s2 = (2.0 * x).sin();
    if s2.abs() < 1e-12 {
        // removable when χ' and χ'' vanish with sin 2χ (pulse edges)
        if d1.abs() < 1e-12 * spec.delta.abs() && d2.abs() < 1e-12 * spec.delta * spec.delta {
            return Ok(0.0);
        }
        return Err(Error::Singularity { t });
    }
    Ok(d2 / (2.0 * root) - root * (2.0 * x).cos() / s2)
}

#[inline]
fn omega_unchecked(spec: &ChiSpec, t: f64) -> f64 {
    let (x, d1, d2) = spec.eval(t);
    let root = (spec.delta * spec.delta / 4.0 - d1 * d1).sqrt();
    let (s2, c2) = (2.0 * x).sin_cos();
    d2 / (2.0 * root) - root * c2 / s2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnvelopeKind {
    Square,
    Sech,
    ChiDerived,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Square { amplitude: f64 },
    Sech { sigma: f64, n: f64 },
    Chi(ChiSpec),
    Tabulated { dt: f64, values: Vec<f64> },
}

/// A real drive amplitude `B^1(t)` on `[0, duration]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    shape: Shape,
    duration: f64,
}

impl Envelope {
    pub fn kind(&self) -> EnvelopeKind {
        match self.shape {
            Shape::Square { .. } => EnvelopeKind::Square,
            Shape::Sech { .. } => EnvelopeKind::Sech,
            Shape::Chi(_) => EnvelopeKind::ChiDerived,
            Shape::Tabulated { .. } => EnvelopeKind::Tabulated,
        }
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn chi_spec(&self) -> Option<&ChiSpec> {
        match &self.shape {
            Shape::Chi(spec) => Some(spec),
            _ => None,
        }
    }

    /// `(σ, n)` of a sech envelope.
    pub fn sech_params(&self) -> Option<(f64, f64)> {
        match self.shape {
            Shape::Sech { sigma, n } => Some((sigma, n)),
            _ => None,
        }
    }

    /// Envelope value at `t`. Outside the window the drive is off.
    #[inline]
    pub fn amplitude(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.duration {
            return 0.0;
        }
        match &self.shape {
            Shape::Square { amplitude } => *amplitude,
            Shape::Sech { sigma, n } => 4.0 * sigma / (sigma * t - n * PI / 2.0).cosh(),
            Shape::Chi(spec) => 4.0 * omega_unchecked(spec, t),
            Shape::Tabulated { dt, values } => {
                let x = t / dt;
                let k = (x.floor() as usize).min(values.len() - 2);
                let frac = x - k as f64;
                values[k] * (1.0 - frac) + values[k + 1] * frac
            }
        }
    }

    /// Largest value over a dense uniform grid (odd count, so the midpoint is sampled).
    pub fn peak_amplitude(&self) -> f64 {
        if let Shape::Tabulated { values, .. } = &self.shape {
            return values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        }
        (0..PEAK_SAMPLES)
            .map(|k| self.amplitude(self.duration * k as f64 / (PEAK_SAMPLES - 1) as f64))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `points` uniformly spaced samples `(t, B^1(t))` including both ends.
    pub fn samples(&self, points: usize) -> Vec<(f64, f64)> {
        let points = points.max(2);
        (0..points)
            .map(|k| {
                let t = self.duration * k as f64 / (points - 1) as f64;
                (t, self.amplitude(t))
            })
            .collect()
    }

    /// CSV with columns `t_ns` and the envelope in cyclic MHz; the second
    /// header names `tag`.
    pub fn to_csv(&self, tag: &str, points: usize) -> String {
        let mut out = format!("t_ns,{tag}\n");
        for (t, v) in self.samples(points) {
            out.push_str(&format!("{:.9},{:.9}\n", to_ns(t), to_mhz(v)));
        }
        out
    }
}

/// Envelope `4 Ω(t)` for the χ trajectory of `spec`.
pub fn chi_envelope(spec: ChiSpec) -> Envelope {
    Envelope {
        duration: spec.tau,
        shape: Shape::Chi(spec),
    }
}

/// `B^1(t) = 4σ sech(σt - nπ/2)` with duration `nπ/σ`.
pub fn sech_envelope(sigma: f64, n: f64) -> Result<Envelope> {
    if !(sigma > 0.0) || !(n > 0.0) || !sigma.is_finite() || !n.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "sech needs sigma > 0 and n > 0, got {sigma:e}, {n}"
        )));
    }
    Ok(Envelope {
        duration: n * PI / sigma,
        shape: Shape::Sech { sigma, n },
    })
}

pub fn square_envelope(amplitude: f64, duration: f64) -> Result<Envelope> {
    if !(amplitude >= 0.0) || !(duration > 0.0) || !amplitude.is_finite() || !duration.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "square pulse needs amplitude >= 0 and duration > 0, got {amplitude:e}, {duration:e}"
        )));
    }
    Ok(Envelope {
        duration,
        shape: Shape::Square { amplitude },
    })
}

/// Linearly interpolated waveform sampled every `dt` starting at `t = 0`.
pub fn tabulated_envelope(dt: f64, values: Vec<f64>) -> Result<Envelope> {
    if values.len() < 2 || !(dt > 0.0) {
        return Err(Error::InvalidParameter(
            "tabulated envelope needs >= 2 samples and dt > 0".into(),
        ));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("tabulated envelope sample".into()));
    }
    Ok(Envelope {
        duration: dt * (values.len() - 1) as f64,
        shape: Shape::Tabulated { dt, values },
    })
}

/// `∫₀^τ B^1(t) dt`.
pub fn pulse_area(env: &Envelope) -> Result<f64> {
    match &env.shape {
        Shape::Square { amplitude } => Ok(amplitude * env.duration),
        Shape::Tabulated { dt, values } => Ok(quadrature::simpson_uniform(values, *dt)),
        Shape::Sech { sigma, n } => {
            // split at the peak so both halves are monotone
            let mid = n * PI / (2.0 * sigma);
            Ok(
                quadrature::integrate(|t| env.amplitude(t), 0.0, mid, AREA_REL_TOL)?
                    + quadrature::integrate(|t| env.amplitude(t), mid, env.duration, AREA_REL_TOL)?,
            )
        }
        Shape::Chi(spec) => {
            let spec = *spec;
            quadrature::integrate(
                |t| 4.0 * omega_unchecked(&spec, t),
                0.0,
                env.duration,
                AREA_REL_TOL,
            )
        }
    }
}

/// Finds the ansatz amplitude `A` giving pulse area `target_area` at fixed
/// `tau` by bisection over `[a_lo, a_hi]`.
pub fn solve_chi_amplitude(
    tau: f64,
    delta: f64,
    target_area: f64,
    a_lo: f64,
    a_hi: f64,
) -> Result<f64> {
    let area_minus = |a: f64| -> Result<f64> {
        let spec = ChiSpec::new(a, tau, delta)?;
        Ok(pulse_area(&chi_envelope(spec))? - target_area)
    };
    let (mut lo, mut hi) = (a_lo, a_hi);
    let (mut f_lo, f_hi) = (area_minus(lo)?, area_minus(hi)?);
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::InvalidParameter(format!(
            "area target {target_area} is not bracketed by A in [{a_lo}, {a_hi}]"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = area_minus(mid)?;
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 * mid.abs().max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Named pulse designs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PulseTag {
    A,
    B,
    C,
    SqCnot,
    SqSqrtCnot,
    CzAlpha,
    CphaseBeta,
}

impl PulseTag {
    pub const ALL: [PulseTag; 7] = [
        PulseTag::A,
        PulseTag::B,
        PulseTag::C,
        PulseTag::SqCnot,
        PulseTag::SqSqrtCnot,
        PulseTag::CzAlpha,
        PulseTag::CphaseBeta,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PulseTag::A => "a",
            PulseTag::B => "b",
            PulseTag::C => "c",
            PulseTag::SqCnot => "sq_cnot",
            PulseTag::SqSqrtCnot => "sq_sqrt_cnot",
            PulseTag::CzAlpha => "cz_alpha",
            PulseTag::CphaseBeta => "cphase_beta",
        }
    }
}

impl fmt::Display for PulseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PulseTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PulseTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::UnknownTag(s.to_string()))
    }
}

/// `(A, τ·J)` of the χ-family designs.
pub const CHI_DESIGN_A: (f64, f64) = (139.2947, 5.54498);
pub const CHI_DESIGN_B: (f64, f64) = (61.4617, 15.38016);
pub const CHI_DESIGN_C: (f64, f64) = (75.95269, 5.67638);

/// Square-pulse amplitude (cyclic MHz) and the CNOT / √CNOT durations (ns).
pub const SQUARE_AMPLITUDE_MHZ: f64 = 9.85;
pub const SQUARE_CNOT_NS: f64 = 26.445;
pub const SQUARE_SQRT_CNOT_NS: f64 = 12.8;

#[derive(Debug, Clone, PartialEq)]
pub struct PulseCatalogEntry {
    pub tag: PulseTag,
    pub envelope: Envelope,
    pub carrier: f64,
    pub notes: String,
}

fn chi_entry(
    params: &DeviceParams,
    tag: PulseTag,
    (a, tau_j): (f64, f64),
    notes: &str,
) -> Result<PulseCatalogEntry> {
    let spec = ChiSpec::new(a, tau_j / params.j, params.j)?;
    Ok(PulseCatalogEntry {
        tag,
        envelope: chi_envelope(spec),
        carrier: block_resonances(params).0,
        notes: notes.to_string(),
    })
}

fn sech_entry(tag: PulseTag, design: CphaseDesign, notes: &str) -> PulseCatalogEntry {
    PulseCatalogEntry {
        tag,
        carrier: design.drive.carrier,
        envelope: design.drive.envelope,
        notes: notes.to_string(),
    }
}

/// One named design for the given device.
pub fn catalog_entry(params: &DeviceParams, tag: PulseTag) -> Result<PulseCatalogEntry> {
    let omega1 = block_resonances(params).0;
    let square = |duration_ns: f64, notes: &str| -> Result<PulseCatalogEntry> {
        Ok(PulseCatalogEntry {
            tag,
            envelope: square_envelope(mhz(SQUARE_AMPLITUDE_MHZ), ns(duration_ns))?,
            carrier: omega1,
            notes: notes.to_string(),
        })
    };
    match tag {
        PulseTag::A => chi_entry(params, tag, CHI_DESIGN_A, "χ-derived CNOT, ~45 ns"),
        PulseTag::B => chi_entry(
            params,
            tag,
            CHI_DESIGN_B,
            "χ-derived CNOT, low amplitude, ~124 ns",
        ),
        PulseTag::C => chi_entry(
            params,
            tag,
            CHI_DESIGN_C,
            "χ-derived √CNOT for the two-piece CNOT, ~46 ns",
        ),
        PulseTag::SqCnot => square(SQUARE_CNOT_NS, "square pulse, locally CNOT"),
        PulseTag::SqSqrtCnot => square(SQUARE_SQRT_CNOT_NS, "square pulse, locally √CNOT"),
        PulseTag::CzAlpha => Ok(sech_entry(tag, design_cphase(PI, params)?, "sech CZ")),
        PulseTag::CphaseBeta => Ok(sech_entry(
            tag,
            design_cphase(PI / 2.0, params)?,
            "sech π/2-CPHASE for the two-piece CZ",
        )),
    }
}

/// Every named design, in tag order.
pub fn catalog(params: &DeviceParams) -> Result<Vec<PulseCatalogEntry>> {
    PulseTag::ALL
        .iter()
        .map(|&tag| catalog_entry(params, tag))
        .collect()
}
