//! θ-CPHASE design with sech pulses.
//!
//! A sech pulse `Ω(t) = σ sech(σt - nπ/2)` drives both blocks of the rotating
//! frame Hamiltonian; with the carrier detuned by `Δ₁ = αJ` from `ω₁` the two
//! blocks see detunings `αJ` and `(α + 1)J` and return to themselves with
//! different phases. The difference is the controlled phase.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use crate::analysis::{find_local_corrections, CorrectionOptions, TargetGate};
use crate::envelopes::sech_envelope;
use crate::error::{Error, Result};
use crate::model::{block_resonances, DeviceParams, DriveSpec};
use crate::propagator::simulate_drive;

/// Fraction of the window edge `m_high` used for designs; the α solutions
/// diverge at the edge itself.
pub const EDGE_FACTOR: f64 = 0.9999;
/// Sech order used by the standard designs.
pub const DEFAULT_N: f64 = 3.0;
const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// cotangent branch
    One,
    /// tangent branch
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Branch {
    pub family: Family,
    pub plus: bool,
}

impl Branch {
    pub const PLUS_1: Branch = Branch {
        family: Family::One,
        plus: true,
    };
    pub const MINUS_1: Branch = Branch {
        family: Family::One,
        plus: false,
    };
    pub const PLUS_2: Branch = Branch {
        family: Family::Two,
        plus: true,
    };
    pub const MINUS_2: Branch = Branch {
        family: Family::Two,
        plus: false,
    };
    pub const ALL: [Branch; 4] = [Self::PLUS_1, Self::MINUS_1, Self::PLUS_2, Self::MINUS_2];
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fam = match self.family {
            Family::One => 1,
            Family::Two => 2,
        };
        write!(f, "({fam},{})", if self.plus { '+' } else { '-' })
    }
}

/// Controlled phase `θ` produced at `m = σ/J`, `α = Δ₁/J` and sech order `n`.
///
/// The value is not reduced modulo 2π.
pub fn theta_from_alpha(m: f64, alpha: f64, n: f64) -> Result<f64> {
    if alpha == 0.0 || alpha == -1.0 {
        return Err(Error::InvalidParameter(format!(
            "alpha = {alpha} is a pole of the phase formula"
        )));
    }
    if !(m > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "m must be positive, got {m}"
        )));
    }
    Ok(2.0 * (-2.0 * (m / alpha).atan() + 2.0 * (m / (alpha + 1.0)).atan() + n * PI / (2.0 * m)))
}

/// Same relation for arbitrary block detunings and drive width.
pub fn general_two_block_phase(sigma: f64, delta1: f64, delta2: f64, n: f64) -> Result<f64> {
    if delta1 == 0.0 || delta2 == 0.0 {
        return Err(Error::InvalidParameter(
            "block detunings must be nonzero".into(),
        ));
    }
    if !(sigma > 0.0) || !(n > 0.0) {
        return Err(Error::InvalidParameter(
            "sigma and n must be positive".into(),
        ));
    }
    let tau = n * PI / sigma;
    Ok(2.0
        * (-2.0 * (sigma / delta1).atan() + 2.0 * (sigma / delta2).atan()
            - (delta1 - delta2) * tau / 2.0))
}

fn quarter_angle(m: f64, n: f64, theta: f64) -> f64 {
    (n * PI / m - theta) / 4.0
}

/// Radicand of the α solutions of `family`.
pub fn discriminant(family: Family, m: f64, n: f64, theta: f64) -> f64 {
    let x = quarter_angle(m, n, theta);
    match family {
        Family::One => 1.0 - 4.0 * m * m + 4.0 * m / x.tan(),
        Family::Two => 1.0 - 4.0 * m * m - 4.0 * m * x.tan(),
    }
}

/// The four α solutions; `None` where the radicand is negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaSolutions {
    pub plus1: Option<f64>,
    pub minus1: Option<f64>,
    pub plus2: Option<f64>,
    pub minus2: Option<f64>,
}

impl AlphaSolutions {
    pub fn get(&self, branch: Branch) -> Option<f64> {
        match (branch.family, branch.plus) {
            (Family::One, true) => self.plus1,
            (Family::One, false) => self.minus1,
            (Family::Two, true) => self.plus2,
            (Family::Two, false) => self.minus2,
        }
    }
}

pub fn alpha_solutions(m: f64, n: f64, theta: f64) -> Result<AlphaSolutions> {
    if !(m > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "m must be positive, got {m}"
        )));
    }
    let roots = |family| {
        let d = discriminant(family, m, n, theta);
        if d >= 0.0 && d.is_finite() {
            let s = d.sqrt();
            (Some(0.5 * (-1.0 + s)), Some(0.5 * (-1.0 - s)))
        } else {
            (None, None)
        }
    };
    let (plus1, minus1) = roots(Family::One);
    let (plus2, minus2) = roots(Family::Two);
    Ok(AlphaSolutions {
        plus1,
        minus1,
        plus2,
        minus2,
    })
}

/// Upper edge of window `r` for `family`.
pub fn window_upper(n: f64, theta: f64, r: u32, family: Family) -> f64 {
    let r = r as f64;
    match family {
        Family::One => n * PI / (4.0 * PI * r + theta),
        Family::Two => n * PI / (2.0 * PI + 4.0 * PI * r + theta),
    }
}

/// `(m_low, m_high)` of window `r`: real α solutions of `family` exist for
/// `m_low <= m < m_high`.
///
/// `m_low` is the discriminant root just below `m_high`. In terms of
/// `x = (nπ/m - θ)/4` the discriminant runs from `+∞` at the pole that sets
/// `m_high` to `-∞` at the next pole, so the root is bracketed between the two
/// poles and found by bisection in `x`.
pub fn validity_window(n: f64, theta: f64, r: u32, family: Family) -> Result<(f64, f64)> {
    if r == 0 || !(n > 0.0) {
        return Err(Error::InvalidParameter(
            "window index r >= 1 and n > 0 required".into(),
        ));
    }
    let m_high = window_upper(n, theta, r, family);
    let x_pole = quarter_angle(m_high, n, theta);
    let m_of = |x: f64| n * PI / (4.0 * x + theta);
    let d_of = |x: f64| discriminant(family, m_of(x), n, theta);
    let eps = 1e-9;
    let (mut lo, mut hi) = (x_pole + eps, x_pole + PI - eps);
    if !(d_of(lo) > 0.0 && d_of(hi) < 0.0) || m_of(hi) <= 0.0 {
        return Err(Error::EmptyWindow(format!(
            "no discriminant root below m_high = {m_high} (r = {r})"
        )));
    }
    while m_of(lo) - m_of(hi) > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if d_of(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((m_of(0.5 * (lo + hi)), m_high))
}

/// A complete sech θ-CPHASE design.
#[derive(Debug, Clone, PartialEq)]
pub struct CphaseDesign {
    pub theta: f64,
    pub n: f64,
    pub m: f64,
    pub alpha: f64,
    pub branch: Branch,
    pub r: u32,
    pub drive: DriveSpec,
    pub tau: f64,
}

impl CphaseDesign {
    pub fn sigma(&self) -> f64 {
        self.drive.envelope.sech_params().expect("sech design").0
    }

    pub fn peak_amplitude(&self) -> f64 {
        4.0 * self.sigma()
    }
}

/// Options for [`design_cphase_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignOptions {
    pub n: f64,
    pub r: u32,
    pub branch: Branch,
    pub edge_factor: f64,
}

impl Default for DesignOptions {
    fn default() -> Self {
        Self {
            n: DEFAULT_N,
            r: 1,
            branch: Branch::PLUS_2,
            edge_factor: EDGE_FACTOR,
        }
    }
}

/// Standard design: `n = 3`, `m = 0.9999·nπ/(6π + θ)`, branch `(2,+)`.
pub fn design_cphase(theta: f64, params: &DeviceParams) -> Result<CphaseDesign> {
    design_cphase_with(theta, params, DesignOptions::default())
}

pub fn design_cphase_with(
    theta: f64,
    params: &DeviceParams,
    opts: DesignOptions,
) -> Result<CphaseDesign> {
    if !(theta > 0.0 && theta <= PI) {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in (0, π], got {theta}"
        )));
    }
    let m = opts.edge_factor * window_upper(opts.n, theta, opts.r, opts.branch.family);
    let alpha = alpha_solutions(m, opts.n, theta)?
        .get(opts.branch)
        .ok_or_else(|| {
            Error::EmptyWindow(format!(
                "branch {} has no real solution at m = {m}",
                opts.branch
            ))
        })?;
    let sigma = m * params.j;
    let envelope = sech_envelope(sigma, opts.n)?;
    let tau = envelope.duration();
    let carrier = block_resonances(params).0 + alpha * params.j;
    Ok(CphaseDesign {
        theta,
        n: opts.n,
        m,
        alpha,
        branch: opts.branch,
        r: opts.r,
        drive: DriveSpec::for_device(params, carrier, envelope),
        tau,
    })
}

/// One point of the gate-time / amplitude trade-off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffPoint {
    pub r: u32,
    pub tau: f64,
    pub peak_amplitude: f64,
    pub fidelity: f64,
}

/// Designs, simulates and scores the branch-(2,+) design in each window `r`.
///
/// Locals are found numerically against θ-CPHASE (CZ for `θ = π`). Windows with
/// no real solution are skipped. Output is sorted by gate time.
pub fn gate_time_amplitude_sweep(
    theta: f64,
    params: &DeviceParams,
    r_values: &[u32],
    edge_factor: f64,
    step: f64,
) -> Result<Vec<TradeoffPoint>> {
    let target = if theta == PI {
        TargetGate::Cz
    } else {
        TargetGate::Cphase(theta)
    };
    let points: Vec<Result<Option<TradeoffPoint>>> = r_values
        .par_iter()
        .map(|&r| {
            let opts = DesignOptions {
                r,
                edge_factor,
                ..DesignOptions::default()
            };
            let design = match design_cphase_with(theta, params, opts) {
                Ok(d) => d,
                Err(Error::EmptyWindow(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let u = simulate_drive(params, &design.drive, step)?;
            let corr = find_local_corrections(&u, &target.matrix(), &CorrectionOptions::default())?;
            Ok(Some(TradeoffPoint {
                r,
                tau: design.tau,
                peak_amplitude: design.peak_amplitude(),
                fidelity: corr.fidelity,
            }))
        })
        .collect();
    let mut out = Vec::new();
    for p in points {
        if let Some(p) = p? {
            out.push(p);
        }
    }
    out.sort_by(|a, b| a.tau.partial_cmp(&b.tau).unwrap());
    Ok(out)
}
