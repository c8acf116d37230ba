//! Named gate designs: a pulse, its single-qubit corrections and, for the
//! two-piece designs, the mid-sequence Paulis.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::analysis::{
    appendix_constants, apply_locals, compose_two_piece, fidelity, find_local_corrections,
    local_invariants, optimize_two_piece, AppendixTag, CorrectionOptions, GateReport,
    LocalInvariants, LocalSet, LocalsSource, Pauli, TargetGate, TwoPieceSequence,
};
use crate::envelopes::{catalog_entry, square_envelope, PulseTag};
use crate::error::{Error, Result};
use crate::model::{
    block_resonances, to_mhz, to_ns, DeviceParams, DriveSpec, InteractionHamiltonian,
};
use crate::propagator::{evolve, evolve_checkpoints, simulate_drive, Unitary4};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DesignTag {
    A,
    B,
    C,
    SqCnot,
    SqTwoPiece,
    CzAlpha,
    CzTwoPiece,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assembly {
    Single,
    TwoPiece { mid_right: Pauli, mid_left: Pauli },
}

impl DesignTag {
    pub const ALL: [DesignTag; 7] = [
        DesignTag::A,
        DesignTag::B,
        DesignTag::C,
        DesignTag::SqCnot,
        DesignTag::SqTwoPiece,
        DesignTag::CzAlpha,
        DesignTag::CzTwoPiece,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            DesignTag::A => "a",
            DesignTag::B => "b",
            DesignTag::C => "c",
            DesignTag::SqCnot => "sq_cnot",
            DesignTag::SqTwoPiece => "sq_two_piece",
            DesignTag::CzAlpha => "cz_alpha",
            DesignTag::CzTwoPiece => "cz_two_piece",
        }
    }

    pub fn pulse(&self) -> PulseTag {
        match self {
            DesignTag::A => PulseTag::A,
            DesignTag::B => PulseTag::B,
            DesignTag::C => PulseTag::C,
            DesignTag::SqCnot => PulseTag::SqCnot,
            DesignTag::SqTwoPiece => PulseTag::SqSqrtCnot,
            DesignTag::CzAlpha => PulseTag::CzAlpha,
            DesignTag::CzTwoPiece => PulseTag::CphaseBeta,
        }
    }

    pub fn appendix(&self) -> AppendixTag {
        match self {
            DesignTag::A => AppendixTag::A,
            DesignTag::B => AppendixTag::B,
            DesignTag::C => AppendixTag::C,
            DesignTag::SqCnot => AppendixTag::Square1,
            DesignTag::SqTwoPiece => AppendixTag::Square2,
            DesignTag::CzAlpha => AppendixTag::Alpha,
            DesignTag::CzTwoPiece => AppendixTag::Beta,
        }
    }

    pub fn target(&self) -> TargetGate {
        match self {
            DesignTag::CzAlpha | DesignTag::CzTwoPiece => TargetGate::Cz,
            _ => TargetGate::Cnot,
        }
    }

    pub fn assembly(&self) -> Assembly {
        match self {
            DesignTag::C | DesignTag::CzTwoPiece => Assembly::TwoPiece {
                mid_right: Pauli::X,
                mid_left: Pauli::Y,
            },
            DesignTag::SqTwoPiece => Assembly::TwoPiece {
                mid_right: Pauli::X,
                mid_left: Pauli::X,
            },
            _ => Assembly::Single,
        }
    }
}

impl fmt::Display for DesignTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DesignTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sq_sqrt_cnot" => return Ok(DesignTag::SqTwoPiece),
            "cphase_beta" => return Ok(DesignTag::CzTwoPiece),
            _ => {}
        }
        DesignTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::UnknownTag(s.to_string()))
    }
}

/// A design bound to a nominal device: the drive is fixed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GateDesign {
    pub tag: DesignTag,
    pub drive: DriveSpec,
    pub locals: LocalSet,
}

impl GateDesign {
    /// Drive from `nominal`, printed locals.
    pub fn new(tag: DesignTag, nominal: &DeviceParams) -> Result<Self> {
        let entry = catalog_entry(nominal, tag.pulse())?;
        Ok(Self {
            tag,
            drive: DriveSpec::for_device(nominal, entry.carrier, entry.envelope),
            locals: appendix_constants(tag.appendix()),
        })
    }

    pub fn with_locals(mut self, locals: LocalSet) -> Self {
        self.locals = locals;
        self
    }

    pub fn target(&self) -> Unitary4 {
        self.tag.target().matrix()
    }

    /// Pulse duration, doubled for two-piece designs (single-qubit gate
    /// times excluded).
    pub fn gate_time(&self) -> f64 {
        match self.tag.assembly() {
            Assembly::Single => self.drive.duration(),
            Assembly::TwoPiece { .. } => 2.0 * self.drive.duration(),
        }
    }

    /// `U_int(τ)` of the pulse on `params`.
    pub fn simulate_pulse(&self, params: &DeviceParams, step: f64) -> Result<Unitary4> {
        simulate_drive(params, &self.drive, step)
    }

    /// Full gate built from one pulse propagator.
    pub fn assemble(&self, u: &Unitary4) -> Unitary4 {
        let l = &self.locals;
        match self.tag.assembly() {
            Assembly::Single => apply_locals(&l.k1, u, &l.k2),
            Assembly::TwoPiece {
                mid_right,
                mid_left,
            } => {
                let (kappa1, kappa2) = l.kappa.unwrap_or_default();
                compose_two_piece(&TwoPieceSequence {
                    pre: l.k2,
                    u1: *u,
                    kappa1,
                    mid_right,
                    mid_left,
                    kappa2,
                    u2: *u,
                    post: l.k1,
                })
            }
        }
    }

    pub fn simulate(&self, params: &DeviceParams, step: f64) -> Result<Unitary4> {
        Ok(self.assemble(&self.simulate_pulse(params, step)?))
    }

    pub fn infidelity_of(&self, u_pulse: &Unitary4) -> f64 {
        1.0 - fidelity(&self.assemble(u_pulse), &self.target())
    }

    /// Replaces the locals by numerically optimized ones for `u_pulse`,
    /// seeded with the current set.
    pub fn optimize_locals(
        &self,
        u_pulse: &Unitary4,
        opts: &CorrectionOptions,
    ) -> Result<LocalSet> {
        let target = self.target();
        match self.tag.assembly() {
            Assembly::Single => {
                let mut opts = opts.clone();
                opts.guesses.push((self.locals.k1, self.locals.k2));
                let corr = find_local_corrections(u_pulse, &target, &opts)?;
                Ok(LocalSet {
                    k1: corr.k1,
                    k2: corr.k2,
                    kappa: None,
                })
            }
            Assembly::TwoPiece {
                mid_right,
                mid_left,
            } => {
                let (set, _) = optimize_two_piece(
                    u_pulse,
                    (mid_right, mid_left),
                    &target,
                    &self.locals,
                    opts,
                )?;
                Ok(set)
            }
        }
    }

    /// Simulates on `params` and scores against the target.
    ///
    /// With `optimize` the locals are re-derived and kept only if they beat
    /// the printed ones.
    pub fn report(
        &self,
        params: &DeviceParams,
        step: f64,
        optimize: bool,
    ) -> Result<(GateReport, LocalSet)> {
        let u = self.simulate_pulse(params, step)?;
        let mut locals = self.locals;
        let mut source = LocalsSource::Appendix;
        if optimize {
            let candidate = self.optimize_locals(&u, &CorrectionOptions::default())?;
            let trial = self.clone().with_locals(candidate);
            if trial.infidelity_of(&u) < self.infidelity_of(&u) {
                locals = candidate;
                source = LocalsSource::Optimized;
            }
        }
        let design = self.clone().with_locals(locals);
        let gate = design.assemble(&u);
        let inv = local_invariants(&gate)?;
        let report = GateReport {
            tag: self.tag.to_string(),
            fidelity: fidelity(&gate, &self.target()),
            g1: inv.g1,
            g2: inv.g2,
            g3: inv.g3,
            gate_time_ns: to_ns(self.gate_time()),
            peak_amplitude_mhz: to_mhz(self.drive.envelope.peak_amplitude()),
            locals_source: source,
        };
        Ok((report, locals))
    }
}

/// Default time resolution of [`invariant_scan`].
pub const SCAN_DT: f64 = 0.05e-9;
/// Invariant distance below which a scan minimum counts as a crossing.
pub const CROSSING_TOL: f64 = 0.02;
/// Minima of the same target closer than this are one crossing.
pub const CROSSING_MERGE: f64 = 0.2e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub t: f64,
    pub invariants: LocalInvariants,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Crossing {
    pub target: String,
    pub t: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantScan {
    pub rows: Vec<ScanRow>,
    pub crossings: Vec<Crossing>,
}

/// Invariants of the cumulative propagator of a constant-amplitude drive at
/// `ω₁`, sampled every `dt` up to `t_max`.
///
/// Local minima of the distance to the CNOT and √CNOT invariants that fall
/// below [`CROSSING_TOL`] are refined by golden-section search between the
/// neighbouring samples; of several minima within [`CROSSING_MERGE`] only the
/// closest to the target is kept.
pub fn invariant_scan(
    params: &DeviceParams,
    amplitude: f64,
    t_max: f64,
    dt: f64,
    step: f64,
) -> Result<InvariantScan> {
    if !(dt > 0.0) || !(t_max >= dt) {
        return Err(Error::InvalidParameter(
            "invariant scan needs dt > 0 and t_max >= dt".into(),
        ));
    }
    let drive = DriveSpec::for_device(
        params,
        block_resonances(params).0,
        square_envelope(amplitude, t_max)?,
    );
    let ham = InteractionHamiltonian::new(params, &drive);
    let n = (t_max / dt).floor() as usize;
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * dt).collect();
    let mut props = vec![Unitary4::identity()];
    props.extend(evolve_checkpoints(|t| ham.at(t), 0.0, &times[1..], step)?);
    let rows: Vec<ScanRow> = times
        .iter()
        .zip(&props)
        .map(|(&t, u)| {
            Ok(ScanRow {
                t,
                invariants: local_invariants(u)?,
            })
        })
        .collect::<Result<_>>()?;

    let mut crossings = Vec::new();
    for target in [TargetGate::Cnot, TargetGate::SqrtCnot] {
        let goal = local_invariants(&target.matrix())?;
        let d: Vec<f64> = rows.iter().map(|r| r.invariants.distance(&goal)).collect();
        for k in 1..d.len().saturating_sub(1) {
            if d[k] < CROSSING_TOL && d[k] <= d[k - 1] && d[k] < d[k + 1] {
                let at = |t: f64| -> Result<f64> {
                    let u = if t > times[k - 1] {
                        evolve(|s| ham.at(s), times[k - 1], t, step)? * props[k - 1]
                    } else {
                        props[k - 1]
                    };
                    Ok(local_invariants(&u)?.distance(&goal))
                };
                let (t, distance) = golden_min(at, times[k - 1], times[k + 1], 1e-4 * dt)?;
                let name = target.name();
                match crossings
                    .iter_mut()
                    .find(|c: &&mut Crossing| c.target == name && (c.t - t).abs() < CROSSING_MERGE)
                {
                    Some(c) if c.distance > distance => {
                        *c = Crossing {
                            target: name,
                            t,
                            distance,
                        }
                    }
                    Some(_) => {}
                    None => crossings.push(Crossing {
                        target: name,
                        t,
                        distance,
                    }),
                }
            }
        }
    }
    crossings.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok(InvariantScan { rows, crossings })
}

fn golden_min<F: Fn(f64) -> Result<f64>>(
    f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while b - a > tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 < f2 { (x1, f1) } else { (x2, f2) })
}
