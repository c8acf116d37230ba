//! Gate scoring: fidelity, Makhlin invariants, local corrections and the
//! printed single-qubit constants of the named designs.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, dagger, det4, kron, max_norm, pauli_x, pauli_y, pauli_z, su2_from_rotation_vector, trace,
    Mat2, Mat4, C64, I,
};
use crate::propagator::Unitary4;
use crate::simplex;

/// Unitarity tolerance for invariant evaluation.
pub const INVARIANT_UNITARITY_TOL: f64 = 1e-6;
/// Largest invariant distance at which a local-correction search is attempted.
pub const LOCAL_EQUIVALENCE_THRESHOLD: f64 = 0.05;
/// Largest off-diagonal entry accepted by [`cphase_angle`].
pub const DIAGONAL_THRESHOLD: f64 = 0.05;

/// `F = [Tr(U†U) + |Tr(U₀†U)|²] / 20`.
pub fn fidelity(u: &Unitary4, target: &Unitary4) -> f64 {
    fidelity_raw(u.matrix(), target.matrix())
}

pub(crate) fn fidelity_raw(u: &Mat4, target: &Mat4) -> f64 {
    let n = 4.0;
    let uu = trace(&(u.adjoint() * u)).re;
    let overlap = trace(&(target.adjoint() * u)).norm_sqr();
    (uu + overlap) / (n * (n + 1.0))
}

fn magic_basis() -> Mat4 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (o, z) = (c(s, 0.0), c(0.0, 0.0));
    let i = I * s;
    Mat4::from_row_slice(&[o, z, z, i, z, i, o, z, z, i, -o, z, o, z, z, -i])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalInvariants {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
}

impl LocalInvariants {
    /// Largest componentwise difference.
    pub fn distance(&self, other: &LocalInvariants) -> f64 {
        (self.g1 - other.g1)
            .abs()
            .max((self.g2 - other.g2).abs())
            .max((self.g3 - other.g3).abs())
    }
}

/// `(tr²M / 16 det U, (tr²M - tr M²) / 4 det U)` before taking real parts.
pub(crate) fn invariant_ratios(u: &Mat4) -> (C64, C64) {
    let q = magic_basis();
    let ub = dagger(&q) * u * q;
    let m = ub.transpose() * ub;
    let det = det4(u);
    let tr = trace(&m);
    let tr2 = trace(&(m * m));
    (tr * tr / (det * 16.0), (tr * tr - tr2) / (det * 4.0))
}

pub fn local_invariants(u: &Unitary4) -> Result<LocalInvariants> {
    let residual = u.unitarity_residual();
    if residual > INVARIANT_UNITARITY_TOL {
        return Err(Error::NonUnitary(residual));
    }
    let (g12, g3) = invariant_ratios(u.matrix());
    Ok(LocalInvariants {
        g1: g12.re,
        g2: g12.im,
        g3: g3.re,
    })
}

/// A right ⊗ left pair of single-qubit rotations `exp[i(aσx + bσy + cσz)]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LocalGatePair {
    pub k_right: [f64; 3],
    pub k_left: [f64; 3],
}

impl LocalGatePair {
    pub const IDENTITY: LocalGatePair = LocalGatePair {
        k_right: [0.0; 3],
        k_left: [0.0; 3],
    };

    pub fn new(k_right: [f64; 3], k_left: [f64; 3]) -> Self {
        Self { k_right, k_left }
    }

    pub fn matrix(&self) -> Mat4 {
        kron(
            &su2_from_rotation_vector(self.k_right),
            &su2_from_rotation_vector(self.k_left),
        )
    }

    pub fn unitary(&self) -> Unitary4 {
        Unitary4::new_unchecked(self.matrix())
    }

    fn from_slice(p: &[f64]) -> Self {
        Self {
            k_right: [p[0], p[1], p[2]],
            k_left: [p[3], p[4], p[5]],
        }
    }

    fn to_array(self) -> [f64; 6] {
        let (r, l) = (self.k_right, self.k_left);
        [r[0], r[1], r[2], l[0], l[1], l[2]]
    }
}

/// Designs with printed single-qubit constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AppendixTag {
    A,
    B,
    C,
    Square1,
    Square2,
    Alpha,
    Beta,
}

impl FromStr for AppendixTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "a" => AppendixTag::A,
            "b" => AppendixTag::B,
            "c" => AppendixTag::C,
            "1" => AppendixTag::Square1,
            "2" => AppendixTag::Square2,
            "alpha" => AppendixTag::Alpha,
            "beta" => AppendixTag::Beta,
            _ => return Err(Error::UnknownTag(s.to_string())),
        })
    }
}

impl fmt::Display for AppendixTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AppendixTag::A => "a",
            AppendixTag::B => "b",
            AppendixTag::C => "c",
            AppendixTag::Square1 => "1",
            AppendixTag::Square2 => "2",
            AppendixTag::Alpha => "alpha",
            AppendixTag::Beta => "beta",
        })
    }
}

/// Outer pair `K₁` (applied last), `K₂` (applied first) and, for two-piece
/// designs, the inner pairs `κ₁` (after the first gate) and `κ₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalSet {
    pub k1: LocalGatePair,
    pub k2: LocalGatePair,
    pub kappa: Option<(LocalGatePair, LocalGatePair)>,
}

const fn pair(k_right: [f64; 3], k_left: [f64; 3]) -> LocalGatePair {
    LocalGatePair { k_right, k_left }
}

pub fn appendix_constants(tag: AppendixTag) -> LocalSet {
    match tag {
        AppendixTag::A => LocalSet {
            k1: pair(
                [0.00564, -0.006156, 0.507546],
                [-0.107076, 0.091219, -0.663155],
            ),
            k2: pair(
                [0.005831, 0.006493, -0.320524],
                [0.104122, -0.008626, 0.034753],
            ),
            kappa: None,
        },
        AppendixTag::B => LocalSet {
            k1: pair(
                [0.000429, -0.001655, -0.836667],
                [-0.101941, -0.204093, 1.37345],
            ),
            k2: pair(
                [0.00087, 0.001517, 1.018818],
                [0.153317, 0.090985, -0.816242],
            ),
            kappa: None,
        },
        AppendixTag::C => LocalSet {
            k1: pair(
                [0.003253, -0.000834, -1.120708],
                [0.356721, -0.003073, -0.400727],
            ),
            k2: pair(
                [0.04293, 1.57321, -0.000016],
                [-0.174612, 0.106183, -1.42782],
            ),
            kappa: Some((
                pair(
                    [0.746971, 1.379465, 0.002712],
                    [-0.248607, -0.622127, -0.313053],
                ),
                pair(
                    [0.208987, -1.553846, 0.000769],
                    [0.328546, 0.577004, -0.23246],
                ),
            )),
        },
        AppendixTag::Square1 => LocalSet {
            k1: pair(
                [0.031741, -0.024265, 2.143595],
                [-0.157713, -0.835226, 0.22501],
            ),
            k2: pair(
                [-0.010813, -0.011452, -0.818712],
                [0.402313, 0.941847, 0.138859],
            ),
            kappa: None,
        },
        AppendixTag::Square2 => LocalSet {
            k1: pair([1.23768, 0.97176, -0.02182], [-0.0331, -0.88781, -0.06691]),
            k2: pair([-0.00418, -0.01482, -0.3255], [0.64823, -0.68884, -0.49805]),
            kappa: Some((
                pair(
                    [-0.003159, 0.013948, 0.233523],
                    [-0.007219, -0.106195, 0.204111],
                ),
                pair(
                    [0.001186, -0.015079, 0.027787],
                    [0.060973, -0.124889, -1.244681],
                ),
            )),
        },
        AppendixTag::Alpha => LocalSet {
            k1: pair(
                [-0.036888, 1.571355, 0.00069],
                [0.000045, -0.000142, 0.34968],
            ),
            k2: pair(
                [-0.626514, 1.440206, -0.002372],
                [0.000262, 0.000279, -0.344756],
            ),
            kappa: None,
        },
        AppendixTag::Beta => LocalSet {
            k1: pair(
                [0.001121, -0.00114, 0.529903],
                [1.567642, -0.09954, -0.000507],
            ),
            k2: pair(
                [-0.222578, 1.555129, -0.002324],
                [0.000321, -0.000072, -0.692129],
            ),
            kappa: Some((
                pair(
                    [0.852858, 1.319655, 0.002282],
                    [0.000107, 0.000308, 0.259482],
                ),
                pair(
                    [-0.697808, 1.406964, -0.002295],
                    [0.000197, 0.000242, 0.416163],
                ),
            )),
        },
    }
}

/// `(K₁) · u · (K₂)`.
pub fn apply_locals(k1: &LocalGatePair, u: &Unitary4, k2: &LocalGatePair) -> Unitary4 {
    Unitary4::new_unchecked(k1.matrix() * u.matrix() * k2.matrix())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(&self) -> Mat2 {
        match self {
            Pauli::I => Mat2::identity(),
            Pauli::X => pauli_x(),
            Pauli::Y => pauli_y(),
            Pauli::Z => pauli_z(),
        }
    }
}

/// `post · u2 · κ₂ · (σ_R ⊗ σ_L) · κ₁ · u1 · pre`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPieceSequence {
    pub pre: LocalGatePair,
    pub u1: Unitary4,
    pub kappa1: LocalGatePair,
    pub mid_right: Pauli,
    pub mid_left: Pauli,
    pub kappa2: LocalGatePair,
    pub u2: Unitary4,
    pub post: LocalGatePair,
}

pub fn compose_two_piece(seq: &TwoPieceSequence) -> Unitary4 {
    let mid = kron(&seq.mid_right.matrix(), &seq.mid_left.matrix());
    Unitary4::new_unchecked(
        seq.post.matrix()
            * seq.u2.matrix()
            * seq.kappa2.matrix()
            * mid
            * seq.kappa1.matrix()
            * seq.u1.matrix()
            * seq.pre.matrix(),
    )
}

/// Reference gates in the `{↑↑, ↓↑, ↑↓, ↓↓}` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetGate {
    Cnot,
    Cz,
    SqrtCnot,
    Cphase(f64),
}

impl TargetGate {
    pub fn matrix(&self) -> Unitary4 {
        let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
        let m = match *self {
            TargetGate::Cnot => {
                Mat4::from_row_slice(&[z, o, z, z, o, z, z, z, z, z, o, z, z, z, z, o])
            }
            TargetGate::Cz => Mat4::from_diagonal(&[o, -o, o, o].into()),
            TargetGate::SqrtCnot => {
                let (p, q) = (c(0.5, 0.5), c(0.5, -0.5));
                Mat4::from_row_slice(&[p, q, z, z, q, p, z, z, z, z, o, z, z, z, z, o])
            }
            TargetGate::Cphase(theta) => {
                Mat4::from_diagonal(&[o, C64::from_polar(1.0, theta), o, o].into())
            }
        };
        Unitary4::new_unchecked(m)
    }

    pub fn name(&self) -> String {
        match self {
            TargetGate::Cnot => "CNOT".into(),
            TargetGate::Cz => "CZ".into(),
            TargetGate::SqrtCnot => "sqrt-CNOT".into(),
            TargetGate::Cphase(theta) => format!("CPHASE({theta})"),
        }
    }
}

pub fn target_gates(theta: f64) -> [TargetGate; 4] {
    [
        TargetGate::Cnot,
        TargetGate::Cz,
        TargetGate::SqrtCnot,
        TargetGate::Cphase(theta),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionOptions {
    pub starts: usize,
    pub seed: u64,
    /// Extra starting points `(K₁, K₂)`, tried before the random ones.
    pub guesses: Vec<(LocalGatePair, LocalGatePair)>,
    pub ftol: f64,
    pub max_evals: usize,
}

impl Default for CorrectionOptions {
    fn default() -> Self {
        Self {
            starts: 24,
            seed: 0x6b31_6b32,
            guesses: Vec::new(),
            ftol: 1e-10,
            max_evals: 60_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCorrection {
    pub k1: LocalGatePair,
    pub k2: LocalGatePair,
    pub fidelity: f64,
}

/// Searches for `K₁, K₂` maximizing `fidelity(K₁ u K₂, target)`.
///
/// Refuses when the invariants of `u` and `target` differ by more than
/// [`LOCAL_EQUIVALENCE_THRESHOLD`].
pub fn find_local_corrections(
    u: &Unitary4,
    target: &Unitary4,
    opts: &CorrectionOptions,
) -> Result<LocalCorrection> {
    let distance = local_invariants(u)?.distance(&local_invariants(target)?);
    if distance > LOCAL_EQUIVALENCE_THRESHOLD {
        return Err(Error::InvariantMismatch { distance });
    }
    let (um, tm) = (*u.matrix(), *target.matrix());
    let objective = move |p: &[f64]| {
        let k1 = LocalGatePair::from_slice(&p[..6]).matrix();
        let k2 = LocalGatePair::from_slice(&p[6..]).matrix();
        1.0 - fidelity_raw(&(k1 * um * k2), &tm)
    };
    let mut starts: Vec<Vec<f64>> = opts
        .guesses
        .iter()
        .map(|(a, b)| a.to_array().into_iter().chain(b.to_array()).collect())
        .collect();
    starts.extend(random_starts(opts.seed, opts.starts, 12));
    let best = best_of(&objective, &starts, opts)?;
    Ok(LocalCorrection {
        k1: LocalGatePair::from_slice(&best[..6]),
        k2: LocalGatePair::from_slice(&best[6..]),
        fidelity: 1.0 - objective(&best),
    })
}

/// Optimizes all four pairs of a two-piece assembly, starting from `seed_set`
/// and random perturbations of it.
pub fn optimize_two_piece(
    u: &Unitary4,
    mid: (Pauli, Pauli),
    target: &Unitary4,
    seed_set: &LocalSet,
    opts: &CorrectionOptions,
) -> Result<(LocalSet, f64)> {
    let (kap1, kap2) = seed_set
        .kappa
        .unwrap_or((LocalGatePair::IDENTITY, LocalGatePair::IDENTITY));
    let assemble = |p: &[f64]| TwoPieceSequence {
        pre: LocalGatePair::from_slice(&p[6..12]),
        u1: *u,
        kappa1: LocalGatePair::from_slice(&p[12..18]),
        mid_right: mid.0,
        mid_left: mid.1,
        kappa2: LocalGatePair::from_slice(&p[18..24]),
        u2: *u,
        post: LocalGatePair::from_slice(&p[..6]),
    };
    let tm = *target.matrix();
    let objective = |p: &[f64]| 1.0 - fidelity_raw(compose_two_piece(&assemble(p)).matrix(), &tm);
    let x0: Vec<f64> = [seed_set.k1, seed_set.k2, kap1, kap2]
        .iter()
        .flat_map(|p| p.to_array())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts = vec![x0.clone()];
    for _ in 0..opts.starts {
        starts.push(
            x0.iter()
                .map(|v| v + rng.random_range(-0.05..0.05))
                .collect(),
        );
    }
    let best = best_of(&objective, &starts, opts)?;
    let set = LocalSet {
        k1: LocalGatePair::from_slice(&best[..6]),
        k2: LocalGatePair::from_slice(&best[6..12]),
        kappa: Some((
            LocalGatePair::from_slice(&best[12..18]),
            LocalGatePair::from_slice(&best[18..24]),
        )),
    };
    Ok((set, 1.0 - objective(&best)))
}

fn random_starts(seed: u64, count: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..dim)
                .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect()
        })
        .collect()
}

fn best_of<F>(objective: &F, starts: &[Vec<f64>], opts: &CorrectionOptions) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let runs: Vec<simplex::Minimum> = starts
        .par_iter()
        .map(|x0| simplex::minimize(objective, x0, 0.3, opts.ftol, opts.max_evals))
        .collect();
    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    let mut best: Option<&simplex::Minimum> = None;
    for run in &runs {
        if !run.f.is_finite() {
            continue;
        }
        best = match best {
            None => Some(run),
            Some(b) if run.f < b.f - 1e-15 => Some(run),
            Some(b) if (run.f - b.f).abs() <= 1e-15 && norm(&run.x) < norm(&b.x) => Some(run),
            keep => keep,
        };
    }
    best.map(|b| b.x.clone())
        .ok_or_else(|| Error::NonFinite("local-correction objective".into()))
}

/// Controlled phase read off a nearly diagonal gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CphaseReading {
    /// `arg u₁₁ - arg u₂₂ - arg u₃₃ + arg u₄₄`, reduced to `(-π, π]`.
    pub angle: f64,
    pub off_diagonal: f64,
}

pub fn cphase_angle(u: &Unitary4) -> Result<CphaseReading> {
    let m = u.matrix();
    let off_diagonal = max_norm(&(m - Mat4::from_diagonal(&m.diagonal())));
    if off_diagonal >= DIAGONAL_THRESHOLD {
        return Err(Error::NotDiagonal {
            residual: off_diagonal,
        });
    }
    let raw = m[(0, 0)].arg() - m[(1, 1)].arg() - m[(2, 2)].arg() + m[(3, 3)].arg();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut angle = raw.rem_euclid(two_pi);
    if angle > std::f64::consts::PI {
        angle -= two_pi;
    }
    Ok(CphaseReading {
        angle,
        off_diagonal,
    })
}

/// Where the single-qubit gates of a report came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalsSource {
    Appendix,
    Optimized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateReport {
    pub tag: String,
    pub fidelity: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub gate_time_ns: f64,
    #[serde(rename = "peak_amplitude_MHz")]
    pub peak_amplitude_mhz: f64,
    pub locals_source: LocalsSource,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn random_pair(rng: &mut ChaCha8Rng) -> LocalGatePair {
        let mut v = || {
            [
                rng.random_range(-PI..PI),
                rng.random_range(-PI..PI),
                rng.random_range(-PI..PI),
            ]
        };
        LocalGatePair::new(v(), v())
    }

    #[test]
    fn fidelity_examples() {
        let cnot = TargetGate::Cnot.matrix();
        assert!((fidelity(&cnot, &cnot) - 1.0).abs() < 1e-15);
        let phased = Unitary4::new_unchecked(cnot.matrix() * C64::from_polar(1.0, 0.7));
        assert!((fidelity(&phased, &cnot) - 1.0).abs() < 1e-14);
        assert!((fidelity(&Unitary4::identity(), &cnot) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn catalog_invariants() {
        let inv = |g: TargetGate| local_invariants(&g.matrix()).unwrap();
        let close = |a: LocalInvariants, b: [f64; 3]| {
            a.distance(&LocalInvariants {
                g1: b[0],
                g2: b[1],
                g3: b[2],
            }) < 1e-12
        };
        assert!(close(inv(TargetGate::Cnot), [0.0, 0.0, 1.0]));
        assert!(close(inv(TargetGate::Cz), [0.0, 0.0, 1.0]));
        assert!(close(inv(TargetGate::SqrtCnot), [0.5, 0.0, 2.0]));
        assert!(close(
            local_invariants(&Unitary4::identity()).unwrap(),
            [1.0, 0.0, 3.0]
        ));
    }

    #[test]
    fn invariants_reject_non_unitary() {
        let m = Mat4::identity() * c(1.01, 0.0);
        assert!(matches!(
            local_invariants(&Unitary4::new_unchecked(m)),
            Err(Error::NonUnitary(_))
        ));
    }

    #[test]
    fn appendix_spot_values() {
        let a = appendix_constants("a".parse().unwrap());
        assert_eq!(a.k1.k_right, [0.00564, -0.006156, 0.507546]);
        assert_eq!(a.k1.k_left, [-0.107076, 0.091219, -0.663155]);
        assert_eq!(
            appendix_constants(AppendixTag::Square1).k2.k_right,
            [-0.010813, -0.011452, -0.818712]
        );
        assert_eq!(
            appendix_constants(AppendixTag::Beta)
                .kappa
                .unwrap()
                .0
                .k_right,
            [0.852858, 1.319655, 0.002282]
        );
        assert!(matches!(
            "d".parse::<AppendixTag>(),
            Err(Error::UnknownTag(_))
        ));
    }

    #[test]
    fn target_entries() {
        assert_eq!(TargetGate::Cnot.matrix().matrix()[(0, 1)], c(1.0, 0.0));
        assert_eq!(TargetGate::Cz.matrix().matrix()[(1, 1)], c(-1.0, 0.0));
        assert!(
            TargetGate::Cphase(0.0)
                .matrix()
                .distance(&Unitary4::identity())
                < 1e-15
        );
        let s = TargetGate::SqrtCnot.matrix();
        assert!((s * s).distance(&TargetGate::Cnot.matrix()) < 1e-15);
    }

    #[test]
    fn apply_identity_locals() {
        let u = TargetGate::Cnot.matrix();
        let id = LocalGatePair::IDENTITY;
        assert!(apply_locals(&id, &u, &id).distance(&u) < 1e-15);
    }

    #[test]
    fn two_piece_identity_assembly() {
        let id = LocalGatePair::IDENTITY;
        let seq = TwoPieceSequence {
            pre: id,
            u1: Unitary4::identity(),
            kappa1: id,
            mid_right: Pauli::X,
            mid_left: Pauli::X,
            kappa2: id,
            u2: Unitary4::identity(),
            post: id,
        };
        let xx = kron(&pauli_x(), &pauli_x());
        assert_eq!(*compose_two_piece(&seq).matrix(), xx);
    }

    #[test]
    fn cphase_angle_examples() {
        let theta = 0.8;
        let r = cphase_angle(&TargetGate::Cphase(theta).matrix()).unwrap();
        assert!((r.angle + theta).abs() < 1e-15);
        let r = cphase_angle(&TargetGate::Cz.matrix()).unwrap();
        assert!((r.angle.abs() - PI).abs() < 1e-15);
        assert!(matches!(
            cphase_angle(&TargetGate::Cnot.matrix()),
            Err(Error::NotDiagonal { .. })
        ));
    }

    #[test]
    fn corrections_recover_dressed_cnot() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (a, b) = (random_pair(&mut rng), random_pair(&mut rng));
        let cnot = TargetGate::Cnot.matrix();
        let u = apply_locals(&a, &cnot, &b);
        let corr = find_local_corrections(&u, &cnot, &CorrectionOptions::default()).unwrap();
        assert!(corr.fidelity >= 1.0 - 1e-9, "{}", corr.fidelity);
    }

    #[test]
    fn swap_is_not_a_cnot() {
        let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
        let swap = Unitary4::new_unchecked(Mat4::from_row_slice(&[
            o, z, z, z, z, z, o, z, z, o, z, z, z, z, z, o,
        ]));
        let err = find_local_corrections(
            &swap,
            &TargetGate::Cnot.matrix(),
            &CorrectionOptions::default(),
        );
        assert!(matches!(err, Err(Error::InvariantMismatch { .. })));
    }

    #[test]
    fn report_json_keys() {
        let r = GateReport {
            tag: "a".into(),
            fidelity: 0.5,
            g1: 0.0,
            g2: 0.0,
            g3: 1.0,
            gate_time_ns: 45.0,
            peak_amplitude_mhz: 30.0,
            locals_source: LocalsSource::Appendix,
        };
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["locals_source"], "appendix");
        assert!(v.get("peak_amplitude_MHz").is_some());
    }
}
