//! Time-ordered propagators and the closed-form two-level solutions used to
//! check them.

use std::f64::consts::PI;
use std::ops::Mul;

use nalgebra::{Const, DimMin, SMatrix};

use crate::envelopes::ChiSpec;
use crate::error::{Error, Result};
use crate::linalg::{
    c, expm, hermiticity_residual, is_finite, matmul, max_norm, pauli_y, polar_unitary,
    unitarity_residual, Mat2, Mat4, C64, I,
};
use crate::model::{DeviceParams, DriveSpec, InteractionHamiltonian};
use crate::quadrature;

/// Default substep for interaction-picture simulations (0.25 ps).
pub const DEFAULT_STEP: f64 = 0.25e-12;
/// Drift above which the result is projected back onto the unitary group.
pub const REUNITARIZE_THRESHOLD: f64 = 1e-10;
/// Relative anti-Hermitian part tolerated in a Hamiltonian sample.
pub const HERMITICITY_TOL: f64 = 1e-10;

macro_rules! unitary_newtype {
    ($name:ident, $mat:ty, $n:literal) => {
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub struct $name($mat);

        impl $name {
            /// Wraps `m` after checking `max |m†m - 1| <= tol`.
            pub fn new(m: $mat, tol: f64) -> Result<Self> {
                if !is_finite(&m) {
                    return Err(Error::NonFinite("unitary entry".into()));
                }
                let residual = unitarity_residual(&m);
                if residual > tol {
                    return Err(Error::NonUnitary(residual));
                }
                Ok(Self(m))
            }

            pub fn new_unchecked(m: $mat) -> Self {
                Self(m)
            }

            pub fn identity() -> Self {
                Self(<$mat>::identity())
            }

            pub fn matrix(&self) -> &$mat {
                &self.0
            }

            pub fn into_matrix(self) -> $mat {
                self.0
            }

            pub fn dagger(&self) -> Self {
                Self(self.0.adjoint())
            }

            pub fn unitarity_residual(&self) -> f64 {
                unitarity_residual(&self.0)
            }

            /// Max-norm distance to `other`.
            pub fn distance(&self, other: &Self) -> f64 {
                max_norm(&(self.0 - other.0))
            }
        }

        impl Mul for $name {
            type Output = $name;
            fn mul(self, rhs: $name) -> $name {
                $name(self.0 * rhs.0)
            }
        }
    };
}

unitary_newtype!(Unitary4, Mat4, 4);
unitary_newtype!(Unitary2, Mat2, 2);

/// Diagnostics from one propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveStats {
    pub steps: usize,
    /// `max |U†U - 1|` before any projection.
    pub drift: f64,
    pub projected: bool,
}

fn check_sample<const N: usize>(h: &SMatrix<C64, N, N>, t: f64) -> Result<()> {
    if !is_finite(h) {
        return Err(Error::NonFinite(format!(
            "Hamiltonian sample at t = {t:e} s"
        )));
    }
    let residual = hermiticity_residual(h);
    if residual > HERMITICITY_TOL {
        return Err(Error::NonHermitian { t, residual });
    }
    Ok(())
}

/// One-step rule of the exponential-product propagator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Scheme {
    /// `exp(-i H(t_mid) dt)`, second order.
    Midpoint,
    /// Fourth-order Magnus: one exponential per step of the two-term Magnus
    /// generator built from Hamiltonian samples at the Gauss nodes.
    #[default]
    Magnus4,
}

/// Product of one-step exponentials over `n` equal substeps of `[t0, t1]`,
/// left-multiplied onto `u`.
fn advance<const N: usize, F>(
    h: &F,
    u: &mut SMatrix<C64, N, N>,
    t0: f64,
    t1: f64,
    step: f64,
    scheme: Scheme,
) -> Result<usize>
where
    F: Fn(f64) -> SMatrix<C64, N, N>,
{
    let n = (((t1 - t0) / step).ceil() as usize).max(1);
    let dt = (t1 - t0) / n as f64;
    let minus_i_dt = c(0.0, -dt);
    let sample = |t: f64| -> Result<SMatrix<C64, N, N>> {
        let m = h(t);
        check_sample(&m, t)?;
        Ok(m)
    };
    match scheme {
        Scheme::Midpoint => {
            for k in 0..n {
                let hm = sample(t0 + (k as f64 + 0.5) * dt)?;
                *u = matmul(&expm(&(hm * minus_i_dt)), u);
            }
        }
        Scheme::Magnus4 => {
            let r3 = 3f64.sqrt();
            let (c1, c2) = (0.5 - r3 / 6.0, 0.5 + r3 / 6.0);
            let half = minus_i_dt * 0.5;
            // (√3/12) dt² [A₂, A₁] with A = -iH equals -(√3/12) dt² [H₂, H₁]
            let comm = c(-r3 / 12.0 * dt * dt, 0.0);
            for k in 0..n {
                let ts = t0 + k as f64 * dt;
                let (h1, h2) = (sample(ts + c1 * dt)?, sample(ts + c2 * dt)?);
                let omega = (h1 + h2) * half + (matmul(&h2, &h1) - matmul(&h1, &h2)) * comm;
                *u = matmul(&expm(&omega), u);
            }
        }
    }
    Ok(n)
}

fn finish<const N: usize>(
    u: SMatrix<C64, N, N>,
    steps: usize,
) -> Result<(SMatrix<C64, N, N>, EvolveStats)>
where
    Const<N>: DimMin<Const<N>, Output = Const<N>>,
{
    if !is_finite(&u) {
        return Err(Error::NonFinite("propagator".into()));
    }
    let drift = unitarity_residual(&u);
    let projected = drift > REUNITARIZE_THRESHOLD;
    let u = if projected { polar_unitary(&u) } else { u };
    Ok((
        u,
        EvolveStats {
            steps,
            drift,
            projected,
        },
    ))
}

fn validate_window(t0: f64, t1: f64, step: f64) -> Result<()> {
    if !(t1 > t0) || !(step > 0.0) || !t0.is_finite() || !t1.is_finite() || !step.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "propagation needs t1 > t0 and step > 0 (t0={t0:e}, t1={t1:e}, step={step:e})"
        )));
    }
    Ok(())
}

/// Exponential-product propagator with statistics.
pub fn evolve_with_stats<F>(h: F, t0: f64, t1: f64, step: f64) -> Result<(Unitary4, EvolveStats)>
where
    F: Fn(f64) -> Mat4,
{
    evolve_scheme(h, t0, t1, step, Scheme::default())
}

pub fn evolve_scheme<F>(
    h: F,
    t0: f64,
    t1: f64,
    step: f64,
    scheme: Scheme,
) -> Result<(Unitary4, EvolveStats)>
where
    F: Fn(f64) -> Mat4,
{
    validate_window(t0, t1, step)?;
    let mut u = Mat4::identity();
    let steps = advance(&h, &mut u, t0, t1, step, scheme)?;
    let (u, stats) = finish(u, steps)?;
    Ok((Unitary4(u), stats))
}

/// Time-ordered `U(t1, t0)` for a 4×4 Hamiltonian.
pub fn evolve<F>(h: F, t0: f64, t1: f64, step: f64) -> Result<Unitary4>
where
    F: Fn(f64) -> Mat4,
{
    evolve_with_stats(h, t0, t1, step).map(|(u, _)| u)
}

/// Same integrator for 2×2 Hamiltonians.
pub fn evolve2<F>(h: F, t0: f64, t1: f64, step: f64) -> Result<Unitary2>
where
    F: Fn(f64) -> Mat2,
{
    validate_window(t0, t1, step)?;
    let mut u = Mat2::identity();
    let steps = advance(&h, &mut u, t0, t1, step, Scheme::default())?;
    Ok(Unitary2(finish(u, steps)?.0))
}

/// Cumulative propagators `U(t_k, t0)` at increasing checkpoints `t_k > t0`.
pub fn evolve_checkpoints<F>(h: F, t0: f64, checkpoints: &[f64], step: f64) -> Result<Vec<Unitary4>>
where
    F: Fn(f64) -> Mat4,
{
    let mut u = Mat4::identity();
    let mut t = t0;
    let mut out = Vec::with_capacity(checkpoints.len());
    for &next in checkpoints {
        if next < t {
            return Err(Error::InvalidParameter(
                "checkpoints must be increasing".into(),
            ));
        }
        if next > t {
            validate_window(t, next, step)?;
            advance(&h, &mut u, t, next, step, Scheme::default())?;
            t = next;
        }
        // projection only on the reported copy so the running product is untouched
        out.push(Unitary4(finish(u, 0)?.0));
    }
    Ok(out)
}

/// `U_int(τ)` for a drive under the interaction-picture Hamiltonian.
pub fn simulate_drive(params: &DeviceParams, drive: &DriveSpec, step: f64) -> Result<Unitary4> {
    simulate_drive_with_stats(params, drive, step).map(|(u, _)| u)
}

pub fn simulate_drive_with_stats(
    params: &DeviceParams,
    drive: &DriveSpec,
    step: f64,
) -> Result<(Unitary4, EvolveStats)> {
    simulate_drive_scheme(params, drive, step, Scheme::default())
}

pub fn simulate_drive_scheme(
    params: &DeviceParams,
    drive: &DriveSpec,
    step: f64,
    scheme: Scheme,
) -> Result<(Unitary4, EvolveStats)> {
    let ham = InteractionHamiltonian::new(params, drive);
    evolve_scheme(|t| ham.at(t), 0.0, drive.duration(), step, scheme)
}

/// `max |U(step) - U(step/2)|` for a drive.
pub fn step_halving_difference(params: &DeviceParams, drive: &DriveSpec, step: f64) -> Result<f64> {
    let coarse = simulate_drive(params, drive, step)?;
    let fine = simulate_drive(params, drive, step / 2.0)?;
    Ok(coarse.distance(&fine))
}

fn phase_integrand(spec: &ChiSpec, t: f64) -> f64 {
    let (x, d1, _) = spec.eval(t);
    let delta = spec.delta();
    (delta * delta / 4.0 - d1 * d1).sqrt() / (2.0 * x).sin()
}

/// Closed-form evolution of the two-level system `[[-Δ/2, Ω], [Ω, Δ/2]]`
/// driven by the χ-derived `Ω(t)`.
pub fn two_level_analytic(spec: &ChiSpec, t: f64) -> Result<Unitary2> {
    let (x, d1, _) = crate::envelopes::chi(t, spec)?;
    let delta = spec.delta();
    if d1.abs() > delta.abs() / 2.0 {
        return Err(Error::ConstraintViolation {
            t,
            radicand: delta * delta / 4.0 - d1 * d1,
        });
    }
    let integral = quadrature::integrate(|s| phase_integrand(spec, s), 0.0, t, 1e-13)?;
    let tilt = (2.0 * d1 / delta).asin() / 2.0;
    let (psi_plus, psi_minus) = (integral + tilt, integral - tilt);
    let (s, cs) = x.sin_cos();
    let e = |phi: f64| C64::from_polar(1.0, phi);
    let inner = Mat2::new(
        e(psi_minus) * cs,
        e(-psi_plus) * s,
        -e(psi_plus) * s,
        e(-psi_minus) * cs,
    );
    let prefactor = expm(&(pauli_y() * (-I * (PI / 4.0))));
    Ok(Unitary2(prefactor * inner))
}

/// Phase `θ` of `diag(e^{-iθ}, e^{iθ})` produced by `Ω = σ sech(σt - nπ/2)`
/// on a two-level system with detuning `Δ`.
pub fn sech_two_level_phase(sigma: f64, delta: f64, n: f64) -> Result<f64> {
    if delta == 0.0 || !delta.is_finite() {
        return Err(Error::InvalidParameter(
            "sech phase needs a nonzero detuning".into(),
        ));
    }
    if !(sigma > 0.0) || !(n > 0.0) {
        return Err(Error::InvalidParameter(
            "sech phase needs sigma > 0 and n > 0".into(),
        ));
    }
    let tau = n * PI / sigma;
    Ok(-2.0 * (sigma / delta).atan() - delta * tau / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector4;

    #[test]
    fn zero_hamiltonian_gives_identity() {
        let u = evolve(|_| Mat4::zeros(), 0.0, 1.0, 0.01).unwrap();
        assert_eq!(u, Unitary4::identity());
    }

    #[test]
    fn diagonal_hamiltonian_is_exact() {
        let d = [1.3, -0.2, 4.0, 0.7];
        let h = Mat4::from_diagonal(&Vector4::new(
            c(d[0], 0.),
            c(d[1], 0.),
            c(d[2], 0.),
            c(d[3], 0.),
        ));
        let u = evolve(|_| h, 0.0, 2.5, 0.1).unwrap();
        for k in 0..4 {
            assert!((u.matrix()[(k, k)] - C64::from_polar(1.0, -d[k] * 2.5)).norm() < 1e-13);
        }
    }

    #[test]
    fn rejects_bad_windows_and_samples() {
        assert!(evolve(|_| Mat4::zeros(), 1.0, 1.0, 0.1).is_err());
        assert!(evolve(|_| Mat4::zeros(), 0.0, 1.0, 0.0).is_err());
        let mut bad = Mat4::zeros();
        bad[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(
            evolve(|_| bad, 0.0, 1.0, 0.1),
            Err(Error::NonHermitian { .. })
        ));
        let mut nan = Mat4::zeros();
        nan[(0, 0)] = c(f64::NAN, 0.0);
        assert!(matches!(
            evolve(|_| nan, 0.0, 1.0, 0.1),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn checkpoints_match_direct_evolution() {
        let h = |t: f64| {
            let mut m = Mat4::zeros();
            m[(0, 1)] = c(t.cos(), 0.3);
            m[(1, 0)] = m[(0, 1)].conj();
            m[(2, 2)] = c(0.5, 0.0);
            m
        };
        let us = evolve_checkpoints(h, 0.0, &[0.5, 1.0, 2.0], 0.01).unwrap();
        let direct = evolve(h, 0.0, 2.0, 0.01).unwrap();
        assert!(us[2].distance(&direct) < 1e-12);
    }

    #[test]
    fn analytic_two_level_starts_at_identity() {
        let spec = ChiSpec::new(50.0, 10.0, 1.0).unwrap();
        let u0 = two_level_analytic(&spec, 0.0).unwrap();
        assert!(u0.distance(&Unitary2::identity()) < 1e-15);
    }

    #[test]
    fn sech_phase_closed_form() {
        // σ = Δ, n = 1: -2 arctan 1 - π/2
        assert!((sech_two_level_phase(1.0, 1.0, 1.0).unwrap() + PI).abs() < 1e-15);
        // small σ/Δ approaches the bare detuning phase
        let tau = 3.0 * PI / 1e-6;
        let theta = sech_two_level_phase(1e-6, 2.0, 3.0).unwrap();
        assert!((theta + 2.0 * tau / 2.0).abs() < 1e-5);
        assert!(sech_two_level_phase(1.0, 0.0, 1.0).is_err());
    }
}
