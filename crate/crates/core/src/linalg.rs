//! Small fixed-size complex matrices and the handful of dense operations the
//! propagators and gate analysis need.

use nalgebra::{Matrix2, Matrix4, SMatrix};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pauli_x() -> Mat2 {
    Mat2::new(c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.))
}

pub fn pauli_y() -> Mat2 {
    Mat2::new(c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.))
}

pub fn pauli_z() -> Mat2 {
    Mat2::new(c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.))
}

/// `exp[i (a σx + b σy + c σz)]` in closed form.
pub fn su2_from_rotation_vector(v: [f64; 3]) -> Mat2 {
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let (s, cs) = norm.sin_cos();
    // sin(|v|)/|v| -> 1 as |v| -> 0
    let k = if norm < 1e-12 { 1.0 } else { s / norm };
    let (a, b, cz) = (v[0] * k, v[1] * k, v[2] * k);
    // cos|v| I + i (a σx + b σy + c σz) sin|v|/|v|
    Mat2::new(c(cs, cz), c(b, a), c(-b, a), c(cs, -cz))
}

/// Kronecker product `a ⊗ b`; `b` indexes fastest.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

pub fn dagger<const N: usize>(m: &SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    m.adjoint()
}

pub fn max_norm<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn trace<const N: usize>(m: &SMatrix<C64, N, N>) -> C64 {
    (0..N).map(|k| m[(k, k)]).sum()
}

/// Largest entry of `|M - M†|`, relative to the largest entry of `M` (absolute
/// when `M` is zero).
pub fn hermiticity_residual<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    let mut worst = 0.0_f64;
    for r in 0..N {
        for col in r..N {
            worst = worst.max((m[(r, col)] - m[(col, r)].conj()).norm());
        }
    }
    let scale = max_norm(m);
    if scale > 0.0 {
        worst / scale
    } else {
        worst
    }
}

/// `max |U†U - 1|`.
pub fn unitarity_residual<const N: usize>(u: &SMatrix<C64, N, N>) -> f64 {
    max_norm(&(u.adjoint() * u - SMatrix::<C64, N, N>::identity()))
}

pub fn is_finite<const N: usize>(m: &SMatrix<C64, N, N>) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `a · b` for small square matrices; several times faster than the generic
/// product for complex 4×4.
#[inline]
pub fn matmul<const N: usize>(
    a: &SMatrix<C64, N, N>,
    b: &SMatrix<C64, N, N>,
) -> SMatrix<C64, N, N> {
    let mut out = SMatrix::<C64, N, N>::zeros();
    let (ad, bd, od) = (a.as_slice(), b.as_slice(), out.as_mut_slice());
    for j in 0..N {
        for k in 0..N {
            let y = bd[j * N + k];
            for i in 0..N {
                let x = ad[k * N + i];
                od[j * N + i] += C64::new(x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re);
            }
        }
    }
    out
}

/// 1-norm with `|re| + |im|` in place of the modulus (an upper bound).
#[inline]
fn norm_one<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    (0..N)
        .map(|col| (0..N).map(|r| m[(r, col)].l1_norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
///
/// The argument is scaled until its 1-norm bound is at most 1/2. The Taylor
/// order is the smallest whose remainder bound `‖x‖^(m+1)/(m+1)!` is below
/// `1e-18`, and the polynomial is evaluated in Horner form.
pub fn expm<const N: usize>(a: &SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    let norm = norm_one(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scale = 0.5_f64.powi(squarings);
    let x = a.map(|z| z * scale);
    let mut result = taylor_exp(&x, norm * scale);
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

#[inline]
fn taylor_exp<const N: usize>(x: &SMatrix<C64, N, N>, norm: f64) -> SMatrix<C64, N, N> {
    let mut order = 1;
    let mut bound = norm;
    while order < 30 {
        bound *= norm / (order + 1) as f64;
        if bound < 1e-18 {
            break;
        }
        order += 1;
    }
    let id = SMatrix::<C64, N, N>::identity();
    let mut sum = id;
    for k in (1..=order).rev() {
        let inv = 1.0 / k as f64;
        sum = id + matmul(x, &sum).map(|z| z * inv);
    }
    sum
}

/// Nearest unitary in the Frobenius sense, by Newton iteration
/// `X ← (X + X^{-†}) / 2` on the polar factor.
pub fn polar_unitary<const N: usize>(m: &SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    let mut x = *m;
    for _ in 0..30 {
        let Some(inv) = x.try_inverse() else { break };
        let next = (x + inv.adjoint()) * C64::new(0.5, 0.0);
        let change = max_norm(&(next - x));
        x = next;
        if change < 1e-15 {
            break;
        }
    }
    x
}

/// `det` of a 4×4 complex matrix (LU with partial pivoting).
pub fn det4(m: &Mat4) -> C64 {
    m.determinant()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
        // σx σy = i σz
        assert!(max_norm(&(x * y - z * I)) < 1e-15);
        assert!(max_norm(&(x * x - Mat2::identity())) < 1e-15);
    }

    #[test]
    fn rotation_vector_matches_series_exponential() {
        let v = [0.3, -1.1, 0.7];
        let gen = (pauli_x().scale(v[0]) + pauli_y().scale(v[1]) + pauli_z().scale(v[2])) * I;
        let closed = su2_from_rotation_vector(v);
        assert!(max_norm(&(closed - expm(&gen))) < 1e-13);
        assert!((closed.determinant() - c(1.0, 0.0)).norm() < 1e-13);
        assert!(max_norm(&(su2_from_rotation_vector([0.0; 3]) - Mat2::identity())) == 0.0);
    }

    #[test]
    fn expm_of_diagonal_and_large_norm() {
        let d = Mat4::from_diagonal(&nalgebra::Vector4::new(
            c(0., -3.0),
            c(0., 1.5),
            c(0.2, 0.),
            c(0., 40.0),
        ));
        let e = expm(&d);
        for k in 0..4 {
            assert!((e[(k, k)] - d[(k, k)].exp()).norm() < 1e-11 * d[(k, k)].exp().norm().max(1.0));
        }
    }

    #[test]
    fn kron_ordering() {
        // (X ⊗ 1) flips the slow index: |0> -> |2>
        let k = kron(&pauli_x(), &Mat2::identity());
        assert_eq!(k[(2, 0)], c(1.0, 0.0));
        assert_eq!(k[(1, 0)], c(0.0, 0.0));
    }

    #[test]
    fn polar_projection_restores_unitarity() {
        let u = kron(&su2_from_rotation_vector([0.2, 0.4, -0.3]), &pauli_y());
        let noisy = u + Mat4::from_element(c(1e-7, -2e-7));
        assert!(unitarity_residual(&noisy) > 1e-8);
        let fixed = polar_unitary(&noisy);
        assert!(unitarity_residual(&fixed) < 1e-13);
        assert!(max_norm(&(fixed - u)) < 1e-6);
    }
}
