//! Adaptive Gauss–Kronrod (7/15) and composite Simpson integration.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    if !fc.is_finite() {
        return Err(Error::NonFinite(format!("integrand at {center:e}")));
    }
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for k in 0..7 {
        let dx = half * XGK[k];
        let (f1, f2) = (f(center - dx), f(center + dx));
        if !f1.is_finite() || !f2.is_finite() {
            return Err(Error::NonFinite(format!("integrand near {center:e}")));
        }
        kronrod += WGK[k] * (f1 + f2);
        if k % 2 == 1 {
            gauss += WG[k / 2] * (f1 + f2);
        }
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).abs()))
}

/// `∫_a^b f` to relative tolerance `rel_tol` by recursive bisection of GK15
/// panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (whole, err) = gk15(&f, a, b)?;
    let mut stack = vec![(a, b, whole, err)];
    let mut total = 0.0;
    let mut budget = 4096;
    // absolute floor keeps identically-zero integrands from recursing forever
    let target = |estimate: f64| (rel_tol * estimate.abs()).max(1e-300);
    while let Some((lo, hi, value, err)) = stack.pop() {
        budget -= 1;
        let scale = whole.abs().max(value.abs());
        if err <= target(scale) * ((hi - lo) / (b - a)).max(1e-3)
            || budget <= 0
            || hi - lo < 1e-15 * (b - a).abs()
        {
            total += value;
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid)?;
        let (v2, e2) = gk15(&f, mid, hi)?;
        stack.push((lo, mid, v1, e1));
        stack.push((mid, hi, v2, e2));
    }
    Ok(total)
}

/// Composite Simpson on uniformly spaced samples; a trailing odd panel is closed
/// with the trapezoid rule.
pub fn simpson_uniform(values: &[f64], dx: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * dx * (values[0] + values[1]),
        _ => {
            let panels = if (n - 1) % 2 == 0 { n - 1 } else { n - 2 };
            let mut s = values[0] + values[panels];
            for (k, v) in values.iter().enumerate().take(panels).skip(1) {
                s += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            let mut total = s * dx / 3.0;
            if panels < n - 1 {
                total += 0.5 * dx * (values[n - 2] + values[n - 1]);
            }
            total
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_oscillatory_integrands() {
        let v = integrate(|x| x.powi(7) - 3.0 * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - (256.0 / 8.0 - 8.0)).abs() < 1e-12);
        let v = integrate(|x| (40.0 * x).sin() * x, 0.0, 3.0, 1e-11).unwrap();
        let exact = ((40.0f64 * 3.0).sin() / 1600.0) - 3.0 * (40.0f64 * 3.0).cos() / 40.0;
        assert!((v - exact).abs() < 1e-10 * exact.abs().max(1.0));
    }

    #[test]
    fn zero_integrand_and_non_finite() {
        assert_eq!(integrate(|_| 0.0, 0.0, 1.0, 1e-9).unwrap(), 0.0);
        assert!(integrate(|x| 1.0 / (x - 0.5), 0.0, 1.0, 1e-9).is_err());
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let dx = 0.1;
        let vals: Vec<f64> = (0..11).map(|k| (k as f64 * dx).powi(3)).collect();
        assert!((simpson_uniform(&vals, dx) - 0.25).abs() < 1e-14);
    }
}
