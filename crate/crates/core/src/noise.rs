//! Quasistatic charge-noise Monte Carlo.
//!
//! Each sample shifts `J`, `E_z^1` and `ΔE_z^1` by independent normal offsets
//! and re-simulates the gate with the nominal drive and locals.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::designs::{Assembly, GateDesign};
use crate::error::{Error, Result};
use crate::model::{DeviceParams, TWO_PI};

/// Name recorded in sweep metadata.
pub const RNG_NAME: &str = "ChaCha8Rng, key = seed ‖ point ‖ sample (little-endian u64s)";
pub const DEFAULT_SAMPLES: usize = 500;
/// Redraws allowed per sample before giving up.
const MAX_REDRAWS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct NoiseSample {
    pub d_j: f64,
    pub d_ez1: f64,
    pub d_delta_ez1: f64,
}

/// `params` with `J`, `E_z^1`, `ΔE_z^1` shifted. Non-positive `J` is an error.
pub fn perturb(params: &DeviceParams, s: &NoiseSample) -> Result<DeviceParams> {
    let mut p = *params;
    p.j += s.d_j;
    p.ez1 += s.d_ez1;
    p.delta_ez1 += s.d_delta_ez1;
    if !(p.j > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "perturbed J = {} is not positive",
            p.j
        )));
    }
    Ok(p)
}

/// Three independent draws from `N(0, σ²)` in the order `J`, `E_z^1`, `ΔE_z^1`.
pub fn sample<R: rand::Rng + ?Sized>(sigma_delta: f64, rng: &mut R) -> NoiseSample {
    let mut draw = || -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        sigma_delta * z
    };
    let d_j = draw();
    let d_ez1 = draw();
    let d_delta_ez1 = draw();
    NoiseSample {
        d_j,
        d_ez1,
        d_delta_ez1,
    }
}

/// Generator for one sample of one grid point.
pub fn sample_rng(seed: u64, point: u64, sample: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&point.to_le_bytes());
    key[16..24].copy_from_slice(&sample.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub tag: String,
    /// angular frequency
    pub sigma_delta: f64,
    pub mean_infidelity: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub rejected_samples: usize,
}

impl SweepResult {
    pub fn sigma_delta_khz(&self) -> f64 {
        self.sigma_delta / TWO_PI / 1e3
    }
}

/// Run settings shared by every grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseRun {
    pub n_samples: usize,
    pub seed: u64,
    pub step: f64,
}

fn one_sample(
    design: &GateDesign,
    nominal: &DeviceParams,
    sigma: f64,
    run: &NoiseRun,
    point: u64,
    k: u64,
) -> Result<(f64, usize)> {
    let mut rng = sample_rng(run.seed, point, k);
    let mut rejected = 0;
    loop {
        let s = sample(sigma, &mut rng);
        match perturb(nominal, &s) {
            Ok(p) => {
                let u = design.simulate_pulse(&p, run.step)?;
                return Ok((design.infidelity_of(&u), rejected));
            }
            Err(_) if rejected < MAX_REDRAWS => rejected += 1,
            Err(e) => return Err(e),
        }
    }
}

/// Mean `1 - F` over `run.n_samples` perturbed simulations at grid index
/// `point`.
pub fn average_infidelity(
    design: &GateDesign,
    nominal: &DeviceParams,
    sigma_delta: f64,
    run: &NoiseRun,
    point: u64,
) -> Result<SweepResult> {
    if !(sigma_delta >= 0.0) || run.n_samples == 0 {
        return Err(Error::InvalidParameter(
            "sigma_delta >= 0 and n_samples > 0 required".into(),
        ));
    }
    let per_sample: Vec<Result<(f64, usize)>> = (0..run.n_samples as u64)
        .into_par_iter()
        .map(|k| one_sample(design, nominal, sigma_delta, run, point, k))
        .collect();
    let mut values = Vec::with_capacity(run.n_samples);
    let mut rejected = 0;
    for r in per_sample {
        let (v, rej) = r?;
        values.push(v);
        rejected += rej;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(SweepResult {
        tag: design.tag.to_string(),
        sigma_delta,
        mean_infidelity: mean,
        stderr: (var / n).sqrt(),
        n_samples: values.len(),
        rejected_samples: rejected,
    })
}

/// One [`average_infidelity`] per grid point; point `i` uses sub-seed `(seed, i)`.
pub fn sweep(
    design: &GateDesign,
    nominal: &DeviceParams,
    grid: &[f64],
    run: &NoiseRun,
) -> Result<Vec<SweepResult>> {
    grid.iter()
        .enumerate()
        .map(|(i, &sigma)| average_infidelity(design, nominal, sigma, run, i as u64))
        .collect()
}

/// 12 log-spaced `σ_δ/2π` points from 10 kHz to 1 MHz, as angular frequencies.
pub fn default_grid() -> Vec<f64> {
    (0..12)
        .map(|i| TWO_PI * 1e4 * 100f64.powf(i as f64 / 11.0))
        .collect()
}

pub fn sweep_csv(results: &[SweepResult]) -> String {
    let mut out =
        String::from("sigma_delta_kHz,mean_infidelity,stderr,n_samples,rejected_samples\n");
    for r in results {
        let _ = writeln!(
            out,
            "{},{:e},{:e},{},{}",
            r.sigma_delta_khz(),
            r.mean_infidelity,
            r.stderr,
            r.n_samples,
            r.rejected_samples
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMetadata {
    pub design: String,
    pub seed: u64,
    pub rng: String,
    pub step_ps: f64,
    pub n_samples: usize,
    pub two_piece: bool,
    pub version: String,
}

pub fn sweep_metadata(design: &GateDesign, run: &NoiseRun) -> SweepMetadata {
    SweepMetadata {
        design: design.tag.to_string(),
        seed: run.seed,
        rng: RNG_NAME.to_string(),
        step_ps: run.step * 1e12,
        n_samples: run.n_samples,
        two_piece: matches!(design.tag.assembly(), Assembly::TwoPiece { .. }),
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}
