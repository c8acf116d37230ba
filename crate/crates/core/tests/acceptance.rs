//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinforge::analysis::{
    apply_locals, cphase_angle, find_local_corrections, local_invariants, CorrectionOptions,
    LocalGatePair, TargetGate,
};
use spinforge::cphase::{
    alpha_solutions, design_cphase, theta_from_alpha, validity_window, Branch, Family, DEFAULT_N,
};
use spinforge::designs::{invariant_scan, DesignTag, GateDesign, SCAN_DT};
use spinforge::envelopes::{
    catalog, omega_from_chi, pulse_area, ChiSpec, PulseTag, CHI_DESIGN_A, SQUARE_AMPLITUDE_MHZ,
};
use spinforge::linalg::{c, expm, pauli_x, pauli_z, Mat2, Mat4, I};
use spinforge::model::{mhz, ns, to_mhz, to_ns, DeviceParams, TWO_PI};
use spinforge::noise::{average_infidelity, default_grid, NoiseRun, DEFAULT_SAMPLES};
use spinforge::propagator::{
    evolve2, sech_two_level_phase, simulate_drive, step_halving_difference, two_level_analytic,
    DEFAULT_STEP,
};
use spinforge::{default_params, Unitary4};

const MIN_FIDELITY_A: f64 = 0.9999;
const GATE_TIME_A_NS: f64 = 45.0;
const MIN_FIDELITY_B: f64 = 0.99995;
const GATE_TIME_B_NS: f64 = 124.0;
/// Allowed distance from the quoted approximate gate times.
const GATE_TIME_SLACK_NS: f64 = 1.0;
const RABI_B_MHZ: (f64, f64) = (8.5, 9.5);
const MIN_FIDELITY_TWO_PIECE: f64 = 0.999999 - 5e-6;

const CNOT_CROSSING_NS: f64 = 26.445;
const SQRT_CNOT_CROSSING_NS: f64 = 12.8;
const CROSSING_SLACK_NS: f64 = 0.1;
const MIN_FIDELITY_SQUARE: f64 = 0.99999;

const CZ_TAU_NS: (f64, f64) = (176.0, 180.0);
const CZ_PEAK_MHZ: (f64, f64) = (33.3, 34.3);
const MIN_FIDELITY_CZ: f64 = 0.99999;
const HALF_PI_TAU_NS: (f64, f64) = (163.0, 167.0);
const HALF_PI_PEAK_MHZ: (f64, f64) = (35.9, 36.9);

const MAX_CPHASE_INFIDELITY: f64 = 1e-5;
const CPHASE_ANGLE_TOL: f64 = 2e-3;
const CPHASE_PEAK_FIRST_MHZ: f64 = 39.0;
const CPHASE_PEAK_LAST_MHZ: f64 = 34.0;
const CPHASE_PEAK_SLACK_MHZ: f64 = 0.5;

const NOISE_SEED: u64 = 2019;
/// Integrator step for the Monte Carlo runs.
const NOISE_STEP: f64 = 0.5e-12;
const NOISE_HIGH_KHZ: f64 = 200.0;
const NOISE_LOW_KHZ: f64 = 50.0;
const MIN_NOISY_FIDELITY: f64 = 0.99;
const MIN_TWO_PIECE_GAIN: f64 = 10.0;
/// Default-grid points probed for the square two-piece gain, all ≤ 200 kHz.
const SQUARE_GRID_POINTS: [usize; 2] = [6, 7];

const CHI_TOL: f64 = 1e-7;
const SECH_PHASE_TOL: f64 = 1e-4;
const INVARIANT_TOL: f64 = 1e-9;
const ROUND_TRIP_TOL: f64 = 1e-9;
const AREA_REL_TOL: f64 = 1e-3;
const PEAK_TAU_REL_TOL: f64 = 1e-12;
const STEP_HALVING_TOL: f64 = 1e-8;
const PROPERTY_SEED: u64 = 8;

struct Outcome {
    ok: bool,
    summary: String,
}

fn within(x: f64, (lo, hi): (f64, f64)) -> bool {
    (lo..=hi).contains(&x)
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok  "
    } else {
        "FAIL"
    }
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TWO_PI);
    d.min(TWO_PI - d)
}

fn report(tag: DesignTag, p: &DeviceParams) -> (f64, f64, f64) {
    let design = GateDesign::new(tag, p).unwrap();
    let (r, _) = design.report(p, DEFAULT_STEP, false).unwrap();
    (r.fidelity, r.gate_time_ns, r.peak_amplitude_mhz)
}

fn criterion_1(p: &DeviceParams) -> Outcome {
    let (f, t, _) = report(DesignTag::A, p);
    let exact = to_ns(CHI_DESIGN_A.1 / p.j);
    let ok = f >= MIN_FIDELITY_A
        && (t - exact).abs() <= 1e-9
        && (t - GATE_TIME_A_NS).abs() <= GATE_TIME_SLACK_NS;
    Outcome {
        ok,
        summary: format!("CNOT (a): F = {f:.7} (>= {MIN_FIDELITY_A}), tau = {t:.3} ns (5.54498/J = {exact:.3} ns)"),
    }
}

fn criterion_2(p: &DeviceParams) -> Outcome {
    let (f, t, peak) = report(DesignTag::B, p);
    let rabi = peak / 2.0;
    let ok = f >= MIN_FIDELITY_B
        && (t - GATE_TIME_B_NS).abs() <= GATE_TIME_SLACK_NS
        && within(rabi, RABI_B_MHZ);
    Outcome {
        ok,
        summary: format!(
            "CNOT (b): F = {f:.7} (>= {MIN_FIDELITY_B}), tau = {t:.3} ns, max Rabi = {rabi:.3} MHz"
        ),
    }
}

fn criterion_3(p: &DeviceParams) -> Outcome {
    let (f, t, _) = report(DesignTag::C, p);
    Outcome {
        ok: f >= MIN_FIDELITY_TWO_PIECE,
        summary: format!(
            "two-piece CNOT (c): F = {f:.8} (>= {MIN_FIDELITY_TWO_PIECE:.6}), tau = {t:.3} ns"
        ),
    }
}

fn criterion_4(p: &DeviceParams) -> Outcome {
    let scan = invariant_scan(
        p,
        mhz(SQUARE_AMPLITUDE_MHZ),
        ns(30.0),
        SCAN_DT,
        DEFAULT_STEP,
    )
    .unwrap();
    let near = |name: &str, at: f64| {
        scan.crossings
            .iter()
            .filter(|c| c.target == name)
            .map(|c| to_ns(c.t))
            .min_by(|a, b| (a - at).abs().total_cmp(&(b - at).abs()))
    };
    let cnot = near("CNOT", CNOT_CROSSING_NS);
    let sqrt = near("sqrt-CNOT", SQRT_CNOT_CROSSING_NS);
    let hit = |t: Option<f64>, at: f64| t.is_some_and(|t| (t - at).abs() <= CROSSING_SLACK_NS);
    let (f_single, _, _) = report(DesignTag::SqCnot, p);
    let (f_two, _, _) = report(DesignTag::SqTwoPiece, p);
    let show = |t: Option<f64>| t.map_or("none".to_string(), |t| format!("{t:.4} ns"));
    let ok = hit(cnot, CNOT_CROSSING_NS)
        && hit(sqrt, SQRT_CNOT_CROSSING_NS)
        && f_single >= MIN_FIDELITY_SQUARE
        && f_two >= MIN_FIDELITY_TWO_PIECE;
    Outcome {
        ok,
        summary: format!(
            "square: CNOT crossing {}, sqrt-CNOT crossing {}, F single = {f_single:.7}, F two-piece = {f_two:.8}",
            show(cnot),
            show(sqrt)
        ),
    }
}

fn criterion_5(p: &DeviceParams) -> Outcome {
    let (f, tau, peak) = report(DesignTag::CzAlpha, p);
    let half = design_cphase(PI / 2.0, p).unwrap();
    let (tau2, peak2) = (to_ns(half.tau), to_mhz(half.peak_amplitude()));
    let ok = within(tau, CZ_TAU_NS)
        && within(peak, CZ_PEAK_MHZ)
        && f >= MIN_FIDELITY_CZ
        && within(tau2, HALF_PI_TAU_NS)
        && within(peak2, HALF_PI_PEAK_MHZ);
    Outcome {
        ok,
        summary: format!(
            "sech CZ: tau = {tau:.3} ns, peak = {peak:.3} MHz, F = {f:.7}; pi/2: tau = {tau2:.3} ns, peak = {peak2:.3} MHz"
        ),
    }
}

fn criterion_6(p: &DeviceParams) -> Outcome {
    let thetas = [PI / 16.0, PI / 8.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, PI];
    let mut ok = true;
    let mut peaks = Vec::new();
    let (mut worst_infidelity, mut worst_angle) = (0.0f64, 0.0f64);
    for theta in thetas {
        let d = design_cphase(theta, p).unwrap();
        let u = simulate_drive(p, &d.drive, DEFAULT_STEP).unwrap();
        let target = TargetGate::Cphase(theta).matrix();
        let corr = find_local_corrections(&u, &target, &CorrectionOptions::default()).unwrap();
        let gate = apply_locals(&corr.k1, &u, &corr.k2);
        let angle = cphase_angle(&gate).unwrap().angle;
        let infidelity = 1.0 - corr.fidelity;
        let gap = (angle.abs() - theta).abs();
        let peak = to_mhz(d.peak_amplitude());
        println!(
            "      {} theta = {theta:.5}: tau = {:.3} ns, peak = {peak:.3} MHz, 1-F = {infidelity:.2e}, |angle| - theta = {:+.2e}",
            mark(infidelity <= MAX_CPHASE_INFIDELITY && gap <= CPHASE_ANGLE_TOL),
            to_ns(d.tau),
            angle.abs() - theta,
        );
        ok &= infidelity <= MAX_CPHASE_INFIDELITY && gap <= CPHASE_ANGLE_TOL;
        worst_infidelity = worst_infidelity.max(infidelity);
        worst_angle = worst_angle.max(gap);
        peaks.push(peak);
    }
    let monotone = peaks.windows(2).all(|w| w[1] < w[0]);
    let first = peaks[0];
    let last = peaks[peaks.len() - 1];
    ok &= monotone
        && (first - CPHASE_PEAK_FIRST_MHZ).abs() <= CPHASE_PEAK_SLACK_MHZ
        && (last - CPHASE_PEAK_LAST_MHZ).abs() <= CPHASE_PEAK_SLACK_MHZ;
    Outcome {
        ok,
        summary: format!(
            "theta-CPHASE table: max 1-F = {worst_infidelity:.2e}, max angle error = {worst_angle:.2e} rad, peaks {first:.2} -> {last:.2} MHz (monotone: {monotone})"
        ),
    }
}

fn noisy(tag: DesignTag, p: &DeviceParams, sigma: f64, point: u64) -> f64 {
    let design = GateDesign::new(tag, p).unwrap();
    let run = NoiseRun {
        n_samples: DEFAULT_SAMPLES,
        seed: NOISE_SEED,
        step: NOISE_STEP,
    };
    let r = average_infidelity(&design, p, sigma, &run, point).unwrap();
    println!(
        "      {tag} at {:.1} kHz: 1-F = {:.3e} +- {:.1e}",
        r.sigma_delta_khz(),
        r.mean_infidelity,
        r.stderr
    );
    r.mean_infidelity
}

fn criterion_7(p: &DeviceParams) -> Outcome {
    let high = TWO_PI * NOISE_HIGH_KHZ * 1e3;
    let low = TWO_PI * NOISE_LOW_KHZ * 1e3;
    let mut ok = true;

    let chi = [DesignTag::A, DesignTag::B, DesignTag::C];
    let at_high: Vec<f64> = chi.iter().map(|&t| noisy(t, p, high, 0)).collect();
    let cz = noisy(DesignTag::CzTwoPiece, p, high, 0);
    let high_ok = at_high
        .iter()
        .chain([&cz])
        .all(|&e| 1.0 - e >= MIN_NOISY_FIDELITY);
    println!(
        "    {} mean F >= {MIN_NOISY_FIDELITY} at {NOISE_HIGH_KHZ} kHz for a, b, c, cz_two_piece",
        mark(high_ok)
    );
    ok &= high_ok;

    let at_low: Vec<f64> = chi.iter().map(|&t| noisy(t, p, low, 1)).collect();
    let low_ok = at_low[2] < at_low[0] && at_low[2] < at_low[1];
    println!(
        "    {} c beats a and b at {NOISE_LOW_KHZ} kHz",
        mark(low_ok)
    );
    ok &= low_ok;

    let grid = default_grid();
    let mut best_gain: f64 = 0.0;
    for k in SQUARE_GRID_POINTS {
        assert!(grid[k] <= high * (1.0 + 1e-12));
        let single = noisy(DesignTag::SqCnot, p, grid[k], k as u64);
        let two = noisy(DesignTag::SqTwoPiece, p, grid[k], k as u64);
        best_gain = best_gain.max(single / two);
    }
    let gain_ok = best_gain >= MIN_TWO_PIECE_GAIN;
    println!(
        "    {} square two-piece gain {best_gain:.2}x (>= {MIN_TWO_PIECE_GAIN}x)",
        mark(gain_ok)
    );
    ok &= gain_ok;

    Outcome {
        ok,
        summary: format!(
            "noise ({DEFAULT_SAMPLES} samples, seed {NOISE_SEED}): 1-F at {NOISE_HIGH_KHZ} kHz a/b/c/cz2 = {:.2e}/{:.2e}/{:.2e}/{cz:.2e}, square gain {best_gain:.1}x",
            at_high[0], at_high[1], at_high[2]
        ),
    }
}

fn two_level(delta: f64, omega: f64) -> Mat2 {
    pauli_z() * c(-delta / 2.0, 0.0) + pauli_x() * c(omega, 0.0)
}

fn random_unitary(rng: &mut ChaCha8Rng) -> Unitary4 {
    let mut h = Mat4::zeros();
    for r in 0..4 {
        h[(r, r)] = c(rng.random_range(-2.0..2.0), 0.0);
        for col in r + 1..4 {
            h[(r, col)] = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            h[(col, r)] = h[(r, col)].conj();
        }
    }
    Unitary4::new(expm(&(h * -I)), 1e-12).unwrap()
}

fn random_local(rng: &mut ChaCha8Rng) -> LocalGatePair {
    let mut v = || [0; 3].map(|_| rng.random_range(-PI..PI));
    LocalGatePair::new(v(), v())
}

fn criterion_8(p: &DeviceParams) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(PROPERTY_SEED);
    let mut parts = Vec::new();
    let mut part = |name: &str, ok: bool, detail: String| {
        println!("    {} {name}: {detail}", mark(ok));
        parts.push((name.to_string(), ok));
    };

    // scaled units with Δ = 1
    let mut chi_worst: f64 = 0.0;
    let mut specs = 0;
    while specs < 20 {
        let tau: f64 = rng.random_range(15.0..60.0);
        let a = rng.random_range(-0.9..0.9) * (0.5 * tau / 0.01488).min(0.6 * 64.0 * PI);
        let Ok(spec) = ChiSpec::new(a, tau, 1.0) else {
            continue;
        };
        specs += 1;
        let numeric = evolve2(
            |t| two_level(1.0, omega_from_chi(t, &spec).unwrap()),
            0.0,
            tau,
            1e-3,
        )
        .unwrap();
        chi_worst = chi_worst.max(numeric.distance(&two_level_analytic(&spec, tau).unwrap()));
    }
    part(
        "chi analytic vs integration",
        chi_worst <= CHI_TOL,
        format!("max {chi_worst:.2e} over 20 specs"),
    );

    let mut sech_worst: f64 = 0.0;
    for _ in 0..20 {
        let sigma: f64 = rng.random_range(0.2..2.0);
        let n: f64 = rng.random_range(5.0..8.0);
        let delta = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let u = evolve2(
            |t| two_level(delta, sigma / (sigma * t - n * PI / 2.0).cosh()),
            0.0,
            n * PI / sigma,
            1e-3,
        )
        .unwrap();
        let theta = sech_two_level_phase(sigma, delta, n).unwrap();
        sech_worst = sech_worst.max(angle_gap(-u.matrix()[(0, 0)].arg(), theta));
    }
    part(
        "sech phase vs integration",
        sech_worst <= SECH_PHASE_TOL,
        format!("max {sech_worst:.2e} rad over 20 draws"),
    );

    let mut inv_worst: f64 = 0.0;
    for _ in 0..50 {
        let u = random_unitary(&mut rng);
        let (k1, k2) = (random_local(&mut rng), random_local(&mut rng));
        let dressed = Unitary4::new(k1.matrix() * u.matrix() * k2.matrix(), 1e-10).unwrap();
        let d = local_invariants(&u)
            .unwrap()
            .distance(&local_invariants(&dressed).unwrap());
        inv_worst = inv_worst.max(d);
    }
    part(
        "invariants under local dressing",
        inv_worst <= INVARIANT_TOL,
        format!("max {inv_worst:.2e} over 50 dressings"),
    );

    let mut trip_worst: f64 = 0.0;
    for k in 1..=100 {
        let theta = PI * k as f64 / 100.0;
        let (lo, hi) = validity_window(DEFAULT_N, theta, 1, Family::Two).unwrap();
        let m = 0.5 * (lo + hi);
        let alpha = alpha_solutions(m, DEFAULT_N, theta)
            .unwrap()
            .get(Branch::PLUS_2)
            .unwrap();
        trip_worst = trip_worst.max(angle_gap(
            theta_from_alpha(m, alpha, DEFAULT_N).unwrap(),
            theta,
        ));
    }
    part(
        "alpha-theta round trip",
        trip_worst <= ROUND_TRIP_TOL,
        format!("max {trip_worst:.2e} rad on 100 points"),
    );

    let entries = catalog(p).unwrap();
    let area = |tag: PulseTag| {
        let e = entries.iter().find(|e| e.tag == tag).unwrap();
        pulse_area(&e.envelope).unwrap()
    };
    let (area_a, area_c) = (area(PulseTag::A), area(PulseTag::C));
    let err_a = area_a / TWO_PI - 1.0;
    let err_c = area_c / PI - 1.0;
    part(
        "pulse areas (a) = 2pi, (c) = pi",
        err_a.abs() <= AREA_REL_TOL && err_c.abs() <= AREA_REL_TOL,
        format!(
            "(a) = {:.5} x 2pi, (c) = {:.5} x pi",
            area_a / TWO_PI,
            area_c / PI
        ),
    );

    let mut pt_worst: f64 = 0.0;
    let mut sech_envs: Vec<_> = entries
        .iter()
        .filter(|e| e.envelope.sech_params().is_some())
        .map(|e| e.envelope.clone())
        .collect();
    for theta in [PI / 16.0, PI / 8.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, PI] {
        sech_envs.push(design_cphase(theta, p).unwrap().drive.envelope);
    }
    for env in &sech_envs {
        let (_, n) = env.sech_params().unwrap();
        pt_worst =
            pt_worst.max((env.peak_amplitude() * env.duration() / (4.0 * n * PI) - 1.0).abs());
    }
    part(
        "peak x tau = 4 n pi",
        pt_worst <= PEAK_TAU_REL_TOL,
        format!(
            "max rel {pt_worst:.1e} over {} sech pulses",
            sech_envs.len()
        ),
    );

    let mut halving_worst: f64 = 0.0;
    for e in &entries {
        let design = GateDesign::new(
            DesignTag::ALL
                .into_iter()
                .find(|t| t.pulse() == e.tag)
                .unwrap(),
            p,
        )
        .unwrap();
        let d = step_halving_difference(p, &design.drive, DEFAULT_STEP).unwrap();
        halving_worst = halving_worst.max(d);
    }
    part(
        "step-halving convergence",
        halving_worst <= STEP_HALVING_TOL,
        format!(
            "max {halving_worst:.2e} over {} catalog gates",
            entries.len()
        ),
    );

    let failed: Vec<_> = parts
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(n, _)| n.as_str())
        .collect();
    Outcome {
        ok: failed.is_empty(),
        summary: if failed.is_empty() {
            format!("property suite: {} checks", parts.len())
        } else {
            format!("property suite: failed {}", failed.join(", "))
        },
    }
}

fn main() -> ExitCode {
    let p = default_params();
    let criteria: [fn(&DeviceParams) -> Outcome; 8] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (k, check) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = check(&p);
        println!(
            "{} criterion {}: {} [{:.1} s]",
            if out.ok { "PASS" } else { "FAIL" },
            k + 1,
            out.summary,
            t.elapsed().as_secs_f64()
        );
        if !out.ok {
            failures += 1;
        }
    }
    println!(
        "acceptance: {} of 8 criteria passed in {:.0} s",
        8 - failures,
        start.elapsed().as_secs_f64()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
