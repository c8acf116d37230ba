//! Device parameters and the Hamiltonians of the two-spin double quantum dot.
//!
//! All frequencies are stored as angular frequencies (rad/s) and times in
//! seconds. Basis ordering is `{↑↑, ↓↑, ↑↓, ↓↓}` with the left spin written
//! first, so the left spin is the fastest-varying index and two-qubit
//! operators factor as `right ⊗ left`.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector4};
use serde::{Deserialize, Serialize};

use crate::envelopes::Envelope;
use crate::error::{Error, Result};
use crate::linalg::{c, hermiticity_residual, Mat2, Mat4, C64};

pub const TWO_PI: f64 = 2.0 * PI;

/// Exchange-to-splitting ratio above which the leading-order expansions in
/// `J / (ΔE_z + ΔE_z^1)` are flagged as questionable.
pub const WEAK_COUPLING_WARNING_RATIO: f64 = 0.3;

/// Cyclic MHz to rad/s.
#[inline]
pub fn mhz(value: f64) -> f64 {
    value * 1e6 * TWO_PI
}

/// rad/s to cyclic MHz.
#[inline]
pub fn to_mhz(omega: f64) -> f64 {
    omega / (1e6 * TWO_PI)
}

#[inline]
pub fn ns(value: f64) -> f64 {
    value * 1e-9
}

#[inline]
pub fn to_ns(t: f64) -> f64 {
    t * 1e9
}

/// Static device frequencies, all angular (rad/s). `phi` is the carrier phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceParams {
    pub bz_ext: f64,
    pub delta_ez: f64,
    pub bz_l0: f64,
    pub by_l0: f64,
    pub by_r0: f64,
    pub j: f64,
    pub ez1: f64,
    pub delta_ez1: f64,
    pub phi: f64,
}

/// On-disk form of [`DeviceParams`]: cyclic MHz, phase in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceParamsFile {
    pub bz_ext: f64,
    pub delta_ez: f64,
    pub bz_l0: f64,
    pub by_l0: f64,
    pub by_r0: f64,
    pub j: f64,
    pub ez1: f64,
    pub delta_ez1: f64,
    pub phi: f64,
}

impl DeviceParams {
    /// Builds parameters from cyclic values in MHz (the `X/2π` numbers).
    pub fn from_cyclic_mhz(file: DeviceParamsFile) -> Result<Self> {
        let p = Self {
            bz_ext: mhz(file.bz_ext),
            delta_ez: mhz(file.delta_ez),
            bz_l0: mhz(file.bz_l0),
            by_l0: mhz(file.by_l0),
            by_r0: mhz(file.by_r0),
            j: mhz(file.j),
            ez1: mhz(file.ez1),
            delta_ez1: mhz(file.delta_ez1),
            phi: file.phi,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn to_cyclic_mhz(&self) -> DeviceParamsFile {
        DeviceParamsFile {
            bz_ext: to_mhz(self.bz_ext),
            delta_ez: to_mhz(self.delta_ez),
            bz_l0: to_mhz(self.bz_l0),
            by_l0: to_mhz(self.by_l0),
            by_r0: to_mhz(self.by_r0),
            j: to_mhz(self.j),
            ez1: to_mhz(self.ez1),
            delta_ez1: to_mhz(self.delta_ez1),
            phi: self.phi,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DeviceParamsFile = serde_json::from_str(text)?;
        Self::from_cyclic_mhz(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_cyclic_mhz()).expect("plain struct serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.bz_ext,
            self.delta_ez,
            self.bz_l0,
            self.by_l0,
            self.by_r0,
            self.j,
            self.ez1,
            self.delta_ez1,
            self.phi,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("device parameter".into()));
        }
        if self.j <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "exchange J must be positive, got {:e}",
                self.j
            )));
        }
        if self.splitting() <= 0.0 {
            return Err(Error::InvalidParameter(
                "delta_ez + delta_ez1 must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Human-readable warnings for parameter sets outside the weak-exchange regime.
    pub fn warnings(&self) -> Vec<String> {
        let ratio = self.j / self.splitting();
        if ratio > WEAK_COUPLING_WARNING_RATIO {
            vec![format!(
                "J/(ΔE_z+ΔE_z^1) = {ratio:.3} exceeds {WEAK_COUPLING_WARNING_RATIO}; leading-order expansions may be inaccurate"
            )]
        } else {
            Vec::new()
        }
    }

    pub fn bz_r0(&self) -> f64 {
        self.bz_l0 + self.delta_ez
    }

    /// Average Zeeman splitting `E_z`.
    pub fn ez(&self) -> f64 {
        self.bz_ext + (self.bz_r0() + self.bz_l0) / 2.0
    }

    /// `ΔE_z + ΔE_z^1`, the exchange-on splitting between the dots.
    pub fn splitting(&self) -> f64 {
        self.delta_ez + self.delta_ez1
    }

    /// Second-order exchange shift `J² / 2(ΔE_z + ΔE_z^1)`.
    pub fn exchange_shift(&self) -> f64 {
        self.j * self.j / (2.0 * self.splitting())
    }

    /// Copy with a different exchange, keeping the Zeeman shifts.
    pub fn with_j(&self, j: f64) -> Self {
        Self { j, ..*self }
    }
}

impl Default for DeviceParams {
    fn default() -> Self {
        default_params()
    }
}

/// Device parameters of the Si double-dot experiment the designs are built for.
///
/// The right-dot drive amplitude is tied to the left one
/// (`B_{y,R}^1(t) = B_{y,L}^1(t)`), which is how every [`Envelope`] is applied.
pub fn default_params() -> DeviceParams {
    DeviceParams::from_cyclic_mhz(DeviceParamsFile {
        bz_ext: 14_000.0,
        delta_ez: 214.0,
        bz_l0: 4_287.0,
        by_l0: 5.0,
        by_r0: 55.0,
        j: 19.7,
        ez1: 29.23,
        delta_ez1: -46.94,
        phi: 3.0 * PI / 2.0,
    })
    .expect("default parameters are valid")
}

/// A 4×4 Hamiltonian in the `{↑↑, ↓↑, ↑↓, ↓↓}` basis (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hamiltonian4(pub Mat4);

impl Hamiltonian4 {
    pub const BASIS: [&'static str; 4] = ["↑↑", "↓↑", "↑↓", "↓↓"];

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        hermiticity_residual(&self.0) <= rel_tol
    }
}

/// Carrier, carrier phase and envelope of the microwave drive during a gate.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveSpec {
    pub carrier: f64,
    pub phase: f64,
    pub envelope: Envelope,
}

impl DriveSpec {
    pub fn new(carrier: f64, phase: f64, envelope: Envelope) -> Self {
        Self {
            carrier,
            phase,
            envelope,
        }
    }

    /// Drive using the device's carrier phase.
    pub fn for_device(params: &DeviceParams, carrier: f64, envelope: Envelope) -> Self {
        Self::new(carrier, params.phi, envelope)
    }

    pub fn duration(&self) -> f64 {
        self.envelope.duration()
    }
}

/// Static diabatic Hamiltonian with exchange `j`. The exchange-induced Zeeman
/// shifts are switched on with the exchange and vanish at `j = 0`.
pub fn h0(params: &DeviceParams, j: f64) -> Result<Hamiltonian4> {
    if !(j >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "exchange must be nonnegative, got {j:e}"
        )));
    }
    let (ez1, dez1) = shifts_for(params, j);
    let ez = params.ez();
    let dez = params.delta_ez;
    let mut m = Mat4::zeros();
    m[(0, 0)] = c(ez + ez1, 0.0);
    m[(1, 1)] = c(0.5 * (dez + dez1 - j), 0.0);
    m[(2, 2)] = c(0.5 * (-dez - dez1 - j), 0.0);
    m[(3, 3)] = c(-ez - ez1, 0.0);
    m[(1, 2)] = c(j / 2.0, 0.0);
    m[(2, 1)] = c(j / 2.0, 0.0);
    Ok(Hamiltonian4(m))
}

fn shifts_for(params: &DeviceParams, j: f64) -> (f64, f64) {
    if j > 0.0 {
        (params.ez1, params.delta_ez1)
    } else {
        (0.0, 0.0)
    }
}

/// Closed-form eigenvalues of [`h0`] in the order `↑↑, ↓̃↑, ↑̃↓, ↓↓`.
pub fn adiabatic_energies(params: &DeviceParams, j: f64) -> Result<[f64; 4]> {
    if !(j >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "exchange must be nonnegative, got {j:e}"
        )));
    }
    let (ez1, dez1) = shifts_for(params, j);
    let split = params.delta_ez + dez1;
    let radical = (split * split + j * j).sqrt();
    let ez = params.ez();
    Ok([
        ez + ez1,
        0.5 * (-j + radical),
        0.5 * (-j - radical),
        -ez - ez1,
    ])
}

/// Hybridization of the antiparallel states: eigenvectors of the middle block
/// of [`h0`], columns ordered as (`↓̃↑`, `↑̃↓`).
pub fn antiparallel_mixing(params: &DeviceParams, j: f64) -> Result<Mat2> {
    let h = h0(params, j)?;
    let block = Matrix2::new(
        h.0[(1, 1)].re,
        h.0[(1, 2)].re,
        h.0[(2, 1)].re,
        h.0[(2, 2)].re,
    );
    let eig = block.symmetric_eigen();
    let (hi, lo) = if eig.eigenvalues[0] >= eig.eigenvalues[1] {
        (0, 1)
    } else {
        (1, 0)
    };
    let mut out = Mat2::zeros();
    for (col, src) in [hi, lo].into_iter().enumerate() {
        // sign convention: the diagonal overlap is positive
        let sign = eig.eigenvectors[(col, src)].signum();
        for r in 0..2 {
            out[(r, col)] = c(eig.eigenvectors[(r, src)] * sign, 0.0);
        }
    }
    Ok(out)
}

/// Block resonance frequencies `(ω₁, ω₂)` of the rotating-frame Hamiltonian.
pub fn block_resonances(params: &DeviceParams) -> (f64, f64) {
    let base = params.ez() + params.ez1;
    let split = params.splitting();
    let shift = params.exchange_shift();
    let omega1 = base - 0.5 * (split - params.j + shift);
    let omega2 = base - 0.5 * (split + params.j + shift);
    (omega1, omega2)
}

/// Precomputed interaction-picture Hamiltonian for one drive.
///
/// The frame is `H₀(J = 0)`; the counter-rotating drive terms are kept.
#[derive(Debug, Clone)]
pub struct InteractionHamiltonian {
    diag: [f64; 4],
    by_l0: f64,
    by_r0: f64,
    /// `J / 2(ΔE_z + ΔE_z^1)`
    mix: f64,
    /// frequency of the left-spin transitions in the frame, `-(ΔE_z - 2E_z)/2`
    nu_left: f64,
    /// frequency of the right-spin transitions in the frame, `(ΔE_z + 2E_z)/2`
    nu_right: f64,
    carrier: f64,
    phase: f64,
    envelope: Envelope,
}

impl InteractionHamiltonian {
    pub fn new(params: &DeviceParams, drive: &DriveSpec) -> Self {
        let split = params.splitting();
        let shift = params.exchange_shift();
        let ez = params.ez();
        Self {
            diag: [
                params.ez1,
                0.5 * (params.delta_ez1 - params.j + shift),
                -0.5 * (params.delta_ez1 + params.j + shift),
                -params.ez1,
            ],
            by_l0: params.by_l0,
            by_r0: params.by_r0,
            mix: params.j / (2.0 * split),
            nu_left: -0.5 * (params.delta_ez - 2.0 * ez),
            nu_right: 0.5 * (params.delta_ez + 2.0 * ez),
            carrier: drive.carrier,
            phase: drive.phase,
            envelope: drive.envelope.clone(),
        }
    }

    pub fn duration(&self) -> f64 {
        self.envelope.duration()
    }

    /// The (time-independent) diagonal.
    pub fn diagonal(&self) -> [f64; 4] {
        self.diag
    }

    #[inline]
    pub fn at(&self, t: f64) -> Mat4 {
        let drive = self.envelope.amplitude(t) * (self.carrier * t + self.phase).cos();
        let by_l = self.by_l0 + drive;
        let by_r = self.by_r0 + drive;
        // B_{y,L} Δ±^(1) and B_{y,R} Δ±^(2), written without the division by B
        let l_plus = by_l + self.mix * by_r;
        let l_minus = by_l - self.mix * by_r;
        let r_plus = by_r + self.mix * by_l;
        let r_minus = by_r - self.mix * by_l;
        let (sl, cl) = (self.nu_left * t).sin_cos();
        let (sr, cr) = (self.nu_right * t).sin_cos();
        // -i (b/2) e^{iνt}
        let coupling = |b: f64, cosv: f64, sinv: f64| c(0.5 * b * sinv, -0.5 * b * cosv);
        let h12 = coupling(l_plus, cl, sl);
        let h13 = coupling(r_minus, cr, sr);
        let h24 = coupling(r_plus, cr, sr);
        let h34 = coupling(l_minus, cl, sl);
        let z = C64::new(0.0, 0.0);
        let d = &self.diag;
        Mat4::new(
            c(d[0], 0.0),
            h12,
            h13,
            z,
            h12.conj(),
            c(d[1], 0.0),
            z,
            h24,
            h13.conj(),
            z,
            c(d[2], 0.0),
            h34,
            z,
            h24.conj(),
            h34.conj(),
            c(d[3], 0.0),
        )
    }
}

/// Interaction-picture Hamiltonian at time `t` for the given drive.
pub fn h_int(params: &DeviceParams, drive: &DriveSpec, t: f64) -> Result<Hamiltonian4> {
    let duration = drive.duration();
    if !(0.0..=duration).contains(&t) {
        return Err(Error::OutsideWindow { t, duration });
    }
    Ok(Hamiltonian4(
        InteractionHamiltonian::new(params, drive).at(t),
    ))
}

fn require_design_phase(params: &DeviceParams) -> Result<()> {
    let target = 1.5 * PI;
    let diff = (params.phi - target).rem_euclid(TWO_PI);
    if diff.min(TWO_PI - diff) > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "the rotating-frame Hamiltonian is derived for phi = 3π/2, got {}",
            params.phi
        )));
    }
    Ok(())
}

/// `(δ₊, δ₋)` for equal left and right drive amplitudes.
pub fn equal_drive_deltas(params: &DeviceParams) -> (f64, f64) {
    let k = params.j / (2.0 * params.splitting());
    (1.0 + k, 1.0 - k)
}

/// Rotating-frame Hamiltonian under the rotating-wave approximation, for equal
/// left/right drive amplitude `envelope_value` and carrier `omega`. Only used
/// for design reasoning; gates are always scored with [`h_int`].
pub fn h_rot(params: &DeviceParams, envelope_value: f64, omega: f64) -> Result<Hamiltonian4> {
    require_design_phase(params)?;
    let (dp, dm) = equal_drive_deltas(params);
    let split = params.splitting();
    let shift = params.exchange_shift();
    let base = params.ez() + params.ez1;
    let b4 = envelope_value / 4.0;
    let mut m = Mat4::zeros();
    m[(0, 0)] = c(base - omega, 0.0);
    m[(1, 1)] = c(0.5 * (split - params.j + shift), 0.0);
    m[(2, 2)] = c(-0.5 * (split + params.j + shift), 0.0);
    m[(3, 3)] = c(omega - base, 0.0);
    let set = |m: &mut Mat4, r: usize, col: usize, v: f64| {
        m[(r, col)] = c(v, 0.0);
        m[(col, r)] = c(v, 0.0);
    };
    set(&mut m, 0, 1, b4 * dp); // left drive, δ₊^(1)
    set(&mut m, 0, 2, b4 * dm); // right drive, δ₋^(2)
    set(&mut m, 1, 3, b4 * dp); // right drive, δ₊^(2)
    set(&mut m, 2, 3, b4 * dm); // left drive, δ₋^(1)
    Ok(Hamiltonian4(m))
}

/// The two decoupled 2×2 blocks of [`h_rot`] once the right-dot drive terms are
/// dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockPair {
    /// span {↑↑, ↓̃↑}
    pub s1: Mat2,
    /// span {↑̃↓, ↓↓}
    pub s2: Mat2,
    pub omega1: f64,
    pub omega2: f64,
}

pub fn block_pair(params: &DeviceParams, envelope_value: f64, omega: f64) -> Result<BlockPair> {
    let h = h_rot(params, envelope_value, omega)?.0;
    let s1 = Mat2::new(h[(0, 0)], h[(0, 1)], h[(1, 0)], h[(1, 1)]);
    let s2 = Mat2::new(h[(2, 2)], h[(2, 3)], h[(3, 2)], h[(3, 3)]);
    let (omega1, omega2) = block_resonances(params);
    Ok(BlockPair {
        s1,
        s2,
        omega1,
        omega2,
    })
}

/// Resonant block model: `S₁` driven on resonance with no detuning, `S₂`
/// detuned by `±j/2`, both with coupling `envelope_value / 4`.
pub fn block_model(j: f64, envelope_value: f64) -> Mat4 {
    let b4 = c(envelope_value / 4.0, 0.0);
    let z = C64::new(0.0, 0.0);
    Mat4::new(
        z,
        b4,
        z,
        z,
        b4,
        z,
        z,
        z,
        z,
        z,
        c(-j / 2.0, 0.0),
        b4,
        z,
        z,
        b4,
        c(j / 2.0, 0.0),
    )
}

/// Numerical eigenvalues of a Hermitian 4×4, ascending.
pub fn eigenvalues_hermitian(h: &Hamiltonian4) -> Vector4<f64> {
    let mut v = h.0.symmetric_eigenvalues();
    v.as_mut_slice().sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}
