//! Analytic pulse design and verification of two-qubit gates for two
//! exchange-coupled electron spins in a silicon double quantum dot.
//!
//! Pulses are designed from rotating-frame block models, simulated under the
//! interaction-picture Hamiltonian with the counter-rotating terms kept, and
//! scored by gate fidelity, local invariants and quasistatic-noise Monte Carlo.

pub mod analysis;
pub mod cphase;
pub mod designs;
pub mod envelopes;
pub mod error;
pub mod linalg;
pub mod model;
pub mod noise;
pub mod propagator;
pub mod quadrature;
mod simplex;

pub use error::{Error, Result};
pub use model::{default_params, DeviceParams, DriveSpec};
pub use propagator::{Unitary2, Unitary4};
