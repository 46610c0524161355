//! Closed-form relaxation of a harmonic oscillator coupled to a thermal bath
//! under the quantum-optical master equation, its classical Fokker-Planck
//! counterpart, and brute-force oracles for both.
//!
//! Natural units ħ = M = k_B = 1. Entropies are the negative log-purity
//! `S = -ln Tr ρ²`. Times in the entropy, phase and photon APIs are the
//! dimensionless product Γt; the coefficient APIs and the oracles take
//! physical time.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod model;
pub mod oracle;
pub mod photon;
pub mod roots;
pub mod special;

pub use error::{Error, Result};
pub use gaussian::{PhaseTag, QuadraticGcf, RelaxationPhase};
pub use model::{
    FockInitialState, GaussianInitialState, OscillatorParams, ThermalBath, TimeGrid, MAX_FOCK_N,
};
