//! Brute-force reference integrators used to cross-check the closed forms.
//!
//! [`lindblad`] integrates the master equation on a truncated Fock basis and
//! [`moments`] integrates the first and second moments of the classical
//! Fokker-Planck dynamics. Both use classic fixed-step RK4 so that runs are
//! bit-reproducible.

pub mod lindblad;
pub mod moments;

pub use lindblad::{
    build_operators, evolve, evolve_with_steps, lindblad_rhs, min_eigenvalue, observables,
    prepare_fock, prepare_gaussian, DensityMatrix, LadderOperators, Observables,
    DEFAULT_TRUNCATION,
};
pub use moments::{classical_moment_evolve, ClassicalMomentState};
