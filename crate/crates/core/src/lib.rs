//! Simulation of single-qutrit permutation-parity detection at two levels.
//!
//! * [`oracle`]: the gate-level algorithm. Fourier transform, one query of a
//!   permutation oracle, inverse transform, and a classical cross-check.
//! * [`spin`]: a spin-1 (deuterium) NMR model with quadrupolar splitting,
//!   ideal selective and non-selective pulses, delays and crusher gradients.
//! * [`compiler`]: gate to pulse-sequence compilation with global-phase
//!   invariant fidelity checks and a simplex optimizer for free pulse phases.
//! * [`spectro`]: detection pulse, FID synthesis, spectrum, peak picking and
//!   the even/odd verdict from the line pattern.
//! * [`experiment`]: configured runs, sweeps and compilations that write
//!   plot-ready files. The `qutrit-parity` binary is a thin wrapper over it.
//!
//! See `examples/` for one runnable program per capability.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compiler;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod optimize;
pub mod oracle;
pub mod spectro;
pub mod spin;

pub use error::{Error, Result};
pub use linalg::{
    apply_unitary, dagger, equal_up_to_global_phase, DensityKind, DensityMatrix, Level, Operator3,
    QutritState, Tolerance, C64,
};
pub use oracle::{
    classify_final_state, compose, fourier, fourier3, parity_by_counting, parse_cauchy,
    run_parity_algorithm, unitary_of, AlgorithmTrace, Parity, PermutationMap,
};
