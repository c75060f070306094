//! Quantum frequency estimation of stochastic AC fields.
//!
//! A probe coupled to `[A cos(ωt) + B sin(ωt)] σ_z` with Gaussian amplitudes
//! accumulates a Gaussian phase whose variance depends on ω. This crate
//! evaluates that phase law, the classical Fisher information bound it
//! implies, and the quantum Fisher information of several probe states
//! (qubit, GHZ, Dicke superposition) under the resulting dephasing, with and
//! without pulse control.
//!
//! ```
//! use acfreq_core::phase_model::{phase_distribution, Protocol, SignalSpec, Theta};
//! use acfreq_core::bounds::bound_single_freq;
//!
//! let spec = SignalSpec::single(1.0, 1.0).unwrap();
//! let law = phase_distribution(&spec, Protocol::Free, 0.7, Theta::Omega).unwrap();
//! let bound = bound_single_freq(1.0, 0.7, 1.0).unwrap();
//! assert!(law.variance() > 0.0 && bound.value > 0.0);
//! ```

pub mod bounds;
pub mod brute_force;
pub mod coherent_control;
pub mod error;
pub mod exec;
pub mod montecarlo;
pub mod phase_model;
pub mod probe_states;
pub mod qfi_engine;
pub mod quadrature;
pub mod sweeps;

pub use error::{Error, Result};
pub use exec::Execution;
