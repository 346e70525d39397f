//! Fault-tolerance threshold estimates for CSS codes under repeated
//! post-selection.
//!
//! The crate is organised bottom-up:
//!
//! * [`pauli`] – one- and two-qubit Pauli labels and their commutation signs.
//! * [`pauli_algebra`] – diagonal Pauli channels, CNOT conjugation and
//!   measurement trace-outs, plus a dense superoperator cross-check.
//! * [`noise_models`] – the depolarizing, Knill, forward and independent CNOT
//!   noise families.
//! * [`postselect`] – the post-selection map, its fixed point and the noise
//!   left on a qubit after teleportation.
//! * [`codes`] – [[7,1,3]] and [[23,1,7]] machinery: distance classes, crash
//!   polynomials, degeneracy corrections and syndrome decompositions.
//! * [`threshold`] – entropy based bounds, Monte Carlo concatenation
//!   thresholds and the overhead estimates.
//! * [`cli`] – the command-line front end used by the `ftbound` binary.

pub mod cli;
pub mod codes;
pub mod error;
pub mod noise_models;
pub mod pauli;
pub mod pauli_algebra;
pub mod postselect;
pub mod threshold;

pub use error::{Error, Result};

/// Tolerance used for every validity check on probabilities and channels.
pub const VALIDITY_TOL: f64 = 1e-12;
