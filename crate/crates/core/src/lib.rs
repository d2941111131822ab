//! Preparation of two-spin-½ states in Schmidt form.
//!
//! * [`heisenberg`]: free evolution under isotropic exchange followed by
//!   instantaneous single-spin pulses.
//! * [`schmidt`]: Schmidt decomposition and the inverse problem (target state
//!   to pulse plan).
//! * [`donor`]: electron–nuclear spin pair with hyperfine coupling in a
//!   uniform field.
//! * [`entangler`]: field and time that produce a maximally entangled state.
//! * [`gate_fidelity`]: trace fidelity against the entangling gate.
//! * [`cli`]: command-line front end and run records.
//!
//! Units: ħ = 1 and every frequency-like quantity is a plain number in s⁻¹
//! used directly in exponents; times are in seconds, fields in tesla.

pub mod cli;
pub mod constants;
pub mod donor;
pub mod entangler;
pub mod error;
pub mod gate_fidelity;
pub mod heisenberg;
pub mod optimize;
pub mod qmath;
pub mod schmidt;
pub mod state;

pub use error::{Error, Result};
pub use heisenberg::{prepare, PreparationPlan, PulseParams};
pub use schmidt::{decompose, synthesize, SchmidtForm, SynthesisResult};
pub use state::{SingleQubitState, TwoQubitState};
