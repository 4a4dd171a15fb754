//! Vibronic-coupling dynamics and their analog simulation on mixed
//! qudit-boson (MQB) hardware.
//!
//! The crate is organised bottom-up:
//!
//! - [`ops`]: sparse operators on a qudit ⊗ truncated-Fock product space and
//!   the action of `exp(-iHt)` on state vectors.
//! - [`vibronic`]: vibronic-coupling models, their Hamiltonians, the
//!   two-state Pauli parameterisation and displaced frames.
//! - [`mapping`]: translation of a model into MQB hardware parameters,
//!   scale-factor bounds, resource counts, thermal occupations and
//!   laser-cooling parameter inversion.
//! - [`closed`]: exact and analog-Trotterized pure-state propagation.
//! - [`open`]: Lindblad propagation with thermal baths and the
//!   single-cooling-laser approximation.
//! - [`harness`]: configuration files and the experiment runner behind the
//!   `mqbsim` binary.
//!
//! Energies are in eV and times in fs throughout; see [`HBAR_EV_FS`].

pub mod closed;
pub mod error;
pub mod harness;
pub mod mapping;
pub mod open;
pub mod ops;
pub mod trajectory;
pub mod vibronic;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use ops::{OperatorMatrix, SpaceLayout};
pub use trajectory::Trajectory;
pub use vibronic::VCModel;

/// Reduced Planck constant in eV·fs.
pub const HBAR_EV_FS: f64 = 0.658_211_956_9;

/// Boltzmann constant in eV/K.
pub const KB_EV_PER_K: f64 = 8.617_333_262e-5;

/// Reduced Planck constant in eV·s, for conversions to hardware SI units.
pub const HBAR_EV_S: f64 = HBAR_EV_FS * 1e-15;
