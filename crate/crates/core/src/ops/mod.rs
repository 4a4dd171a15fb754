//! Operator algebra on the qudit ⊗ truncated-Fock product space.

pub mod expm;
pub mod fock;
mod layout;
mod matrix;

pub use expm::{expm_apply_with, matrix_exponential_apply, ExpmOptions, Propagator};
pub use fock::{
    annihilation, creation, embed, embed_product, momentum_p, number, position_q, qudit_projector,
    sigma_x, sigma_z,
};
pub use layout::SpaceLayout;
pub use matrix::{OperatorMatrix, DENSE_THRESHOLD, HERMITIAN_RTOL};

/// Default leakage warning threshold: population in a mode's top Fock level.
pub const LEAKAGE_WARN: f64 = 1e-4;
