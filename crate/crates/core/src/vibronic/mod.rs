//! Vibronic-coupling models: definition, operator form, the two-state Pauli
//! parameterisation and displaced frames.

mod displacement;
mod hamiltonian;
pub mod model;
mod pauli;

pub use displacement::{displace_model, displace_state};
pub use hamiltonian::{build_hamiltonian, franck_condon_state};
#[allow(unused_imports)]
pub(crate) use hamiltonian::electronic_terms;
pub use model::{random_lvc, random_qvc, C2Entry, CoefMatrix, ModelFile, VCModel};
pub use pauli::{pauli_form, TwoStateLvcParams};
