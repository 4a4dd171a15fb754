//! Removing the state-averaged tuning term by a coordinate shift leaves the
//! electronic dynamics unchanged.

use std::path::Path;

use mqbsim::closed::{propagate_exact, time_grid};
use mqbsim::vibronic::{build_hamiltonian, displace_model, displace_state, franck_condon_state, pauli_form};
use mqbsim::{SpaceLayout, VCModel};

fn main() -> mqbsim::Result<()> {
    let model = VCModel::load(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/pyrazine.toml"))?;
    let p = pauli_form(&model)?;
    let beta = p.kappa_bar[0] / model.omega()[0];
    println!("κ̄ = {:.4} eV, β = {beta:.4}", p.kappa_bar[0]);

    let shifted = displace_model(&model, 0, beta)?;
    println!("κ̄ after shift = {:.1e} eV", pauli_form(&shifted)?.kappa_bar[0]);

    let layout = SpaceLayout::uniform(2, 2, 28)?;
    let psi = franck_condon_state(&layout, 1)?;
    let times = time_grid(100.0, 5.0)?;
    let a = propagate_exact(&build_hamiltonian(&model, &layout)?, &psi, &times, &layout)?;
    let psid = displace_state(&psi, 0, beta, &layout)?;
    let b = propagate_exact(&build_hamiltonian(&shifted, &layout)?, &psid, &times, &layout)?;
    println!("max population difference {:.1e}", a.max_population_difference(&b)?);
    Ok(())
}
