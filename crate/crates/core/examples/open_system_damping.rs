//! Lindblad damping of the pyrazine population oscillations for increasing
//! ohmic coupling strength at zero temperature.

use std::path::Path;

use mqbsim::closed::time_grid;
use mqbsim::mapping::BathSpec;
use mqbsim::open::{ohmic_couplings, propagate_lindblad_pure};
use mqbsim::trajectory::Observer;
use mqbsim::vibronic::{build_hamiltonian, franck_condon_state};
use mqbsim::{SpaceLayout, VCModel};

fn main() -> mqbsim::Result<()> {
    let model = VCModel::load(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/pyrazine.toml"))?;
    let layout = SpaceLayout::uniform(2, 2, 8)?;
    let h = build_hamiltonian(&model, &layout)?;
    let psi = franck_condon_state(&layout, 1)?;
    let times = time_grid(100.0, 1.0)?;
    let obs = Observer::new(&layout)?;
    for gamma0 in [0.0, 0.05, 0.2] {
        let gamma = ohmic_couplings(gamma0, 0.1, model.omega())?;
        let bath = BathSpec::zero_temperature(gamma.clone())?;
        let tr = propagate_lindblad_pure(&psi, &h, &bath, &times, &obs)?;
        let p = tr.population(1);
        let late = &p[50..];
        let swing = late.iter().copied().fold(f64::MIN, f64::max) - late.iter().copied().fold(f64::MAX, f64::min);
        let trace = tr.trace_error.as_ref().map_or(0.0, |e| e.iter().copied().fold(0.0, f64::max));
        let g: Vec<String> = gamma.iter().map(|x| format!("{x:.2e}")).collect();
        println!("γ0 {gamma0:<5} γ_j [{}] /fs:", g.join(", "));
        println!("   S2 swing over 50-100 fs {swing:.4}, trace error {trace:.1e}");
    }
    Ok(())
}
