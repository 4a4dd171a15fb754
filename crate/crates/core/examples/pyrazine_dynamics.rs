//! Exact closed dynamics of the bundled two-mode pyrazine model from the
//! Franck-Condon state on the upper electronic state.

use std::path::Path;

use mqbsim::closed::{propagate_exact, time_grid};
use mqbsim::vibronic::{build_hamiltonian, franck_condon_state};
use mqbsim::{SpaceLayout, VCModel};

fn main() -> mqbsim::Result<()> {
    let model = VCModel::load(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/pyrazine.toml"))?;
    let layout = SpaceLayout::uniform(model.d(), model.n_modes(), 16)?;
    let h = build_hamiltonian(&model, &layout)?;
    let psi = franck_condon_state(&layout, 1)?;
    let times = time_grid(200.0, 10.0)?;
    let tr = propagate_exact(&h, &psi, &times, &layout)?;
    println!("{:>8} {:>8} {:>8}", "t_fs", "P(S1)", "P(S2)");
    for (k, t) in tr.times.iter().enumerate() {
        println!("{t:>8.1} {:>8.4} {:>8.4}", tr.populations[k][0], tr.populations[k][1]);
    }
    println!("population sum error {:.1e}", tr.max_population_sum_error());
    Ok(())
}
