//! Rescaling and rewinding Trotter schemes on the mapped pyrazine model,
//! compared with exact propagation.

use std::path::Path;

use mqbsim::closed::{compare_schemes, mqb_partition, trotter_vs_exact, Scheme, TrotterPlan};
use mqbsim::mapping::{auto_roles, map_to_mqb};
use mqbsim::vibronic::franck_condon_state;
use mqbsim::{SpaceLayout, VCModel};

fn main() -> mqbsim::Result<()> {
    let model = VCModel::load(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/pyrazine.toml"))?;
    let layout = SpaceLayout::uniform(2, 2, 12)?;
    let params = map_to_mqb(&model, 1.0, &auto_roles(&model))?;
    let (h0, parts) = mqb_partition(&params, &layout, None)?;
    let psi = franck_condon_state(&layout, 1)?;
    let t_final = 100.0;

    let res = TrotterPlan::new(h0, parts, Scheme::Rescaling, 0.5)?;
    let rew = res.with_scheme(Scheme::Rewinding);
    for plan in [&res, &rew] {
        let (trot, exact) = trotter_vs_exact(plan, &psi, t_final, &layout)?;
        println!(
            "{:?}: max population error {:.4}, min fidelity {:.4}",
            plan.scheme,
            trot.max_population_difference(&exact)?,
            trot.min_fidelity().unwrap_or(f64::NAN)
        );
    }
    let c = compare_schemes(&res, &rew, &psi, t_final, &layout)?;
    println!("max |F_res - F_rew| = {:.4}", c.max_abs_difference);
    Ok(())
}
