//! Trotter infidelity against step size; the fitted slope is the error order.

use mqbsim::closed::{mqb_partition, trotter_error_scan, Scheme, TrotterPlan};
use mqbsim::mapping::{auto_roles, map_to_mqb};
use mqbsim::vibronic::{franck_condon_state, random_lvc};
use mqbsim::SpaceLayout;

fn main() -> mqbsim::Result<()> {
    let model = random_lvc(2, 2, 3);
    let layout = SpaceLayout::uniform(2, 2, 8)?;
    let params = map_to_mqb(&model, 1.0, &auto_roles(&model))?;
    let (h0, parts) = mqb_partition(&params, &layout, None)?;
    let psi = franck_condon_state(&layout, 1)?;
    let plan = TrotterPlan::new(h0, parts, Scheme::Rescaling, 0.1)?;
    let scan = trotter_error_scan(&plan, &[0.02, 0.05, 0.1, 0.2], 30.0, &psi, &layout)?;
    println!("{:>6} {:>12} {:>12}", "dt_fs", "pop_error", "1 - F_min");
    for r in &scan.rows {
        println!("{:>6} {:>12.3e} {:>12.3e}", r.dt, r.max_pop_error, 1.0 - r.min_fidelity);
    }
    match scan.fitted_order {
        Some(o) => println!("fitted order {o:.2}"),
        None => println!("fitted order undefined"),
    }
    Ok(())
}
