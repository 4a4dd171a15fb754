//! Maps the pyrazine model to a qudit-boson simulator, checks the
//! reconstruction identity and converts the couplings to laser drives.

use std::path::Path;

use mqbsim::mapping::{auto_roles, laser_drive_requirements, map_to_mqb, scale_factor_bounds, HardwareSpec};
use mqbsim::vibronic::build_hamiltonian;
use mqbsim::{OperatorMatrix, SpaceLayout, VCModel, C64, HBAR_EV_S};

fn main() -> mqbsim::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let model = VCModel::load(dir.join("pyrazine.toml"))?;
    let hw = HardwareSpec::load(dir.join("ion_trap.toml"))?;

    let bounds = scale_factor_bounds(300.0, &hw, 2, &model, 0.5)?;
    println!(
        "F_min {:.3e}, F_max1 {:.3e}, F_max2 {:.3e}, feasible {}",
        bounds.f_min, bounds.f_max1, bounds.f_max2, bounds.feasible
    );
    let f = bounds.recommended;
    let roles = auto_roles(&model);
    let params = map_to_mqb(&model, f, &roles)?;
    println!("roles {roles:?}");
    println!("δ = {:?}, χ = {:?}", params.delta, params.chi);

    let layout = SpaceLayout::uniform(2, 2, 6)?;
    let h = build_hamiltonian(&model, &layout)?;
    let shifted = h.add_scaled(&OperatorMatrix::identity(h.dim()), C64::new(-model.zero_point_energy(), 0.0))?;
    let sim = params.hamiltonian(&layout)?.scale_real(1.0 / f);
    println!("max |H_sim/F - (H - ZPE)| = {:.1e}", sim.add_scaled(&shifted, C64::new(-1.0, 0.0))?.max_abs());

    let drives = laser_drive_requirements(&params, &hw)?;
    for (j, row) in drives.theta.iter().enumerate() {
        let rad_s: Vec<String> = row.iter().map(|t| format!("{:.3e}", t / HBAR_EV_S)).collect();
        println!("mode {j}: drive Θ per state [{}] rad/s", rad_s.join(", "));
    }
    Ok(())
}
