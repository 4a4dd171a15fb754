//! Translates a molecular thermal bath into trapped-ion sideband-cooling
//! parameters and checks the forward rates.

use std::path::Path;

use mqbsim::mapping::{equivalent_temperature, sideband_rates, solve_cooling_params, BathSpec, HardwareSpec};
use mqbsim::open::ohmic_couplings;
use mqbsim::VCModel;

fn main() -> mqbsim::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let model = VCModel::load(dir.join("pyrazine.toml"))?;
    let hw = HardwareSpec::load(dir.join("ion_trap.toml"))?;
    let gamma = ohmic_couplings(0.06, 0.1, model.omega())?;
    let bath = BathSpec::thermal(gamma, model.omega(), 300.0)?;
    // a slow simulator keeps the target rates inside the laser linewidth range
    let f = 1e-13;
    let rates = bath.simulator_rates(f);
    for mode in 0..model.n_modes() {
        let t_ion = equivalent_temperature(model.omega()[mode], 300.0, hw.trap_freq[mode]);
        let sol = solve_cooling_params(rates[mode], bath.nbar[mode], &hw, mode)?;
        let r = sideband_rates(&sol.params, hw.eta[mode], hw.trap_freq[mode], hw.alpha);
        println!(
            "mode {mode}: target γ {:.3} /s n̄ {:.4} (T_ion {:.1} µK) -> Δ {:.3e}, Γ {:.3e}, Ω0 {:.3e} rad/s; achieved γ {:.3}, n̄ {:.4}",
            rates[mode],
            bath.nbar[mode],
            t_ion * 1e6,
            sol.params.detuning,
            sol.params.linewidth,
            sol.params.rabi,
            r.gamma(),
            r.nbar()
        );
    }
    Ok(())
}
