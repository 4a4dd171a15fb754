//! Translation of vibronic models into mixed qudit-boson simulator
//! parameters, scale-factor bounds, resource counts, thermal occupations and
//! laser-cooling parameter inversion.

mod bounds;
mod cooling;
mod hardware;
mod mqb;
mod resources;
mod thermal;

pub use bounds::{scale_factor_bounds, ScaleBounds};
pub use cooling::{
    sideband_rates, solve_cooling_params, CoolingParams, CoolingSolution, SidebandRates, MAX_RABI_RATIO,
};
pub use hardware::HardwareSpec;
pub use mqb::{auto_roles, laser_drive_requirements, map_to_mqb, DrivePhases, DriveStrengths, ModeRole, MqbParams};
pub use resources::{
    interaction_count, resource_estimate, resource_estimate_with_basis, InteractionCount, ResourceReport,
    DEFAULT_BASIS, MODES_PER_ION, MODES_PER_RESONATOR, QUBITS_PER_MODE,
};
pub use thermal::{bose_einstein, equivalent_temperature, BathSpec};
