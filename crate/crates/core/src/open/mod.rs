//! Density-matrix propagation under the Lindblad master equation with
//! thermal per-mode baths.
//!
//! Rates are in 1/fs in the molecular frame, Hamiltonians in eV.

mod bath;
mod density;
mod integrator;
mod lindblad;

pub use bath::{broadband_cooling_approx, broadband_cooling_approx_with, ohmic_couplings, BroadbandApprox, CommonRate};
pub use density::DensityOperator;
pub use integrator::{propagate_lindblad, propagate_lindblad_pure, propagate_lindblad_with, LindbladOptions};
pub use lindblad::{lindblad_rhs, Liouvillian};
