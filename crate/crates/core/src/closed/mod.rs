//! Pure-state propagation: exact, and with the rescaling and rewinding
//! analog Trotter schemes.
//!
//! Hamiltonians are in eV and times in fs; propagators use `exp(-iHt/ħ)`.

mod exact;
pub(crate) use exact::check_times;
mod scan;
mod trotter;

pub use exact::{fidelity, normalized_state, propagate_exact, propagate_exact_with, step_count, time_grid};
pub use scan::{compare_schemes, fit_slope, trotter_error_scan, ScanResult, ScanRow, SchemeComparison};
pub use trotter::{mqb_partition, propagate_trotter, trotter_vs_exact, Scheme, TrotterPlan};
