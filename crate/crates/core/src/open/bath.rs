use crate::error::{Error, Result};
use crate::mapping::BathSpec;

/// Ohmic profile `γ_j = γ0 ω_j exp(-ω_j / ω_c)`; `γ0` in 1/(fs·eV), `ω` in eV.
pub fn ohmic_couplings(gamma0: f64, omega_cut: f64, omegas: &[f64]) -> Result<Vec<f64>> {
    if !(omega_cut > 0.0 && omega_cut.is_finite()) {
        return Err(Error::InvalidParameter(format!("cutoff must be positive, got {omega_cut}")));
    }
    if !(gamma0 >= 0.0 && gamma0.is_finite()) {
        return Err(Error::InvalidParameter(format!("γ0 must be non-negative, got {gamma0}")));
    }
    Ok(omegas.iter().map(|&w| gamma0 * w * (-w / omega_cut).exp()).collect())
}

/// How the common rate of the broadband approximation is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CommonRate {
    Mean,
    Value(f64),
}

/// A zero-temperature bath with one common rate, and whether the
/// low-occupation premise holds for the source bath.
#[derive(Clone, Debug, PartialEq)]
pub struct BroadbandApprox {
    pub bath: BathSpec,
    /// False when any source occupation is `n̄ >= 1`.
    pub valid: bool,
}

/// One cooling laser for all modes: drops heating (`n̄ = 0`) and replaces
/// every `γ_j` by their mean.
pub fn broadband_cooling_approx(bath: &BathSpec) -> BroadbandApprox {
    broadband_cooling_approx_with(bath, CommonRate::Mean)
}

pub fn broadband_cooling_approx_with(bath: &BathSpec, rate: CommonRate) -> BroadbandApprox {
    let n = bath.n_modes();
    let g = match rate {
        CommonRate::Mean if n > 0 => bath.gamma.iter().sum::<f64>() / n as f64,
        CommonRate::Mean => 0.0,
        CommonRate::Value(v) => v,
    };
    BroadbandApprox {
        bath: BathSpec {
            gamma: vec![g; n],
            nbar: vec![0.0; n],
            temperature: Some(0.0),
        },
        valid: bath.nbar.iter().all(|&x| x < 1.0),
    }
}
