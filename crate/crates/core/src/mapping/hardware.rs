use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn default_alpha() -> f64 {
    0.4
}

/// Trapped-ion hardware limits. Times in s, frequencies in rad/s.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardwareSpec {
    /// Decoherence time.
    pub tau_d: f64,
    /// Largest achievable `Θ′` or `Ω′`.
    pub max_coupling: f64,
    /// Shortest realizable Trotter step.
    pub dt_sim_min: f64,
    /// Lamb-Dicke parameters, per mode.
    pub eta: Vec<f64>,
    /// Debye-Waller factors, per mode.
    pub debye_waller: Vec<f64>,
    /// Angular factor of spontaneous emission.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Trap frequencies `ω^ion`, per mode.
    pub trap_freq: Vec<f64>,
    /// Allowed cooling linewidths `[Γ_min, Γ_max]`, per mode.
    pub gamma_range: Vec<[f64; 2]>,
    /// Allowed carrier Rabi frequencies `[Ω0_min, Ω0_max]`.
    pub omega0_range: [f64; 2],
}

impl HardwareSpec {
    /// A two-mode trap with typical magnitudes.
    pub fn example() -> Self {
        let two_pi = std::f64::consts::TAU;
        Self {
            tau_d: 10e-3,
            max_coupling: two_pi * 20e3,
            dt_sim_min: 1e-6,
            eta: vec![0.1, 0.1],
            debye_waller: vec![1.0, 1.0],
            alpha: 0.4,
            trap_freq: vec![two_pi * 3e6, two_pi * 3.5e6],
            gamma_range: vec![[two_pi * 1e3, two_pi * 20e6]; 2],
            omega0_range: [two_pi * 10.0, two_pi * 2e6],
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let hw: Self = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            reason: e.message().to_string(),
        })?;
        hw.validate()?;
        Ok(hw)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(format!("hardware: {what}")));
        for (name, v) in [
            ("tau_d", self.tau_d),
            ("max_coupling", self.max_coupling),
            ("dt_sim_min", self.dt_sim_min),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(&format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(&format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        for (name, list) in [
            ("eta", &self.eta),
            ("debye_waller", &self.debye_waller),
            ("trap_freq", &self.trap_freq),
        ] {
            if let Some((j, v)) = list.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
                return bad(&format!("{name}[{j}] must be positive, got {v}"));
            }
        }
        for (j, r) in self.gamma_range.iter().enumerate() {
            if !(r[0] > 0.0 && r[1] >= r[0]) {
                return bad(&format!("gamma_range[{j}] must satisfy 0 < lo <= hi"));
            }
        }
        let r = self.omega0_range;
        if !(r[0] > 0.0 && r[1] >= r[0]) {
            return bad("omega0_range must satisfy 0 < lo <= hi");
        }
        Ok(())
    }

    /// Checks that per-mode lists cover `n_modes` modes.
    pub fn check_modes(&self, n_modes: usize) -> Result<()> {
        for (name, len) in [
            ("eta", self.eta.len()),
            ("debye_waller", self.debye_waller.len()),
            ("trap_freq", self.trap_freq.len()),
            ("gamma_range", self.gamma_range.len()),
        ] {
            if len < n_modes {
                return Err(Error::InvalidParameter(format!(
                    "hardware: {name} has {len} entries for {n_modes} modes"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_is_valid_and_roundtrips() {
        let hw = HardwareSpec::example();
        hw.validate().unwrap();
        let text = toml::to_string(&hw).unwrap();
        let back: HardwareSpec = toml::from_str(&text).unwrap();
        assert_eq!(back, hw);
        assert!(hw.check_modes(2).is_ok());
        assert!(hw.check_modes(3).is_err());
    }

    #[test]
    fn alpha_defaults_and_bounds() {
        let mut hw = HardwareSpec::example();
        let mut v = toml::Value::try_from(&hw).unwrap();
        v.as_table_mut().unwrap().remove("alpha");
        let parsed: HardwareSpec = v.try_into().unwrap();
        assert_eq!(parsed.alpha, 0.4);
        hw.alpha = 1.5;
        assert!(hw.validate().is_err());
        hw.alpha = 1.0;
        hw.eta[1] = -0.1;
        assert!(hw.validate().is_err());
    }
}
