use crate::error::{Error, Result};
use crate::{HBAR_EV_S, KB_EV_PER_K};

/// Bose-Einstein occupation `1 / (exp(ω / k_B T) - 1)`, `ω` in eV, `T` in K.
pub fn bose_einstein(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter(format!("frequency must be positive, got {omega}")));
    }
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(Error::InvalidParameter(format!("temperature must be non-negative, got {temperature}")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (omega / (KB_EV_PER_K * temperature)).exp_m1())
}

/// Temperature giving a mode at `omega_sim_rad_s` the same occupation as a
/// molecular mode `omega_mol` (eV) at `t_mol` (K).
pub fn equivalent_temperature(omega_mol: f64, t_mol: f64, omega_sim_rad_s: f64) -> f64 {
    t_mol * omega_sim_rad_s * HBAR_EV_S / omega_mol
}

/// Per-mode bath: damping rates `γ_j` in 1/fs (molecular frame) and
/// occupations `n̄_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct BathSpec {
    pub gamma: Vec<f64>,
    pub nbar: Vec<f64>,
    /// Temperature the occupations were derived from, if any.
    pub temperature: Option<f64>,
}

impl BathSpec {
    pub fn new(gamma: Vec<f64>, nbar: Vec<f64>) -> Result<Self> {
        let bath = Self {
            gamma,
            nbar,
            temperature: None,
        };
        bath.validate()?;
        Ok(bath)
    }

    /// Thermal occupations of modes `omega` (eV) at `temperature` (K).
    pub fn thermal(gamma: Vec<f64>, omega: &[f64], temperature: f64) -> Result<Self> {
        let nbar = omega
            .iter()
            .map(|&w| bose_einstein(w, temperature))
            .collect::<Result<Vec<_>>>()?;
        let mut bath = Self::new(gamma, nbar)?;
        bath.temperature = Some(temperature);
        Ok(bath)
    }

    pub fn zero_temperature(gamma: Vec<f64>) -> Result<Self> {
        let n = gamma.len();
        let mut bath = Self::new(gamma, vec![0.0; n])?;
        bath.temperature = Some(0.0);
        Ok(bath)
    }

    pub fn n_modes(&self) -> usize {
        self.gamma.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma.len() != self.nbar.len() {
            return Err(Error::InvalidParameter(format!(
                "bath has {} rates but {} occupations",
                self.gamma.len(),
                self.nbar.len()
            )));
        }
        if let Some((j, g)) = self.gamma.iter().enumerate().find(|(_, g)| !(**g >= 0.0 && g.is_finite())) {
            return Err(Error::InvalidParameter(format!("gamma[{j}] = {g} must be non-negative")));
        }
        if let Some((j, n)) = self.nbar.iter().enumerate().find(|(_, n)| !(**n >= 0.0 && n.is_finite())) {
            return Err(Error::InvalidParameter(format!("nbar[{j}] = {n} must be non-negative")));
        }
        Ok(())
    }

    /// Rates in 1/s at simulator scale factor `f`.
    pub fn simulator_rates(&self, f: f64) -> Vec<f64> {
        self.gamma.iter().map(|g| g * 1e15 * f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_occupation() {
        let t = 300.0;
        let w = std::f64::consts::LN_2 * KB_EV_PER_K * t;
        assert!((bose_einstein(w, t).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(bose_einstein(0.1, 0.0).unwrap(), 0.0);
        assert!(bose_einstein(0.0, 300.0).is_err());
        assert!(bose_einstein(0.1, -1.0).is_err());
    }

    #[test]
    fn room_temperature_vibration() {
        let x = 0.124 / (KB_EV_PER_K * 300.0);
        let n = bose_einstein(0.124, 300.0).unwrap();
        assert!((n - 1.0 / (x.exp() - 1.0)).abs() < 1e-15);
        assert!((n - 8.3e-3).abs() < 0.2e-3);
    }

    #[test]
    fn invariant_under_joint_scaling() {
        let n = bose_einstein(0.07, 300.0).unwrap();
        for s in [1e-9, 1e-3, 10.0] {
            let m = bose_einstein(0.07 * s, 300.0 * s).unwrap();
            assert!((m / n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ion_temperature_tens_of_microkelvin() {
        let w_ion = std::f64::consts::TAU * 4e6;
        let t = equivalent_temperature(0.124, 300.0, w_ion);
        assert!(t > 1e-5 && t < 1e-4, "{t}");
        let n_mol = bose_einstein(0.124, 300.0).unwrap();
        let n_ion = bose_einstein(w_ion * HBAR_EV_S, t).unwrap();
        assert!((n_ion / n_mol - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bath_validation() {
        assert!(BathSpec::new(vec![0.1], vec![0.0, 0.0]).is_err());
        assert!(BathSpec::new(vec![-0.1], vec![0.0]).is_err());
        let b = BathSpec::thermal(vec![1e-3, 2e-3], &[0.07, 0.09], 300.0).unwrap();
        assert_eq!(b.temperature, Some(300.0));
        assert!(b.nbar.iter().all(|&n| n > 0.0 && n < 0.1));
        assert_eq!(b.simulator_rates(1e-10), vec![1e-3 * 1e5, 2e-3 * 1e5]);
    }
}
