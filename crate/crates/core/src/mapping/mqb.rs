use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use super::HardwareSpec;
use crate::error::{Error, Result};
use crate::ops::{embed, embed_product, number, position_q, qudit_projector, OperatorMatrix, SpaceLayout};
use crate::vibronic::{CoefMatrix, VCModel};

/// Which MQB interaction realizes a mode's linear couplings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeRole {
    /// State-dependent displacement, `|n⟩⟨n|` terms.
    Tuning,
    /// Sideband coupling, `|n⟩⟨m|` with `n ≠ m`.
    Coupling,
    Both,
}

impl ModeRole {
    pub fn tunes(self) -> bool {
        matches!(self, Self::Tuning | Self::Both)
    }

    pub fn couples(self) -> bool {
        matches!(self, Self::Coupling | Self::Both)
    }
}

/// Roles read off the nonzero pattern of the linear couplings.
///
/// A mode with no couplings at all is marked as tuning.
pub fn auto_roles(model: &VCModel) -> Vec<ModeRole> {
    model
        .c1()
        .iter()
        .map(|b| {
            let d = b.d();
            let diag = (0..d).any(|n| b.get(n, n) != 0.0);
            let off = (0..d).any(|n| (0..d).any(|m| n != m && b.get(n, m) != 0.0));
            match (diag, off) {
                (true, true) => ModeRole::Both,
                (false, true) => ModeRole::Coupling,
                _ => ModeRole::Tuning,
            }
        })
        .collect()
}

/// Laser phases of the drive terms. All zero by convention.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DrivePhases {
    pub phi: f64,
    pub phi_m: f64,
    pub phi_s: f64,
}

/// Simulator parameters in energy units (eV, scaled by `f`).
#[derive(Clone, Debug, PartialEq)]
pub struct MqbParams {
    pub f: f64,
    /// Detunings `δ_j = F ω_j`.
    pub delta: Vec<f64>,
    /// `Θ′_{n,j} = F c_j^{nn} / √2`, indexed `[j][n]`; zero rows for non-tuning modes.
    pub theta_prime: Vec<Vec<f64>>,
    /// `Ω′_{n,m,k} = F c_k^{nm} / √2` with zero diagonal; zero for non-coupling modes.
    pub omega_prime: Vec<CoefMatrix>,
    /// Stark shifts `χ_n = 2F c0^{nn}`.
    pub chi: Vec<f64>,
    pub tuning_set: Vec<usize>,
    pub coupling_set: Vec<usize>,
    pub phases: DrivePhases,
}

/// Maps an LVC model with diagonal constants onto MQB parameters.
///
/// Off-diagonal constants and quadratic terms have no counterpart in the
/// simulator Hamiltonian and are rejected; a displaced frame
/// ([`crate::vibronic::displace_model`]) can often move an off-diagonal
/// constant into the linear terms first.
pub fn map_to_mqb(model: &VCModel, f: f64, roles: &[ModeRole]) -> Result<MqbParams> {
    if !(f > 0.0 && f.is_finite()) {
        return Err(Error::InvalidParameter(format!("scale factor must be positive, got {f}")));
    }
    let (d, n_modes) = (model.d(), model.n_modes());
    if roles.len() != n_modes {
        return Err(Error::InvalidParameter(format!(
            "{} roles given for {n_modes} modes; every mode needs a role",
            roles.len()
        )));
    }
    if !model.is_linear() {
        return Err(Error::Unsupported("quadratic couplings cannot be mapped to the simulator Hamiltonian".into()));
    }
    let c0 = model.c0();
    for n in 0..d {
        for m in n + 1..d {
            if c0.get(n, m) != 0.0 {
                return Err(Error::Unsupported(format!(
                    "off-diagonal constant c0[{n}][{m}] = {} has no simulator term; try displace_model first",
                    c0.get(n, m)
                )));
            }
        }
    }

    let mut theta_prime = vec![vec![0.0; d]; n_modes];
    let mut omega_prime = vec![CoefMatrix::zeros(d); n_modes];
    for (j, (blk, role)) in model.c1().iter().zip(roles).enumerate() {
        for n in 0..d {
            for m in 0..d {
                let c = blk.get(n, m);
                if c == 0.0 {
                    continue;
                }
                if n == m {
                    if !role.tunes() {
                        return Err(Error::InvalidParameter(format!(
                            "mode {j} has diagonal coupling c1[{j}][{n}][{n}] but is not in the tuning set"
                        )));
                    }
                    theta_prime[j][n] = f * c / SQRT_2;
                } else {
                    if !role.couples() {
                        return Err(Error::InvalidParameter(format!(
                            "mode {j} has off-diagonal coupling c1[{j}][{n}][{m}] but is not in the coupling set"
                        )));
                    }
                    omega_prime[j].set(n, m, f * c / SQRT_2);
                }
            }
        }
    }

    Ok(MqbParams {
        f,
        delta: model.omega().iter().map(|w| f * w).collect(),
        theta_prime,
        omega_prime,
        chi: (0..d).map(|n| 2.0 * f * c0.get(n, n)).collect(),
        tuning_set: (0..n_modes).filter(|&j| roles[j].tunes()).collect(),
        coupling_set: (0..n_modes).filter(|&j| roles[j].couples()).collect(),
        phases: DrivePhases::default(),
    })
}

impl MqbParams {
    pub fn d(&self) -> usize {
        self.chi.len()
    }

    pub fn n_modes(&self) -> usize {
        self.delta.len()
    }

    /// `Δχ = χ_1 - χ_0` for a two-level qudit.
    pub fn delta_chi(&self) -> Result<f64> {
        if self.d() != 2 {
            return Err(Error::Unsupported("Δχ is defined for two-level qudits".into()));
        }
        Ok(self.chi[1] - self.chi[0])
    }

    /// Rotating-frame simulator Hamiltonian with the Stark term `½ Σ χ_n |n⟩⟨n|`.
    ///
    /// Equals `F (H - Σω/2)` for the source model.
    pub fn hamiltonian(&self, layout: &SpaceLayout) -> Result<OperatorMatrix> {
        self.assemble(layout, 0.0)
    }

    /// As [`MqbParams::hamiltonian`] with the Stark term made traceless,
    /// `-¼ Δχ σz` for two levels.
    pub fn hamiltonian_traceless(&self, layout: &SpaceLayout) -> Result<OperatorMatrix> {
        let mean = self.chi.iter().sum::<f64>() / self.d() as f64;
        self.assemble(layout, mean)
    }

    fn assemble(&self, layout: &SpaceLayout, chi_shift: f64) -> Result<OperatorMatrix> {
        let parts = self.term_groups(layout, chi_shift)?;
        let refs: Vec<(f64, &OperatorMatrix)> = parts.iter().flatten().map(|(c, o)| (*c, o)).collect();
        OperatorMatrix::linear_combination(layout.dim(), &refs)?.into_hermitian()
    }

    /// Terms grouped as `[base, stark, mode_0, …, mode_{N-1}]`.
    ///
    /// `base` holds `δ_j a†a`; each mode group holds that mode's drive terms
    /// with `a + a† = √2 Q`.
    pub(crate) fn term_groups(
        &self,
        layout: &SpaceLayout,
        chi_shift: f64,
    ) -> Result<Vec<Vec<(f64, OperatorMatrix)>>> {
        let d = self.d();
        if layout.d() != d || layout.n_modes() != self.n_modes() {
            return Err(Error::Layout(format!(
                "parameters have d = {d}, N = {} but layout has d = {}, N = {}",
                self.n_modes(),
                layout.d(),
                layout.n_modes()
            )));
        }
        let mut base = Vec::new();
        for (j, &dj) in self.delta.iter().enumerate() {
            base.push((dj, embed(&number(layout.truncations()[j])?, j + 1, layout)?));
        }
        let mut stark = Vec::new();
        for n in 0..d {
            let c = 0.5 * (self.chi[n] - chi_shift);
            if c != 0.0 {
                stark.push((c, embed(&qudit_projector(n, n, d)?, 0, layout)?));
            }
        }
        let mut groups = vec![base, stark];
        for j in 0..self.n_modes() {
            let x = position_q(layout.truncations()[j])?.scale_real(SQRT_2);
            let mut g = Vec::new();
            for n in 0..d {
                for m in 0..d {
                    let c = if n == m { self.theta_prime[j][n] } else { self.omega_prime[j].get(n, m) };
                    if c != 0.0 {
                        g.push((c, embed_product(&[(0, &qudit_projector(n, m, d)?), (j + 1, &x)], layout)?));
                    }
                }
            }
            groups.push(g);
        }
        Ok(groups)
    }
}

/// Physical drive strengths `Θ = 2Θ′/(ηD′)` and `Ω = 2Ω′/(ηD′)`, in the
/// units of the parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct DriveStrengths {
    /// `[j][n]`.
    pub theta: Vec<Vec<f64>>,
    pub omega: Vec<CoefMatrix>,
    pub phases: DrivePhases,
}

pub fn laser_drive_requirements(params: &MqbParams, hw: &HardwareSpec) -> Result<DriveStrengths> {
    let n = params.n_modes();
    if hw.eta.len() < n || hw.debye_waller.len() < n {
        return Err(Error::InvalidParameter(format!(
            "hardware lists {} Lamb-Dicke and {} Debye-Waller factors for {n} modes",
            hw.eta.len(),
            hw.debye_waller.len()
        )));
    }
    let mut factor = Vec::with_capacity(n);
    for j in 0..n {
        let x = hw.eta[j] * hw.debye_waller[j];
        if !(x > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mode {j}: η·D′ = {x} must be positive"
            )));
        }
        factor.push(2.0 / x);
    }
    let theta = params
        .theta_prime
        .iter()
        .zip(&factor)
        .map(|(row, s)| row.iter().map(|t| t * s).collect())
        .collect();
    let omega = params
        .omega_prime
        .iter()
        .zip(&factor)
        .map(|(b, s)| {
            let mut out = b.clone();
            for i in 0..b.d() {
                for k in 0..b.d() {
                    out.set(i, k, b.get(i, k) * s);
                }
            }
            out
        })
        .collect();
    Ok(DriveStrengths {
        theta,
        omega,
        phases: params.phases,
    })
}
