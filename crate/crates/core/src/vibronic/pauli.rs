use super::model::CoefMatrix;
use super::VCModel;
use crate::error::{Error, Result};

/// Two-state LVC parameters in Pauli form:
/// `-½ΔE σz + W0 σx + Σ_j (κ̄_j - ½Δκ_j σz + λ_j σx) Q_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoStateLvcParams {
    pub delta_e: f64,
    pub w0: f64,
    pub kappa_bar: Vec<f64>,
    pub delta_kappa: Vec<f64>,
    pub lambda: Vec<f64>,
}

/// Reads the Pauli-form parameters off a two-state LVC model.
///
/// The identity constant `(c0⁰⁰ + c0¹¹)/2` is discarded.
pub fn pauli_form(model: &VCModel) -> Result<TwoStateLvcParams> {
    if model.d() != 2 {
        return Err(Error::Unsupported(format!(
            "Pauli form needs exactly two states, model has {}",
            model.d()
        )));
    }
    if !model.is_linear() {
        return Err(Error::Unsupported("Pauli form is defined for LVC models only (nonzero quadratic terms)".into()));
    }
    let c0 = model.c0();
    let c1 = model.c1();
    Ok(TwoStateLvcParams {
        delta_e: c0.get(1, 1) - c0.get(0, 0),
        w0: c0.get(0, 1),
        kappa_bar: c1.iter().map(|b| (b.get(1, 1) + b.get(0, 0)) / 2.0).collect(),
        delta_kappa: c1.iter().map(|b| b.get(1, 1) - b.get(0, 0)).collect(),
        lambda: c1.iter().map(|b| b.get(0, 1)).collect(),
    })
}

impl TwoStateLvcParams {
    pub fn n_modes(&self) -> usize {
        self.lambda.len()
    }

    /// Rebuilds a model with a traceless constant block.
    pub fn to_model(&self, omega: &[f64]) -> Result<VCModel> {
        if omega.len() != self.n_modes() {
            return Err(Error::InvalidModel(format!(
                "{} frequencies given for {} modes",
                omega.len(),
                self.n_modes()
            )));
        }
        let mut c0 = CoefMatrix::diag(&[-self.delta_e / 2.0, self.delta_e / 2.0]);
        c0.set_sym(0, 1, self.w0);
        let c1 = (0..self.n_modes())
            .map(|j| {
                let mut b = CoefMatrix::diag(&[
                    self.kappa_bar[j] - self.delta_kappa[j] / 2.0,
                    self.kappa_bar[j] + self.delta_kappa[j] / 2.0,
                ]);
                b.set_sym(0, 1, self.lambda[j]);
                b
            })
            .collect();
        VCModel::new(omega.to_vec(), c0, c1, None)
    }

    /// Parameter replacements for a displacement `β` along `mode`:
    /// `ΔE → ΔE - βΔκ_k`, `W0 → W0 - βλ_k`, `κ̄_k → κ̄_k - βω_k`.
    pub fn displaced(&self, mode: usize, beta: f64, omega_k: f64) -> Result<Self> {
        if mode >= self.n_modes() {
            return Err(Error::out_of_range("mode", mode, self.n_modes()));
        }
        let mut out = self.clone();
        out.delta_e -= beta * self.delta_kappa[mode];
        out.w0 -= beta * self.lambda[mode];
        out.kappa_bar[mode] -= beta * omega_k;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::SpaceLayout;
    use crate::vibronic::model::{random_lvc, random_qvc};
    use crate::vibronic::build_hamiltonian;
    use num_complex::Complex64 as C64;

    #[test]
    fn symmetric_states_have_no_gap_or_tuning() {
        let mut c1 = CoefMatrix::diag(&[0.05, 0.05]);
        c1.set_sym(0, 1, 0.02);
        let m = VCModel::new(vec![0.1], CoefMatrix::diag(&[0.3, 0.3]), vec![c1], None).unwrap();
        let p = pauli_form(&m).unwrap();
        assert_eq!(p.delta_e, 0.0);
        assert_eq!(p.delta_kappa, vec![0.0]);
        assert_eq!(p.lambda, vec![0.02]);
        assert_eq!(p.kappa_bar, vec![0.05]);
    }

    #[test]
    fn roundtrip_matrix_up_to_trace_constant() {
        let layout = SpaceLayout::new(2, vec![5, 4, 3]).unwrap();
        for seed in 0..6 {
            let mut m = random_lvc(2, 3, seed);
            // add an off-diagonal constant so W0 is exercised
            let (c0, _, _) = m.parts_mut();
            c0.set_sym(0, 1, 0.013 * (seed as f64 + 1.0));
            let p = pauli_form(&m).unwrap();
            let back = p.to_model(m.omega()).unwrap();
            let h = build_hamiltonian(&m, &layout).unwrap();
            let hb = build_hamiltonian(&back, &layout).unwrap();
            let shift = m.trace_constant();
            let diff = h
                .add_scaled(&hb, C64::new(-1.0, 0.0))
                .unwrap()
                .add_scaled(&crate::OperatorMatrix::identity(layout.dim()), C64::new(-shift, 0.0))
                .unwrap();
            assert!(diff.max_abs() <= 1e-12, "seed {seed}: {}", diff.max_abs());
        }
    }

    #[test]
    fn rejects_wrong_shape() {
        assert!(matches!(pauli_form(&random_lvc(3, 1, 0)), Err(Error::Unsupported(_))));
        assert!(matches!(pauli_form(&random_qvc(2, 1, 0)), Err(Error::Unsupported(_))));
    }
}
