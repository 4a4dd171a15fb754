use num_complex::Complex64 as C64;

use super::VCModel;
use crate::error::{Error, Result};
use crate::ops::{fock::mode_p, matrix_exponential_apply, SpaceLayout};

/// Model transformed by `D_k(β) H D_k(β)†` with `D_k(β) = exp(-iβP_k)`,
/// i.e. `Q_k → Q_k - β`.
///
/// Linear and quadratic terms pick up the shifts
/// `c0 → c0 - βc_k + β²c_kk`, `c_j → c_j - 2βc_kj` and the harmonic term adds
/// `-βω_k Q_k` to every diagonal. Global constants (`½ω_kβ²` and the mean
/// diagonal shift) are dropped, so spectra match the original up to a
/// uniform offset.
pub fn displace_model(model: &VCModel, mode_k: usize, beta: f64) -> Result<VCModel> {
    let n_modes = model.n_modes();
    if mode_k >= n_modes {
        return Err(Error::out_of_range("mode", mode_k, n_modes));
    }
    let d = model.d();
    let omega_k = model.omega()[mode_k];
    let old_ck = model.c1()[mode_k].clone();
    let ckk = model.c2()[mode_k][mode_k].clone();
    let ckj: Vec<_> = model.c2()[mode_k].to_vec();

    let mut out = model.clone();
    let (c0, c1, _) = out.parts_mut();
    let mut diag_shift = 0.0;
    for n in 0..d {
        for m in 0..d {
            let delta = -beta * old_ck.get(n, m) + beta * beta * ckk.get(n, m);
            c0.set(n, m, c0.get(n, m) + delta);
            if n == m {
                diag_shift += delta;
            }
        }
    }
    let mean = diag_shift / d as f64;
    for n in 0..d {
        c0.set(n, n, c0.get(n, n) - mean);
    }
    for (j, blk) in c1.iter_mut().enumerate() {
        for n in 0..d {
            for m in 0..d {
                let mut v = blk.get(n, m) - 2.0 * beta * ckj[j].get(n, m);
                if j == mode_k && n == m {
                    v -= beta * omega_k;
                }
                blk.set(n, m, v);
            }
        }
    }
    Ok(out)
}

/// Applies `exp(-iβP_k)` to a state, shifting `⟨Q_k⟩` by `+β`.
pub fn displace_state(state: &[C64], mode_k: usize, beta: f64, layout: &SpaceLayout) -> Result<Vec<C64>> {
    if mode_k >= layout.n_modes() {
        return Err(Error::out_of_range("mode", mode_k, layout.n_modes()));
    }
    if beta == 0.0 {
        return Ok(state.to_vec());
    }
    let p = mode_p(layout, mode_k)?;
    matrix_exponential_apply(&p, state, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::fock::mode_q;
    use crate::vibronic::model::{random_lvc, random_qvc, CoefMatrix};
    use crate::vibronic::{build_hamiltonian, franck_condon_state, pauli_form};
    use nalgebra::DMatrix;

    fn spectrum(m: &VCModel, layout: &SpaceLayout) -> Vec<f64> {
        let h = build_hamiltonian(m, layout).unwrap();
        let n = h.dim();
        let dm = DMatrix::from_fn(n, n, |i, j| h.get(i, j));
        let mut e: Vec<f64> = dm.symmetric_eigen().eigenvalues.iter().copied().collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e
    }

    #[test]
    fn zero_displacement_is_identity() {
        let m = random_qvc(2, 2, 3);
        assert_eq!(displace_model(&m, 1, 0.0).unwrap(), m);
        let layout = SpaceLayout::new(2, vec![4, 4]).unwrap();
        let psi = franck_condon_state(&layout, 0).unwrap();
        assert_eq!(displace_state(&psi, 0, 0.0, &layout).unwrap(), psi);
        assert!(displace_model(&m, 2, 0.1).is_err());
        assert!(displace_state(&psi, 2, 0.1, &layout).is_err());
    }

    #[test]
    fn removes_identity_tuning_term() {
        let m = random_lvc(2, 2, 11);
        let p = pauli_form(&m).unwrap();
        let beta = p.kappa_bar[0] / m.omega()[0];
        let moved = pauli_form(&displace_model(&m, 0, beta).unwrap()).unwrap();
        assert!(moved.kappa_bar[0].abs() < 1e-15);
        // agrees with the direct Pauli-parameter replacement rules
        let rules = p.displaced(0, beta, m.omega()[0]).unwrap();
        assert!((moved.delta_e - rules.delta_e).abs() < 1e-15);
        assert!((moved.w0 - rules.w0).abs() < 1e-15);
        for j in 0..2 {
            assert!((moved.kappa_bar[j] - rules.kappa_bar[j]).abs() < 1e-15);
            assert!((moved.delta_kappa[j] - rules.delta_kappa[j]).abs() < 1e-15);
            assert!((moved.lambda[j] - rules.lambda[j]).abs() < 1e-15);
        }
    }

    fn weak_model(quadratic: bool) -> VCModel {
        let mut c0 = CoefMatrix::diag(&[-0.1, 0.1]);
        let mut c1 = CoefMatrix::diag(&[0.01, 0.03]);
        c1.set_sym(0, 1, 0.01);
        let c2 = quadratic.then(|| {
            c0.set_sym(0, 1, 0.02);
            let mut b = CoefMatrix::diag(&[0.002, -0.003]);
            b.set_sym(0, 1, 0.001);
            vec![vec![b]]
        });
        VCModel::new(vec![0.1], c0, vec![c1], c2).unwrap()
    }

    #[test]
    fn spectrum_shifts_uniformly() {
        let layout = SpaceLayout::new(2, vec![12]).unwrap();
        for quadratic in [false, true] {
            let model = weak_model(quadratic);
            let moved = displace_model(&model, 0, 0.2).unwrap();
            let a = spectrum(&model, &layout);
            let b = spectrum(&moved, &layout);
            // low-lying levels, away from the truncation edge
            let offset = b[0] - a[0];
            for k in 0..6 {
                assert!(
                    (b[k] - a[k] - offset).abs() < 1e-8,
                    "quadratic={quadratic} level {k}: {}",
                    b[k] - a[k] - offset
                );
            }
        }
    }

    #[test]
    fn vacuum_displacement_mean_position() {
        let layout = SpaceLayout::new(1, vec![40]).unwrap();
        let psi = franck_condon_state(&layout, 0).unwrap();
        let beta = 1.3;
        let moved = displace_state(&psi, 0, beta, &layout).unwrap();
        let q = mode_q(&layout, 0).unwrap().expectation(&moved).re;
        assert!((q - beta).abs() < 1e-6);
        assert!((crate::ops::expm::norm2(&moved) - 1.0).abs() < 1e-9);
    }
}
