use num_complex::Complex64 as C64;

use super::VCModel;
use crate::error::{Error, Result};
use crate::ops::{embed, embed_product, number, position_q, qudit_projector, OperatorMatrix, SpaceLayout};

fn check_layout(model: &VCModel, layout: &SpaceLayout) -> Result<()> {
    if layout.d() != model.d() || layout.n_modes() != model.n_modes() {
        return Err(Error::Layout(format!(
            "model has d = {}, N = {} but layout has d = {}, N = {}",
            model.d(),
            model.n_modes(),
            layout.d(),
            layout.n_modes()
        )));
    }
    Ok(())
}

/// Operator form of a vibronic-coupling model on `layout`.
///
/// The harmonic part is assembled as `ω_j (a†a + 1/2)`, which equals
/// `ω_j (Q_j² + P_j²)/2` except on the top Fock level where the truncated
/// squares lose a term. Quadratic terms use the truncated `Q_j Q_k` product.
pub fn build_hamiltonian(model: &VCModel, layout: &SpaceLayout) -> Result<OperatorMatrix> {
    check_layout(model, layout)?;
    let dim = layout.dim();
    let mut ops: Vec<(f64, OperatorMatrix)> = Vec::new();

    ops.push((model.zero_point_energy(), OperatorMatrix::identity(dim)));
    for (j, &w) in model.omega().iter().enumerate() {
        ops.push((w, embed(&number(layout.truncations()[j])?, j + 1, layout)?));
    }
    ops.extend(electronic_terms(model, layout)?);

    let refs: Vec<(f64, &OperatorMatrix)> = ops.iter().map(|(c, o)| (*c, o)).collect();
    OperatorMatrix::linear_combination(dim, &refs)?.into_hermitian()
}

/// `Σ_{n,m} C_{nm} |n⟩⟨m|` as weighted operator terms.
pub(crate) fn electronic_terms(
    model: &VCModel,
    layout: &SpaceLayout,
) -> Result<Vec<(f64, OperatorMatrix)>> {
    let d = model.d();
    let q: Vec<OperatorMatrix> = layout
        .truncations()
        .iter()
        .map(|&n| position_q(n))
        .collect::<Result<_>>()?;
    let mut ops = Vec::new();
    for n in 0..d {
        for m in 0..d {
            let proj = qudit_projector(n, m, d)?;
            let c0 = model.c0().get(n, m);
            if c0 != 0.0 {
                ops.push((c0, embed(&proj, 0, layout)?));
            }
            for (j, blk) in model.c1().iter().enumerate() {
                let c = blk.get(n, m);
                if c != 0.0 {
                    ops.push((c, embed_product(&[(0, &proj), (j + 1, &q[j])], layout)?));
                }
            }
            for (j, row) in model.c2().iter().enumerate() {
                for (k, blk) in row.iter().enumerate() {
                    let c = blk.get(n, m);
                    if c == 0.0 {
                        continue;
                    }
                    let op = if j == k {
                        let q2 = q[j].matmul(&q[j])?;
                        embed_product(&[(0, &proj), (j + 1, &q2)], layout)?
                    } else {
                        embed_product(&[(0, &proj), (j + 1, &q[j]), (k + 1, &q[k])], layout)?
                    };
                    ops.push((c, op));
                }
            }
        }
    }
    Ok(ops)
}

/// `|n⟩ ⊗ |0⟩ ⊗ … ⊗ |0⟩`.
pub fn franck_condon_state(layout: &SpaceLayout, electronic_index: usize) -> Result<Vec<C64>> {
    let idx = layout.index(electronic_index, &vec![0; layout.n_modes()])?;
    let mut psi = vec![C64::new(0.0, 0.0); layout.dim()];
    psi[idx] = C64::new(1.0, 0.0);
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{fock, sigma_x, sigma_z};
    use crate::vibronic::model::{random_qvc, CoefMatrix};
    use nalgebra::DMatrix;

    fn eigenvalues(h: &OperatorMatrix) -> Vec<f64> {
        let n = h.dim();
        let m = DMatrix::from_fn(n, n, |i, j| h.get(i, j));
        let mut e: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e
    }

    #[test]
    fn single_oscillator_levels() {
        let w = 0.123;
        let model = VCModel::new(vec![w], CoefMatrix::zeros(1), vec![CoefMatrix::zeros(1)], None).unwrap();
        let layout = SpaceLayout::new(1, vec![15]).unwrap();
        let h = build_hamiltonian(&model, &layout).unwrap();
        let e = eigenvalues(&h);
        for (n, ev) in e.iter().take(10).enumerate() {
            assert!((ev - w * (n as f64 + 0.5)).abs() < 1e-10);
        }
    }

    #[test]
    fn two_state_two_mode_term_by_term() {
        // ½Σω(Q²+P²) - ½ΔE σz + Σ_n c1^{nn}|n⟩⟨n|Q1 + c2^{01} σx Q2
        let (w1, w2, de, k0, k1, lam) = (0.074, 0.0936, 0.9234, -0.0964, 0.1194, 0.1825);
        let mut c1a = CoefMatrix::zeros(2);
        c1a.set(0, 0, k0);
        c1a.set(1, 1, k1);
        let mut c1b = CoefMatrix::zeros(2);
        c1b.set_sym(0, 1, lam);
        let model = VCModel::new(
            vec![w1, w2],
            CoefMatrix::diag(&[-de / 2.0, de / 2.0]),
            vec![c1a, c1b],
            None,
        )
        .unwrap();
        let layout = SpaceLayout::new(2, vec![6, 5]).unwrap();
        let h = build_hamiltonian(&model, &layout).unwrap();

        let dim = layout.dim();
        let one = OperatorMatrix::identity(dim);
        let n1 = fock::mode_number(&layout, 0).unwrap();
        let n2 = fock::mode_number(&layout, 1).unwrap();
        let sz = embed(&sigma_z(), 0, &layout).unwrap();
        let p0 = embed_product(&[(0, &qudit_projector(0, 0, 2).unwrap()), (1, &position_q(6).unwrap())], &layout).unwrap();
        let p1 = embed_product(&[(0, &qudit_projector(1, 1, 2).unwrap()), (1, &position_q(6).unwrap())], &layout).unwrap();
        let xq = embed_product(&[(0, &sigma_x()), (2, &position_q(5).unwrap())], &layout).unwrap();
        let reference = OperatorMatrix::linear_combination(
            dim,
            &[
                ((w1 + w2) / 2.0, &one),
                (w1, &n1),
                (w2, &n2),
                (-de / 2.0, &sz),
                (k0, &p0),
                (k1, &p1),
                (lam, &xq),
            ],
        )
        .unwrap();
        let diff = h.add_scaled(&reference, C64::new(-1.0, 0.0)).unwrap();
        assert!(diff.max_abs() < 1e-15);
    }

    #[test]
    fn hermitian_for_random_qvc() {
        for seed in 0..5 {
            let m = random_qvc(3, 2, seed);
            let layout = SpaceLayout::new(3, vec![5, 4]).unwrap();
            let h = build_hamiltonian(&m, &layout).unwrap();
            assert!(h.is_hermitian());
            assert!(h.hermiticity_deviation() <= 1e-12 * h.max_abs());
        }
    }

    #[test]
    fn layout_mismatch_rejected() {
        let m = random_qvc(2, 2, 0);
        let layout = SpaceLayout::new(3, vec![4, 4]).unwrap();
        assert!(matches!(build_hamiltonian(&m, &layout), Err(Error::Layout(_))));
    }

    #[test]
    fn franck_condon_is_product_state() {
        let layout = SpaceLayout::new(2, vec![4, 3]).unwrap();
        let psi = franck_condon_state(&layout, 1).unwrap();
        assert_eq!(psi.iter().filter(|z| z.norm() > 0.0).count(), 1);
        assert!((crate::ops::expm::norm2(&psi) - 1.0).abs() < 1e-15);
        for j in 0..2 {
            assert_eq!(fock::mode_q(&layout, j).unwrap().expectation(&psi).norm(), 0.0);
            assert_eq!(fock::mode_p(&layout, j).unwrap().expectation(&psi).norm(), 0.0);
        }
        assert!(franck_condon_state(&layout, 2).is_err());
    }
}
