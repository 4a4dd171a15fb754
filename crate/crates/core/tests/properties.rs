use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use mqbsim::closed::fidelity;
use mqbsim::mapping::{auto_roles, interaction_count, map_to_mqb, resource_estimate, BathSpec};
use mqbsim::open::{lindblad_rhs, DensityOperator};
use mqbsim::ops::expm::matrix_exponential_apply;
use mqbsim::vibronic::{build_hamiltonian, franck_condon_state, pauli_form, random_lvc};
use mqbsim::{SpaceLayout, C64};

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hamiltonian_is_hermitian(seed in 0u64..1000, d in 2usize..4, n in 1usize..3, trunc in 2usize..6) {
        let m = random_lvc(d, n, seed);
        let layout = SpaceLayout::uniform(d, n, trunc).unwrap();
        let h = build_hamiltonian(&m, &layout).unwrap();
        prop_assert_eq!(h.hermiticity_deviation(), 0.0);
    }

    #[test]
    fn mapped_hamiltonian_is_hermitian(seed in 0u64..1000, d in 2usize..4, n in 1usize..3, f in 1e-6f64..1.0) {
        let m = random_lvc(d, n, seed);
        let layout = SpaceLayout::uniform(d, n, 4).unwrap();
        let p = map_to_mqb(&m, f, &auto_roles(&m)).unwrap();
        prop_assert!(p.hamiltonian(&layout).unwrap().hermiticity_deviation() <= 1e-15 * f.max(1.0));
    }

    #[test]
    fn pauli_form_round_trip(seed in 0u64..1000, n in 1usize..4) {
        let m = random_lvc(2, n, seed);
        let p = pauli_form(&m).unwrap();
        let back = pauli_form(&p.to_model(m.omega()).unwrap()).unwrap();
        prop_assert_eq!(p.n_modes(), back.n_modes());
        assert_abs_diff_eq!(p.delta_e, back.delta_e, epsilon = 1e-14);
        assert_abs_diff_eq!(p.w0, back.w0, epsilon = 1e-14);
        for j in 0..n {
            assert_abs_diff_eq!(p.kappa_bar[j], back.kappa_bar[j], epsilon = 1e-14);
            assert_abs_diff_eq!(p.delta_kappa[j], back.delta_kappa[j], epsilon = 1e-14);
            assert_abs_diff_eq!(p.lambda[j], back.lambda[j], epsilon = 1e-14);
        }
    }

    #[test]
    fn propagation_preserves_norm(seed in 0u64..1000, t in 0.0f64..50.0) {
        let m = random_lvc(2, 2, seed);
        let layout = SpaceLayout::uniform(2, 2, 5).unwrap();
        let h = build_hamiltonian(&m, &layout).unwrap();
        let psi = franck_condon_state(&layout, 1).unwrap();
        let out = matrix_exponential_apply(&h, &psi, t).unwrap();
        assert_abs_diff_eq!(norm(&out), 1.0, epsilon = 1e-10);
        let f = fidelity(&psi, &out).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
    }

    #[test]
    fn lindblad_rhs_is_traceless_and_hermitian(
        seed in 0u64..1000,
        g0 in 0.0f64..0.1,
        g1 in 0.0f64..0.1,
        n0 in 0.0f64..2.0,
        n1 in 0.0f64..2.0,
    ) {
        let m = random_lvc(2, 2, seed);
        let layout = SpaceLayout::uniform(2, 2, 4).unwrap();
        let h = build_hamiltonian(&m, &layout).unwrap();
        let psi = franck_condon_state(&layout, 1).unwrap();
        let psi = matrix_exponential_apply(&h, &psi, 7.0).unwrap();
        let rho = DensityOperator::pure(&layout, &psi).unwrap();
        let bath = BathSpec::new(vec![g0, g1], vec![n0, n1]).unwrap();
        let r = lindblad_rhs(&rho, &h, &bath).unwrap();
        let dim = rho.dim();
        let trace: C64 = (0..dim).map(|i| r[i * dim + i]).sum();
        prop_assert!(trace.norm() <= 1e-13);
        for i in 0..dim {
            for j in 0..dim {
                prop_assert_eq!(r[i * dim + j], r[j * dim + i].conj());
            }
        }
    }

    #[test]
    fn interaction_count_bounded_by_formula(seed in 0u64..1000, d in 2usize..5, n in 1usize..5) {
        let m = random_lvc(d, n, seed);
        let c = interaction_count(&m, 1).unwrap();
        prop_assert_eq!(c.formula, n * d * (d + 1) / 2);
        prop_assert!(c.actual <= c.formula);
    }

    #[test]
    fn resources_grow_with_modes(n in 1usize..200, d in 2usize..6) {
        let a = resource_estimate(n, d).unwrap();
        let b = resource_estimate(n + 1, d).unwrap();
        prop_assert!(b.qubits > a.qubits);
        prop_assert!(b.ions >= a.ions && b.resonators >= a.resonators);
        prop_assert!(b.classical_bytes_log10 > a.classical_bytes_log10);
    }
}
