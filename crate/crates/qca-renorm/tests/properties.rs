//! Property-based invariants of the linear-algebra substrate and the
//! coarse-rule fit.

use proptest::prelude::*;

use qca_renorm::linalg::{
    self, kron, operator_schmidt, phase_equal, translation_operator, wrap_angle, Bipartition,
    ComplexMatrix, C64,
};
use qca_renorm::renorm::{coarse_diagonal_step, coarse_pair_distance, fit_diagonal_rule};

fn complex_entries(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
}

fn matrix_from(entries: &[(f64, f64)], rows: usize, cols: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let (re, im) = entries[i * cols + j];
            m[(i, j)] = C64::new(re, im);
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative(
        a in complex_entries(4),
        b in complex_entries(6),
        c in complex_entries(6),
    ) {
        let a = matrix_from(&a, 2, 2);
        let b = matrix_from(&b, 3, 2);
        let c = matrix_from(&c, 2, 3);
        let lhs = kron(&kron(&a, &b), &c);
        let rhs = kron(&a, &kron(&b, &c));
        prop_assert!(lhs.dist(&rhs) < 1e-12);
    }

    #[test]
    fn translations_compose(n in 2usize..7, a in -8i64..8, b in -8i64..8) {
        let ta = translation_operator(n, a);
        let tb = translation_operator(n, b);
        let tab = translation_operator(n, a + b);
        prop_assert!(ta.mul(&tb).dist(&tab) < 1e-13);
    }

    #[test]
    fn operator_schmidt_reconstructs(entries in complex_entries(16)) {
        let m = matrix_from(&entries, 4, 4);
        let split = Bipartition::new(2, 2);
        let dec = operator_schmidt(&m, split, 1e-9).unwrap();
        prop_assert!(dec.reconstruct(split).dist(&m) < 1e-9);
        // weights descending, factor families orthonormal
        for w in dec.terms.windows(2) {
            prop_assert!(w[0].weight >= w[1].weight - 1e-12);
        }
        for (i, a) in dec.terms.iter().enumerate() {
            for (j, b) in dec.terms.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((a.left_op.hs_inner(&b.left_op) - C64::new(want, 0.0)).norm() < 1e-8);
                prop_assert!((a.right_op.hs_inner(&b.right_op) - C64::new(want, 0.0)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn product_operators_have_unit_schmidt_rank(
        a in complex_entries(4),
        b in complex_entries(4),
    ) {
        let a = matrix_from(&a, 2, 2);
        let b = matrix_from(&b, 2, 2);
        prop_assume!(a.frobenius_norm() > 0.1 && b.frobenius_norm() > 0.1);
        let rank = linalg::schmidt_rank(&kron(&a, &b), Bipartition::new(2, 2), 1e-9).unwrap();
        prop_assert_eq!(rank, 1);
    }

    #[test]
    fn phase_equal_recovers_phases(alpha in -3.1f64..3.1, seed in 0u64..1000) {
        let mut rng = qca_renorm::testutil::rng(seed);
        let u = ComplexMatrix::random_unitary(4, &mut rng);
        let rotated = u.scale(C64::from_polar(1.0, alpha));
        let (eq, got) = phase_equal(&rotated, &u, 1e-9);
        prop_assert!(eq);
        prop_assert!(linalg::angle_dist(got, alpha) < 1e-9);
    }

    #[test]
    fn diagonal_fit_round_trips(
        phi in -3.1f64..3.1,
        theta in -3.1f64..3.1,
        f in 3usize..6,
    ) {
        let vs = coarse_diagonal_step(phi, theta, f);
        let fit = fit_diagonal_rule(&vs, f).unwrap();
        prop_assert!(fit.residual < 1e-9);
        prop_assert!(coarse_pair_distance(
            (fit.phi_prime, fit.theta_prime),
            (wrap_angle(phi), wrap_angle(theta)),
        ) < 1e-9);
        // the rebuilt step matches up to the reported global phase
        let rebuilt = coarse_diagonal_step(fit.phi_prime, fit.theta_prime, f);
        let (eq, _) = phase_equal(&vs, &rebuilt, 1e-8);
        prop_assert!(eq);
    }

    #[test]
    fn wrap_angle_lands_in_interval(x in -50.0f64..50.0) {
        let w = wrap_angle(x);
        prop_assert!(w > -std::f64::consts::PI && w <= std::f64::consts::PI);
        prop_assert!(linalg::angle_dist(w, x) < 1e-9);
    }
}
