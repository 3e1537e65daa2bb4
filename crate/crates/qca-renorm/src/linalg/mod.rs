//! Dense complex-matrix substrate.
//!
//! Everything downstream works with explicit row-major matrices of
//! `Complex<f64>`: tensor products, adjoints, operator Schmidt
//! decompositions, partial traces, phase-robust comparison and the cyclic
//! translation permutations of the wrapped lattice.
//!
//! Basis convention used across the whole crate: cell 0 is the most
//! significant bit, so the basis index of |k0 k1 ... k_{n-1}> is
//! sum_x k_x 2^(n-1-x).

mod matrix;
mod schmidt;
pub mod svd;

pub use matrix::{ComplexMatrix, C64};
#[doc(hidden)]
pub use matrix::test_matrices;
pub use schmidt::{
    operator_schmidt, reshuffle, schmidt_rank, Bipartition, OperatorSchmidt, SchmidtTerm,
};
pub use svd::{rank as svd_rank, svd as svd_decompose, Svd};

use crate::error::{QcaError, Result};

/// Default tolerance for Frobenius-norm comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Hard cap on lattice size: dense storage only, at most 14 qubits.
pub const MAX_QUBITS: usize = 14;

/// Kronecker product, left factor on the most significant bits.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out[(i * b.rows() + k, j * b.cols() + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a whole list, in order.
pub fn kron_all(mats: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut out = ComplexMatrix::identity(1);
    for m in mats {
        out = kron(&out, m);
    }
    out
}

/// n-fold Kronecker power.
pub fn kron_pow(m: &ComplexMatrix, n: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::identity(1);
    for _ in 0..n {
        out = kron(&out, m);
    }
    out
}

/// Compares two matrices up to a global phase.
///
/// Returns `(equal, alpha)` with `alpha = arg tr(b^dag a)`; `equal` holds iff
/// `||a - e^{i alpha} b||_F < tol`. A vanishing trace overlap yields
/// `(false, 0)`.
pub fn phase_equal(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> (bool, f64) {
    assert_eq!(
        (a.rows(), a.cols()),
        (b.rows(), b.cols()),
        "phase_equal: shape mismatch"
    );
    let mut overlap = C64::new(0.0, 0.0);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            overlap += b[(i, j)].conj() * a[(i, j)];
        }
    }
    if overlap.norm() < 1e-300 {
        return (false, 0.0);
    }
    let alpha = overlap.arg();
    let phase = C64::from_polar(1.0, alpha);
    let mut dist2 = 0.0;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            dist2 += (a[(i, j)] - phase * b[(i, j)]).norm_sqr();
        }
    }
    (dist2.sqrt() < tol, alpha)
}

/// Which tensor factor an operation applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Traces out the named factor of a bipartite operator.
pub fn partial_trace(m: &ComplexMatrix, split: Bipartition, side: Side) -> Result<ComplexMatrix> {
    let (dl, dr) = (split.dim_left, split.dim_right);
    if m.rows() != m.cols() || m.rows() != dl * dr {
        return Err(QcaError::DimensionMismatch(format!(
            "partial_trace: {}x{} vs split {}|{}",
            m.rows(),
            m.cols(),
            dl,
            dr
        )));
    }
    match side {
        Side::Left => {
            let mut out = ComplexMatrix::zeros(dr, dr);
            for j in 0..dr {
                for l in 0..dr {
                    let mut s = C64::new(0.0, 0.0);
                    for i in 0..dl {
                        s += m[(i * dr + j, i * dr + l)];
                    }
                    out[(j, l)] = s;
                }
            }
            Ok(out)
        }
        Side::Right => {
            let mut out = ComplexMatrix::zeros(dl, dl);
            for i in 0..dl {
                for k in 0..dl {
                    let mut s = C64::new(0.0, 0.0);
                    for j in 0..dr {
                        s += m[(i * dr + j, k * dr + j)];
                    }
                    out[(i, k)] = s;
                }
            }
            Ok(out)
        }
    }
}

/// Permutation unitary cyclically relabelling cell x -> x+shift mod n.
///
/// Conjugation by it implements the lattice shift on operators.
pub fn translation_operator(n_cells: usize, shift: i64) -> ComplexMatrix {
    assert!(n_cells >= 1, "translation_operator needs at least one cell");
    let dim = 1usize << n_cells;
    let mut t = ComplexMatrix::zeros(dim, dim);
    let n = n_cells as i64;
    for s in 0..dim {
        let mut target = 0usize;
        for x in 0..n_cells {
            let bit = (s >> (n_cells - 1 - x)) & 1;
            let y = ((x as i64 + shift) % n + n) % n;
            target |= bit << (n_cells - 1 - y as usize);
        }
        t[(target, s)] = C64::new(1.0, 0.0);
    }
    t
}

/// Maps an angle into the interval (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut r = a % two_pi;
    if r <= -std::f64::consts::PI {
        r += two_pi;
    } else if r > std::f64::consts::PI {
        r -= two_pi;
    }
    r
}

/// Distance between two angles mod 2 pi.
pub fn angle_dist(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::test_matrices::*;

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let zz = kron(&sigma_z(), &sigma_z());
        for (k, want) in [1.0, -1.0, -1.0, 1.0].iter().enumerate() {
            assert!((zz[(k, k)] - C64::new(*want, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn kron_controlled_phase_on_three_qubits() {
        // C_pi on cells (0,1) tensor I on cell 2 flips the sign of |110>
        // (and of |111>, which also has 11 on the controlled pair).
        let cpi = controlled_phase_pi();
        let m = kron(&cpi, &ComplexMatrix::identity(2));
        let idx = 0b110;
        assert!((m[(idx, idx)] - C64::new(-1.0, 0.0)).norm() < 1e-15);
        for s in 0..8usize {
            let want = if s >> 1 == 0b11 { -1.0 } else { 1.0 };
            assert!((m[(s, s)] - C64::new(want, 0.0)).norm() < 1e-15, "s={s}");
        }
    }

    #[test]
    fn kron_associativity_is_exact() {
        let mut rng = crate::testutil::rng(42);
        let a = ComplexMatrix::random(2, 2, &mut rng);
        let b = ComplexMatrix::random(3, 2, &mut rng);
        let c = ComplexMatrix::random(2, 3, &mut rng);
        let lhs = kron(&kron(&a, &b), &c);
        let rhs = kron(&a, &kron(&b, &c));
        assert!(lhs.dist(&rhs) < 1e-12);
    }

    #[test]
    fn phase_equal_pure_phase() {
        let i2 = ComplexMatrix::identity(2);
        let b = i2.scale(C64::from_polar(1.0, std::f64::consts::PI / 7.0));
        let (eq, alpha) = phase_equal(&b, &i2, 1e-12);
        assert!(eq);
        assert!((alpha - std::f64::consts::PI / 7.0).abs() < 1e-12);
    }

    #[test]
    fn phase_equal_orthogonal_operators() {
        let (eq, alpha) = phase_equal(&sigma_x(), &sigma_z(), 1e-9);
        assert!(!eq);
        assert_eq!(alpha, 0.0);
    }

    #[test]
    fn phase_equal_controlled_phase_offset() {
        // a = C_{pi/2}, b = C_{pi/2} e^{-i 0.3}: a = e^{+i0.3} b.
        let a = crate::qca::controlled_phase(std::f64::consts::FRAC_PI_2);
        let b = a.scale(C64::from_polar(1.0, -0.3));
        let (eq, alpha) = phase_equal(&a, &b, 1e-12);
        assert!(eq);
        assert!((alpha - 0.3).abs() < 1e-12);
    }

    #[test]
    fn phase_equal_is_an_equivalence_on_unitaries() {
        let mut rng = crate::testutil::rng(3);
        let us: Vec<ComplexMatrix> = (0..4).map(|_| ComplexMatrix::random_unitary(4, &mut rng)).collect();
        let tol = 1e-9;
        for u in &us {
            assert!(phase_equal(u, u, tol).0);
        }
        for u in &us {
            let v = u.scale(C64::from_polar(1.0, 1.234));
            assert!(phase_equal(u, &v, tol).0);
            assert!(phase_equal(&v, u, tol).0);
            let w = v.scale(C64::from_polar(1.0, -2.6));
            assert!(phase_equal(&v, &w, tol).0);
            assert!(phase_equal(u, &w, tol).0); // transitivity
        }
        // distinct unitaries stay distinct
        assert!(!phase_equal(&us[0], &us[1], tol).0);
    }

    #[test]
    fn partial_trace_examples() {
        let i4 = ComplexMatrix::identity(4);
        let split = Bipartition::new(2, 2);
        let tl = partial_trace(&i4, split, Side::Left).unwrap();
        assert!(tl.dist(&ComplexMatrix::identity(2).scale(C64::new(2.0, 0.0))) < 1e-15);

        // |00><00| traced over the right factor leaves |0><0|.
        let mut p = ComplexMatrix::zeros(4, 4);
        p[(0, 0)] = C64::new(1.0, 0.0);
        let tr = partial_trace(&p, split, Side::Right).unwrap();
        let mut want = ComplexMatrix::zeros(2, 2);
        want[(0, 0)] = C64::new(1.0, 0.0);
        assert!(tr.dist(&want) < 1e-15);

        // swap traced over either factor gives I_2; trace is preserved.
        let s = swap_gate();
        let tl = partial_trace(&s, split, Side::Left).unwrap();
        assert!(tl.dist(&ComplexMatrix::identity(2)) < 1e-15);
        let full: C64 = (0..4).map(|k| s[(k, k)]).sum();
        let part: C64 = (0..2).map(|k| tl[(k, k)]).sum();
        assert!((full - part).norm() < 1e-15);
    }

    #[test]
    fn translation_basics() {
        assert!(translation_operator(3, 0).dist(&ComplexMatrix::identity(8)) < 1e-15);
        // two cells: tau_1 swaps the qubits
        assert!(translation_operator(2, 1).dist(&swap_gate()) < 1e-15);
        // |1000> -> |0100>
        let t = translation_operator(4, 1);
        assert!((t[(0b0100, 0b1000)] - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn translation_group_law() {
        let n = 5;
        for a in -2i64..3 {
            for b in -2i64..3 {
                let ta = translation_operator(n, a);
                let tb = translation_operator(n, b);
                let tab = translation_operator(n, a + b);
                assert!(ta.mul(&tb).dist(&tab) < 1e-14, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn wrap_angle_interval() {
        assert!((wrap_angle(3.0 * std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-12);
        assert!((wrap_angle(-std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(wrap_angle(0.25), 0.25);
    }
}
