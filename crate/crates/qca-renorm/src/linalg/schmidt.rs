//! Operator Schmidt decomposition of bipartite operators.
//!
//! A square operator on H_L (x) H_R is regrouped from index order
//! ((i,j),(i',j')) to ((i,i'),(j,j')) and factored by SVD; the retained
//! terms give M = sum_mu w_mu A_mu (x) B_mu with Hilbert-Schmidt
//! orthonormal factor families.

use serde::Serialize;

use super::matrix::{C64, ComplexMatrix};
use super::svd::{rank, svd};
use crate::error::{QcaError, Result};

/// A split of an ambient dimension into left x right tensor factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bipartition {
    pub dim_left: usize,
    pub dim_right: usize,
}

impl Bipartition {
    pub fn new(dim_left: usize, dim_right: usize) -> Self {
        assert!(dim_left >= 1 && dim_right >= 1);
        Self { dim_left, dim_right }
    }

    pub fn total(&self) -> usize {
        self.dim_left * self.dim_right
    }

    pub fn check(&self, dim: usize) -> Result<()> {
        if self.total() != dim {
            return Err(QcaError::DimensionMismatch(format!(
                "bipartition {}|{} does not factor dimension {}",
                self.dim_left, self.dim_right, dim
            )));
        }
        Ok(())
    }
}

/// One term of an operator Schmidt decomposition.
#[derive(Debug, Clone)]
pub struct SchmidtTerm {
    pub weight: f64,
    pub left_op: ComplexMatrix,
    pub right_op: ComplexMatrix,
}

/// Result of [`operator_schmidt`]: terms sorted by descending weight.
#[derive(Debug, Clone)]
pub struct OperatorSchmidt {
    pub terms: Vec<SchmidtTerm>,
    pub tolerance: f64,
}

impl OperatorSchmidt {
    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    /// Rebuilds sum_mu w_mu A_mu (x) B_mu.
    pub fn reconstruct(&self, split: Bipartition) -> ComplexMatrix {
        let dim = split.total();
        let mut out = ComplexMatrix::zeros(dim, dim);
        for t in &self.terms {
            let k = super::kron(&t.left_op, &t.right_op).scale(C64::new(t.weight, 0.0));
            out = out.add(&k);
        }
        out
    }
}

/// Regroups m[(i,j),(i',j')] into r[(i,i'),(j,j')].
pub fn reshuffle(m: &ComplexMatrix, split: Bipartition) -> Result<ComplexMatrix> {
    split.check(m.rows())?;
    if !m.is_square() {
        return Err(QcaError::DimensionMismatch(
            "operator Schmidt input must be square".into(),
        ));
    }
    let (dl, dr) = (split.dim_left, split.dim_right);
    let mut r = ComplexMatrix::zeros(dl * dl, dr * dr);
    for i in 0..dl {
        for ip in 0..dl {
            for j in 0..dr {
                for jp in 0..dr {
                    r[(i * dl + ip, j * dr + jp)] = m[(i * dr + j, ip * dr + jp)];
                }
            }
        }
    }
    Ok(r)
}

/// Operator Schmidt decomposition; terms with singular value at or below
/// `tol` relative to the largest are dropped.
pub fn operator_schmidt(
    m: &ComplexMatrix,
    split: Bipartition,
    tol: f64,
) -> Result<OperatorSchmidt> {
    let r = reshuffle(m, split)?;
    let s = svd(&r);
    let (dl, dr) = (split.dim_left, split.dim_right);
    let keep = rank(&s.values, tol);
    let mut terms = Vec::with_capacity(keep);
    for k in 0..keep {
        let mut left = ComplexMatrix::zeros(dl, dl);
        for i in 0..dl {
            for ip in 0..dl {
                left[(i, ip)] = s.u[(i * dl + ip, k)];
            }
        }
        let mut right = ComplexMatrix::zeros(dr, dr);
        for j in 0..dr {
            for jp in 0..dr {
                right[(j, jp)] = s.v[(j * dr + jp, k)].conj();
            }
        }
        terms.push(SchmidtTerm {
            weight: s.values[k],
            left_op: left,
            right_op: right,
        });
    }
    Ok(OperatorSchmidt {
        terms,
        tolerance: tol,
    })
}

/// Operator Schmidt rank at relative cutoff `tol`.
pub fn schmidt_rank(m: &ComplexMatrix, split: Bipartition, tol: f64) -> Result<usize> {
    let r = reshuffle(m, split)?;
    let s = svd(&r);
    Ok(rank(&s.values, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;
    use crate::linalg::test_matrices::*;

    const SPLIT22: Bipartition = Bipartition { dim_left: 2, dim_right: 2 };

    #[test]
    fn projector_already_in_schmidt_form() {
        // |00><00| + |11><11| -> two unit-weight product terms.
        let mut q1 = ComplexMatrix::zeros(4, 4);
        q1[(0, 0)] = C64::new(1.0, 0.0);
        q1[(3, 3)] = C64::new(1.0, 0.0);
        let d = operator_schmidt(&q1, SPLIT22, 1e-9).unwrap();
        assert_eq!(d.rank(), 2);
        assert!((d.terms[0].weight - 1.0).abs() < 1e-12);
        assert!((d.terms[1].weight - 1.0).abs() < 1e-12);
        assert!(d.reconstruct(SPLIT22).dist(&q1) < 1e-12);
    }

    #[test]
    fn identity_is_a_single_product_term() {
        let i4 = ComplexMatrix::identity(4);
        let d = operator_schmidt(&i4, SPLIT22, 1e-9).unwrap();
        assert_eq!(d.rank(), 1);
        assert!((d.terms[0].weight - 2.0).abs() < 1e-12);
        let half = ComplexMatrix::identity(2).scale(C64::new(1.0 / 2f64.sqrt(), 0.0));
        let (eq, _) = crate::linalg::phase_equal(&d.terms[0].left_op, &half, 1e-9);
        assert!(eq);
    }

    #[test]
    fn swap_gate_has_rank_four() {
        // Independent oracle: S = (1/2) sum_mu sigma_mu (x) sigma_mu.
        let s = swap_gate();
        let mut rebuilt = ComplexMatrix::zeros(4, 4);
        for p in [ComplexMatrix::identity(2), sigma_x(), sigma_y(), sigma_z()] {
            rebuilt = rebuilt.add(&kron(&p, &p).scale(C64::new(0.5, 0.0)));
        }
        assert!(rebuilt.dist(&s) < 1e-12);

        let d = operator_schmidt(&s, SPLIT22, 1e-9).unwrap();
        assert_eq!(d.rank(), 4);
        for t in &d.terms {
            assert!((t.weight - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn product_operators_have_rank_one() {
        let mut rng = crate::testutil::rng(17);
        for _ in 0..10 {
            let a = ComplexMatrix::random(2, 2, &mut rng);
            let b = ComplexMatrix::random(3, 3, &mut rng);
            let m = kron(&a, &b);
            assert_eq!(
                schmidt_rank(&m, Bipartition::new(2, 3), 1e-9).unwrap(),
                1
            );
        }
    }

    #[test]
    fn reconstruction_and_orthonormality_on_random_matrices() {
        let mut rng = crate::testutil::rng(23);
        for _ in 0..100 {
            let m = ComplexMatrix::random(4, 4, &mut rng);
            let d = operator_schmidt(&m, SPLIT22, 1e-9).unwrap();
            assert!(d.reconstruct(SPLIT22).dist(&m) < 1e-9);
            for a in &d.terms {
                for b in &d.terms {
                    let ip = a.left_op.hs_inner(&b.left_op);
                    let want = if std::ptr::eq(a, b) { 1.0 } else { 0.0 };
                    assert!((ip - C64::new(want, 0.0)).norm() < 1e-9);
                }
            }
            for w in d.terms.windows(2) {
                assert!(w[0].weight >= w[1].weight - 1e-12);
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let m = ComplexMatrix::identity(6);
        assert!(operator_schmidt(&m, SPLIT22, 1e-9).is_err());
    }
}
