//! Support algebras and the QCA index.
//!
//! The index of a nearest-neighbour automaton is computed from the support
//! algebra of an evolved two-cell algebra on its left neighbour pair:
//! ind = sqrt(dim L / dim cell algebra). Index 1 characterizes the
//! automata realizable as two staggered layers of two-cell gates.

use serde::{Deserialize, Serialize};

use crate::error::{QcaError, Result};
use crate::linalg::{kron_all, schmidt_rank, Bipartition, ComplexMatrix, C64, Side};
use crate::qca::StepUnitary;

/// A Hilbert-Schmidt-orthonormal span of operators, possibly closed under
/// products and adjoints.
#[derive(Debug, Clone)]
pub struct AlgebraSpan {
    pub ambient_dim: usize,
    pub basis: Vec<ComplexMatrix>,
    pub closed: bool,
}

impl AlgebraSpan {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// The index as a float plus the exact integer dimension pair; consumers
/// match on the pair, not the float.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IndexResult {
    pub value: f64,
    pub dim_l: usize,
    pub dim_cell: usize,
    pub lattice_size: usize,
}

const RANK_TOL: f64 = 1e-9;
const CLOSURE_ROUNDS: usize = 10;

/// Gram-Schmidt over the HS inner product with a relative rank cutoff.
fn hs_orthonormalize(ops: &[ComplexMatrix], tol: f64) -> Vec<ComplexMatrix> {
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    let mut top_norm = 0.0f64;
    for m in ops {
        let mut v = m.clone();
        // two passes of re-orthogonalization for numerical safety
        for _ in 0..2 {
            for b in &basis {
                let ip = b.hs_inner(&v);
                v = v.sub(&b.scale(ip));
            }
        }
        let nrm = v.frobenius_norm();
        top_norm = top_norm.max(m.frobenius_norm());
        if nrm > tol * top_norm.max(1.0) {
            basis.push(v.scale(C64::new(1.0 / nrm, 0.0)));
        }
    }
    basis
}

/// Closes a span under pairwise products and adjoints.
///
/// Iteration is capped; the ambient dimension bounds the growth long before
/// the cap, so hitting it signals numerical instability.
pub fn algebra_closure(span: &[ComplexMatrix]) -> Result<AlgebraSpan> {
    if span.is_empty() {
        return Err(QcaError::Precondition("algebra_closure needs a nonempty span".into()));
    }
    let n = span[0].rows();
    let mut basis = hs_orthonormalize(span, RANK_TOL);
    for _ in 0..CLOSURE_ROUNDS {
        let mut candidates = basis.clone();
        for a in &basis {
            candidates.push(a.adjoint());
        }
        for a in &basis {
            for b in &basis {
                candidates.push(a.mul(b));
            }
        }
        let next = hs_orthonormalize(&candidates, RANK_TOL);
        if next.len() == basis.len() {
            return Ok(AlgebraSpan {
                ambient_dim: n,
                basis: next,
                closed: true,
            });
        }
        basis = next;
    }
    Err(QcaError::ClosureUnstable(CLOSURE_ROUNDS))
}

/// Support algebra of a family of operators on the selected tensor factor.
///
/// Each image M is expanded as sum_mu a_mu (x) e_mu over an orthonormal
/// basis of the non-selected factor; the coefficient operators a_mu,
/// together with the identity, generate the returned algebra.
pub fn support_algebra(
    images: &[ComplexMatrix],
    split: Bipartition,
    side: Side,
) -> Result<AlgebraSpan> {
    let (dl, dr) = (split.dim_left, split.dim_right);
    let sel = match side {
        Side::Left => dl,
        Side::Right => dr,
    };
    let mut ops: Vec<ComplexMatrix> = vec![ComplexMatrix::identity(sel)];
    for m in images {
        split.check(m.rows())?;
        if !m.is_square() {
            return Err(QcaError::DimensionMismatch("support_algebra needs square images".into()));
        }
        // coefficient operators in the elementary-matrix basis of the other
        // factor are slices of the 4-index tensor M[(i,r),(j,c)]
        match side {
            Side::Left => {
                for r in 0..dr {
                    for c in 0..dr {
                        let mut a = ComplexMatrix::zeros(dl, dl);
                        for i in 0..dl {
                            for j in 0..dl {
                                a[(i, j)] = m[(i * dr + r, j * dr + c)];
                            }
                        }
                        if a.frobenius_norm() > RANK_TOL {
                            ops.push(a);
                        }
                    }
                }
            }
            Side::Right => {
                for r in 0..dl {
                    for c in 0..dl {
                        let mut a = ComplexMatrix::zeros(dr, dr);
                        for i in 0..dr {
                            for j in 0..dr {
                                a[(i, j)] = m[(r * dr + i, c * dr + j)];
                            }
                        }
                        if a.frobenius_norm() > RANK_TOL {
                            ops.push(a);
                        }
                    }
                }
            }
        }
    }
    algebra_closure(&ops)
}

/// The sixteen two-qubit Pauli products embedded on cells (c, c+1) of an
/// n-cell ring.
pub fn pauli_products_on(cell: usize, n_cells: usize) -> Vec<ComplexMatrix> {
    let paulis = [
        ComplexMatrix::identity(2),
        ComplexMatrix::from_rows(&[
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        ]),
        ComplexMatrix::from_rows(&[
            vec![C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
            vec![C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
        ]),
        ComplexMatrix::diagonal(&[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]),
    ];
    let i2 = ComplexMatrix::identity(2);
    let mut out = Vec::with_capacity(16);
    for p in &paulis {
        for q in &paulis {
            let factors: Vec<&ComplexMatrix> = (0..n_cells)
                .map(|x| {
                    if x == cell {
                        p
                    } else if x == cell + 1 {
                        q
                    } else {
                        &i2
                    }
                })
                .collect();
            out.push(kron_all(&factors));
        }
    }
    out
}

/// QCA index via brute-force support-algebra dimensions.
///
/// The two-cell algebra on cells (1,2) is evolved one step in the
/// Heisenberg picture and its support over the left pair (0,1) is computed;
/// translation covariance makes the anchor cell irrelevant.
pub fn qca_index(step: &StepUnitary) -> Result<IndexResult> {
    let n = step.lattice.n_cells;
    if n < 6 {
        return Err(QcaError::LatticeTooSmall(n, 6));
    }
    step.matrix.check_unitary(1e-8)?;
    let w = &step.matrix;
    let wd = w.adjoint();
    let images: Vec<ComplexMatrix> = pauli_products_on(1, n)
        .iter()
        .map(|p| wd.mul(p).mul(w))
        .collect();
    let split = Bipartition::new(4, 1 << (n - 2));
    let alg = support_algebra(&images, split, Side::Left)?;
    let dim_l = alg.dim();
    Ok(IndexResult {
        value: (dim_l as f64 / 4.0).sqrt(),
        dim_l,
        dim_cell: 4,
        lattice_size: n,
    })
}

/// True iff the unitary factorizes as A (x) B across the split
/// (operator Schmidt rank 1).
pub fn is_product_unitary(m: &ComplexMatrix, split: Bipartition) -> Result<bool> {
    m.check_unitary(1e-8)?;
    Ok(schmidt_rank(m, split, 1e-9)? == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;
    use crate::linalg::test_matrices::*;
    use crate::qca::{build_identity, build_shift, build_step_unitary, controlled_phase, WrappedLattice};

    #[test]
    fn closure_of_sigma_x() {
        let alg = algebra_closure(&[sigma_x()]).unwrap();
        assert_eq!(alg.dim(), 2); // span{I, sigma_x}
        assert!(alg.closed);
    }

    #[test]
    fn closure_of_x_and_z_is_full() {
        let alg = algebra_closure(&[sigma_x(), sigma_z()]).unwrap();
        assert_eq!(alg.dim(), 4);
    }

    #[test]
    fn closure_of_a_raising_operator() {
        // enumeration oracle: products and adjoints of |0><1| generate
        // |0><1|, |1><0|, |0><0|, |1><1| -- the full 2x2 algebra
        let mut e01 = ComplexMatrix::zeros(2, 2);
        e01[(0, 1)] = C64::new(1.0, 0.0);
        let mut seen = vec![e01.clone()];
        loop {
            let mut next = seen.clone();
            for a in &seen {
                next.push(a.adjoint());
                for b in &seen {
                    next.push(a.mul(b));
                }
            }
            let before = super::hs_orthonormalize(&seen, 1e-9).len();
            let after = super::hs_orthonormalize(&next, 1e-9).len();
            seen = next;
            if after == before {
                break;
            }
        }
        let oracle_dim = super::hs_orthonormalize(&seen, 1e-9).len();
        assert_eq!(oracle_dim, 4);

        let alg = algebra_closure(&[e01]).unwrap();
        assert_eq!(alg.dim(), oracle_dim);
    }

    #[test]
    fn closure_basis_products_stay_in_span() {
        let alg = algebra_closure(&[sigma_x(), sigma_y()]).unwrap();
        for a in &alg.basis {
            for b in &alg.basis {
                let prod = a.mul(b);
                let mut proj = ComplexMatrix::zeros(2, 2);
                for e in &alg.basis {
                    proj = proj.add(&e.scale(e.hs_inner(&prod)));
                }
                assert!(proj.dist(&prod) < 1e-8);
            }
        }
    }

    #[test]
    fn support_of_left_factors_is_full() {
        let i2 = ComplexMatrix::identity(2);
        let images: Vec<ComplexMatrix> = [sigma_x(), sigma_y(), sigma_z(), i2.clone()]
            .iter()
            .map(|p| kron(p, &i2))
            .collect();
        let alg = support_algebra(&images, Bipartition::new(2, 2), Side::Left).unwrap();
        assert_eq!(alg.dim(), 4);
    }

    #[test]
    fn support_of_right_factors_is_scalar_on_left() {
        let i2 = ComplexMatrix::identity(2);
        let images = vec![kron(&i2, &sigma_x()), kron(&i2, &sigma_y())];
        let alg = support_algebra(&images, Bipartition::new(2, 2), Side::Left).unwrap();
        assert_eq!(alg.dim(), 1);
    }

    #[test]
    fn support_respects_the_selected_side() {
        let i2 = ComplexMatrix::identity(2);
        let left_images = vec![kron(&sigma_x(), &i2), kron(&sigma_z(), &i2)];
        let alg = support_algebra(&left_images, Bipartition::new(2, 2), Side::Right).unwrap();
        assert_eq!(alg.dim(), 1, "operators acting on the left factor have scalar right support");
        let right_images = vec![kron(&i2, &sigma_x()), kron(&i2, &sigma_z())];
        let alg = support_algebra(&right_images, Bipartition::new(2, 2), Side::Right).unwrap();
        assert_eq!(alg.dim(), 4);
    }

    #[test]
    fn support_under_controlled_phase_conjugation() {
        let c = controlled_phase(std::f64::consts::FRAC_PI_2);
        let cd = c.adjoint();
        let images: Vec<ComplexMatrix> = pauli_products_on(0, 2)
            .iter()
            .map(|p| cd.mul(p).mul(&c))
            .collect();
        let alg = support_algebra(&images, Bipartition::new(2, 2), Side::Left).unwrap();
        assert_eq!(alg.dim(), 4);
    }

    #[test]
    fn support_dimension_is_basis_independent() {
        // rotating the traced-out factor by a random unitary must not change
        // the support dimension
        let mut rng = crate::testutil::rng(31);
        let c = controlled_phase(1.1);
        let cd = c.adjoint();
        let v = ComplexMatrix::random_unitary(2, &mut rng);
        let rot = kron(&ComplexMatrix::identity(2), &v);
        let images: Vec<ComplexMatrix> = pauli_products_on(0, 2)
            .iter()
            .map(|p| rot.adjoint().mul(&cd.mul(p).mul(&c)).mul(&rot))
            .collect();
        let alg = support_algebra(&images, Bipartition::new(2, 2), Side::Left).unwrap();
        assert_eq!(alg.dim(), 4);
    }

    #[test]
    fn index_of_identity_and_shifts() {
        let lat = WrappedLattice::new(6).unwrap();
        let r = qca_index(&build_identity(lat)).unwrap();
        assert_eq!((r.dim_l, r.dim_cell), (4, 4));
        assert_eq!(r.value, 1.0);

        let r = qca_index(&build_shift(lat, 1)).unwrap();
        assert_eq!((r.dim_l, r.dim_cell), (16, 4));
        assert_eq!(r.value, 2.0);

        let r = qca_index(&build_shift(lat, -1)).unwrap();
        assert_eq!((r.dim_l, r.dim_cell), (1, 4));
        assert_eq!(r.value, 0.5);
    }

    #[test]
    fn qubit_steps_have_unit_index() {
        let lat = WrappedLattice::new(6).unwrap();
        let mut rng = crate::testutil::rng(37);
        for _ in 0..8 {
            let p = crate::testutil::random_params(&mut rng);
            let w = build_step_unitary(&p, lat).unwrap();
            let r = qca_index(&w).unwrap();
            assert_eq!((r.dim_l, r.dim_cell), (4, 4), "params {p:?}");
        }
    }

    #[test]
    fn index_multiplicativity_on_compositions() {
        let lat = WrappedLattice::new(6).unwrap();
        let mut rng = crate::testutil::rng(41);
        let shift = build_shift(lat, 1);
        for _ in 0..5 {
            let p = crate::testutil::random_params(&mut rng);
            let w = build_step_unitary(&p, lat).unwrap();
            let composed = crate::qca::StepUnitary::from_matrix(
                lat,
                shift.matrix.mul(&w.matrix),
                "shift.step",
            )
            .unwrap();
            let ri = qca_index(&composed).unwrap();
            let rs = qca_index(&shift).unwrap();
            let rw = qca_index(&w).unwrap();
            assert!((ri.value - rs.value * rw.value).abs() < 1e-12);
        }
    }

    #[test]
    fn product_unitaries_are_detected() {
        let mut rng = crate::testutil::rng(43);
        let u = ComplexMatrix::random_unitary(2, &mut rng);
        let v = ComplexMatrix::random_unitary(2, &mut rng);
        let split = Bipartition::new(2, 2);
        assert!(is_product_unitary(&kron(&u, &v), split).unwrap());
        assert!(!is_product_unitary(&swap_gate(), split).unwrap());
    }

    #[test]
    fn g_times_swap_is_not_product() {
        // no index-changing renormalization exists for the qubit family
        let p = crate::qca::QubitQcaParams::new(
            std::f64::consts::FRAC_PI_2,
            std::f64::consts::FRAC_PI_3,
            [0.0, 0.0, 1.0],
        )
        .unwrap();
        let g = crate::qca::build_g(&p).unwrap();
        let gs = g.mul(&swap_gate());
        assert!(!is_product_unitary(&gs, Bipartition::new(2, 2)).unwrap());
    }
}
