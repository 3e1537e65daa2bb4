//! One-sided Jacobi singular value decomposition for small complex matrices.
//!
//! The reshuffled matrices that feed the operator Schmidt decomposition are
//! at most 16x16 here, so a Hestenes sweep scheme is plenty and keeps the
//! crate free of external LAPACK bindings.

use super::matrix::{C64, ComplexMatrix};

pub struct Svd {
    /// Singular values, descending.
    pub values: Vec<f64>,
    /// Left singular vectors as columns (only for values > 0).
    pub u: ComplexMatrix,
    /// Right singular vectors as columns.
    pub v: ComplexMatrix,
}

const MAX_SWEEPS: usize = 60;
const SWEEP_TOL: f64 = 1e-14;

/// Computes A = U diag(s) V^dag.
pub fn svd(a: &ComplexMatrix) -> Svd {
    if a.rows() < a.cols() {
        // factor the adjoint and swap the roles of U and V
        let s = svd(&a.adjoint());
        return Svd {
            values: s.values,
            u: s.v,
            v: s.u,
        };
    }
    let m = a.rows();
    let n = a.cols();
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| (0..m).map(|i| a[(i, j)]).collect()).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[j] = C64::new(1.0, 0.0);
            e
        })
        .collect();

    let scale: f64 = cols
        .iter()
        .flat_map(|c| c.iter().map(|x| x.norm_sqr()))
        .sum::<f64>()
        .sqrt();
    if scale == 0.0 {
        return Svd {
            values: vec![0.0; n],
            u: ComplexMatrix::zeros(m, n),
            v: ComplexMatrix::identity(n),
        };
    }

    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|x| x.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|x| x.norm_sqr()).sum();
                let gamma: C64 = cols[p]
                    .iter()
                    .zip(&cols[q])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let g = gamma.norm();
                if g <= SWEEP_TOL * alpha.max(beta).max(1e-300) {
                    continue;
                }
                off = off.max(g / alpha.max(beta));
                // Hermitian 2x2 Gram [[alpha, gamma],[conj gamma, beta]];
                // unitary Jacobi rotation diagonalizing it.
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let phase = gamma / g;
                for i in 0..m {
                    let xp = cols[p][i];
                    let xq = cols[q][i];
                    cols[p][i] = c * xp - s * phase.conj() * xq;
                    cols[q][i] = s * phase * xp + c * xq;
                }
                for i in 0..n {
                    let vp = v[p][i];
                    let vq = v[q][i];
                    v[p][i] = c * vp - s * phase.conj() * vq;
                    v[q][i] = s * phase * vp + c * vq;
                }
            }
        }
        if off < SWEEP_TOL {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let mut values = Vec::with_capacity(n);
    let mut u = ComplexMatrix::zeros(m, n);
    let mut vm = ComplexMatrix::zeros(n, n);
    for (slot, &j) in order.iter().enumerate() {
        let sv = norms[j];
        values.push(sv);
        if sv > 0.0 {
            for i in 0..m {
                u[(i, slot)] = cols[j][i] / sv;
            }
        }
        for i in 0..n {
            vm[(i, slot)] = v[j][i];
        }
    }
    Svd { values, u, v: vm }
}

/// Number of singular values above `rel_tol * max`.
pub fn rank(values: &[f64], rel_tol: f64) -> usize {
    let top = values.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    values.iter().filter(|&&s| s > rel_tol * top).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(s: &Svd, m: usize, n: usize) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(m, n);
        for k in 0..s.values.len() {
            if s.values[k] == 0.0 {
                continue;
            }
            for i in 0..m {
                for j in 0..n {
                    out[(i, j)] += s.values[k] * s.u[(i, k)] * s.v[(j, k)].conj();
                }
            }
        }
        out
    }

    #[test]
    fn reconstructs_random_matrices() {
        let mut rng = crate::testutil::rng(9);
        for (m, n) in [(4, 4), (6, 3), (3, 6), (16, 16), (1, 5)] {
            let a = ComplexMatrix::random(m, n, &mut rng);
            let s = svd(&a);
            assert!(reconstruct(&s, m, n).dist(&a) < 1e-11, "{m}x{n}");
            // descending order
            for w in s.values.windows(2) {
                assert!(w[0] >= w[1] - 1e-12);
            }
            // orthonormal right-vector columns
            let gram = s.v.adjoint().mul(&s.v);
            assert!(gram.dist(&ComplexMatrix::identity(gram.rows())) < 1e-11);
        }
    }

    #[test]
    fn known_singular_values() {
        let d = ComplexMatrix::diagonal(&[
            C64::new(0.0, 3.0),
            C64::new(-2.0, 0.0),
            C64::new(0.0, 0.0),
        ]);
        let s = svd(&d);
        assert!((s.values[0] - 3.0).abs() < 1e-12);
        assert!((s.values[1] - 2.0).abs() < 1e-12);
        assert!(s.values[2].abs() < 1e-12);
        assert_eq!(rank(&s.values, 1e-9), 2);
    }

    #[test]
    fn zero_matrix() {
        let z = ComplexMatrix::zeros(3, 3);
        let s = svd(&z);
        assert_eq!(rank(&s.values, 1e-9), 0);
    }
}
