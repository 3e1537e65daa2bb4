use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{QcaError, Result};

pub type C64 = Complex<f64>;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, v) in entries.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// Column vector from a slice.
    pub fn col_vector(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), 1);
        for (i, v) in entries.iter().enumerate() {
            m[(i, 0)] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        for v in &mut out.data {
            *v = v.conj();
        }
        out
    }

    pub fn scale(&self, z: C64) -> Self {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= z;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (v, w) in out.data.iter_mut().zip(&other.data) {
            *v += w;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (v, w) in out.data.iter_mut().zip(&other.data) {
            *v -= w;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        // i-k-j loop order keeps both operands streaming row-major.
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == C64::new(0.0, 0.0) {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let trow = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (t, o) in trow.iter_mut().zip(orow) {
                    *t += aik * o;
                }
            }
        }
        out
    }

    /// A * v for a column vector given as a slice.
    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let row = self.row(i);
            let mut s = C64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(v) {
                s += a * b;
            }
            out[i] = s;
        }
        out
    }

    /// Conjugation other^dag * self * other.
    pub fn conjugate_by(&self, other: &Self) -> Self {
        other.adjoint().mul(self).mul(other)
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Hilbert-Schmidt inner product tr(self^dag other).
    pub fn hs_inner(&self, other: &Self) -> C64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance to another matrix.
    pub fn dist(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// ||A^dag A - I||_F.
    pub fn unitarity_residual(&self) -> f64 {
        assert!(self.is_square());
        self.adjoint()
            .mul(self)
            .dist(&Self::identity(self.rows))
    }

    pub fn check_unitary(&self, tol: f64) -> Result<()> {
        let residual = self.unitarity_residual();
        if residual < tol {
            Ok(())
        } else {
            Err(QcaError::NotUnitary { residual, tol })
        }
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j && self[(i, j)].norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn diag(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// Random matrix with entries uniform in the unit square (tests, probes).
    pub fn random(rows: usize, cols: usize, rng: &mut impl rand::Rng) -> Self {
        let mut m = Self::zeros(rows, cols);
        for v in &mut m.data {
            *v = C64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0);
        }
        m
    }

    /// Haar-ish random unitary from Gram-Schmidt on a random matrix.
    pub fn random_unitary(n: usize, rng: &mut impl rand::Rng) -> Self {
        let m = Self::random(n, n, rng);
        let mut cols: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| m[(i, j)]).collect()).collect();
        for j in 0..n {
            for k in 0..j {
                let prev = cols[k].clone();
                let ip: C64 = prev.iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
                for (v, p) in cols[j].iter_mut().zip(&prev) {
                    *v -= ip * p;
                }
            }
            let nrm = cols[j].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            for v in &mut cols[j] {
                *v /= nrm;
            }
        }
        let mut u = Self::zeros(n, n);
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                u[(i, j)] = *v;
            }
        }
        u
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Serialization as {re: [[..]], im: [[..]]}, row-major.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let re = (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.re).collect())
            .collect();
        let im = (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.im).collect())
            .collect();
        MatrixRepr { re, im }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(de)?;
        let rows = repr.re.len();
        if rows == 0 || repr.im.len() != rows {
            return Err(serde::de::Error::custom("re/im row counts differ or empty"));
        }
        let cols = repr.re[0].len();
        let mut m = ComplexMatrix::zeros(rows, cols);
        for i in 0..rows {
            if repr.re[i].len() != cols || repr.im[i].len() != cols {
                return Err(serde::de::Error::custom("ragged matrix rows"));
            }
            for j in 0..cols {
                m[(i, j)] = C64::new(repr.re[i][j], repr.im[i][j]);
            }
        }
        Ok(m)
    }
}

#[doc(hidden)]
pub mod test_matrices {
    use super::{C64, ComplexMatrix};

    pub fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        ])
    }

    pub fn sigma_y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            vec![C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
            vec![C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
        ])
    }

    pub fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::diagonal(&[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)])
    }

    pub fn swap_gate() -> ComplexMatrix {
        let mut s = ComplexMatrix::zeros(4, 4);
        for a in 0..2 {
            for b in 0..2 {
                s[(2 * b + a, 2 * a + b)] = C64::new(1.0, 0.0);
            }
        }
        s
    }

    pub fn controlled_phase_pi() -> ComplexMatrix {
        ComplexMatrix::diagonal(&[
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(-1.0, 0.0),
        ])
    }
}
