//! Wrapped one-dimensional qubit automata.
//!
//! A step is the unitary W = (tensor_x U) . D_phi on a periodic ring, where
//! U is the single-cell rotation and D_phi the product of controlled-phase
//! gates over every nearest-neighbour pair. The Heisenberg action
//! A -> W^dag A W realises the local rule.
//!
//! Sign conventions, fixed once for the whole crate:
//!   sigma_z |a> = (-1)^a |a>,
//!   U(theta, n) = cos(theta) I - i sin(theta) (n . sigma),
//! so U(theta, z) = diag(e^{-i theta}, e^{+i theta}), and
//! C_phi = diag(1, 1, 1, e^{i phi}).

use serde::{Deserialize, Serialize};

use crate::error::{QcaError, Result};
use crate::linalg::{
    kron, kron_pow, translation_operator, wrap_angle, ComplexMatrix, C64, MAX_QUBITS,
};

/// Defining parameters of a nearest-neighbour qubit QCA with unit index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitQcaParams {
    /// Controlled-phase strength, radians in (-pi, pi].
    pub phi: f64,
    /// Rotation magnitude, radians in (-pi, pi].
    pub theta: f64,
    /// Unit rotation axis (n_x, n_y, n_z).
    pub axis: [f64; 3],
    /// Euler angles (alpha1, gamma, alpha2) when the rotation was given in
    /// the form e^{i a1 sz} e^{i g sy} e^{i a2 sz}.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euler: Option<[f64; 3]>,
}

impl QubitQcaParams {
    /// Builds parameters from (phi, theta, axis); the axis is normalized.
    pub fn new(phi: f64, theta: f64, axis: [f64; 3]) -> Result<Self> {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if norm < 1e-12 {
            return Err(QcaError::InvalidParams("axis must be nonzero".into()));
        }
        Ok(Self {
            phi: wrap_angle(phi),
            theta: wrap_angle(theta),
            axis: [axis[0] / norm, axis[1] / norm, axis[2] / norm],
            euler: None,
        })
    }

    /// Builds parameters from phi and Euler angles (alpha1, gamma, alpha2),
    /// converting e^{i a1 sz} e^{i g sy} e^{i a2 sz} to (theta, axis) form.
    pub fn from_euler(phi: f64, a1: f64, g: f64, a2: f64) -> Result<Self> {
        let u = euler_unitary(a1, g, a2);
        // any determinant-one 2x2 unitary is cos(t) I - i sin(t) (n.sigma)
        let cos_t = u[(0, 0)].re.clamp(-1.0, 1.0);
        let theta = cos_t.acos();
        let sin_t = theta.sin();
        let axis = if sin_t.abs() < 1e-12 {
            [0.0, 0.0, 1.0]
        } else {
            [
                -u[(0, 1)].im / sin_t,
                -u[(0, 1)].re / sin_t,
                -u[(0, 0)].im / sin_t,
            ]
        };
        let mut p = Self::new(phi, theta, axis)?;
        p.euler = Some([a1, g, a2]);
        let rebuilt = local_unitary(&p)?;
        if rebuilt.dist(&u) > 1e-10 {
            return Err(QcaError::InvalidParams(
                "euler angles do not reproduce a rotation in the expected form".into(),
            ));
        }
        Ok(p)
    }

    /// alpha = alpha1 + alpha2 when Euler angles are known.
    pub fn alpha(&self) -> Option<f64> {
        self.euler.map(|e| e[0] + e[2])
    }

    pub fn axis_is_z(&self, tol: f64) -> bool {
        self.axis[0].abs() < tol && self.axis[1].abs() < tol
    }

    /// True when the local unitary is diagonal in the computational basis:
    /// the axis is +-z, or the rotation is trivial (theta = 0 mod pi).
    pub fn is_diagonal_rule(&self, tol: f64) -> bool {
        self.axis_is_z(tol) || wrap_angle(self.theta).abs() < tol || (wrap_angle(self.theta).abs() - std::f64::consts::PI).abs() < tol
    }

    /// True when the local unitary is antidiagonal: n_z = 0 and
    /// theta = pi/2 mod pi.
    pub fn is_antidiagonal_rule(&self, tol: f64) -> bool {
        let t = wrap_angle(self.theta);
        self.axis[2].abs() < tol
            && ((t.abs() - std::f64::consts::FRAC_PI_2).abs() < tol)
    }
}

fn euler_unitary(a1: f64, g: f64, a2: f64) -> ComplexMatrix {
    let e = |x: f64| C64::from_polar(1.0, x);
    // diag(e^{ia1}, e^{-ia1}) . [[cos g, sin g], [-sin g, cos g]] . diag(e^{ia2}, e^{-ia2})
    ComplexMatrix::from_rows(&[
        vec![e(a1 + a2) * g.cos(), e(a1 - a2) * g.sin()],
        vec![-e(a2 - a1) * g.sin(), e(-a1 - a2) * g.cos()],
    ])
}

/// A finite periodic ring of qubit cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WrappedLattice {
    pub n_cells: usize,
    pub cell_dim: usize,
}

impl WrappedLattice {
    /// A qubit ring; wrapping requires an even cell count of at least 6 so
    /// the two-step neighbourhood stays regular.
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells % 2 != 0 || n_cells < 6 {
            return Err(QcaError::LatticeTooSmall(n_cells, 6));
        }
        if n_cells > MAX_QUBITS {
            return Err(QcaError::SizeCap(n_cells, MAX_QUBITS));
        }
        Ok(Self { n_cells, cell_dim: 2 })
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_cells
    }
}

/// One wrapped evolution step: dense matrix plus lattice metadata.
#[derive(Debug, Clone)]
pub struct StepUnitary {
    pub lattice: WrappedLattice,
    pub matrix: ComplexMatrix,
    pub params: Option<QubitQcaParams>,
    pub label: String,
}

impl StepUnitary {
    /// Wraps a user matrix after a unitarity check.
    pub fn from_matrix(lattice: WrappedLattice, matrix: ComplexMatrix, label: &str) -> Result<Self> {
        if matrix.rows() != lattice.dim() || !matrix.is_square() {
            return Err(QcaError::DimensionMismatch(format!(
                "step matrix {}x{} does not act on {} cells",
                matrix.rows(),
                matrix.cols(),
                lattice.n_cells
            )));
        }
        check_unitary_sized(&matrix, lattice.n_cells)?;
        Ok(Self {
            lattice,
            matrix,
            params: None,
            label: label.to_string(),
        })
    }

    /// N-fold power of the step (same lattice, label suffixed).
    pub fn pow(&self, n: usize) -> StepUnitary {
        let mut m = ComplexMatrix::identity(self.lattice.dim());
        for _ in 0..n {
            m = self.matrix.mul(&m);
        }
        StepUnitary {
            lattice: self.lattice,
            matrix: m,
            params: self.params.clone(),
            label: format!("{}^{}", self.label, n),
        }
    }
}

/// Full Gram check on small lattices; structural checks already guarantee
/// unitarity for built-in constructors, and a dense A^dag A at n > 10 costs
/// more than everything else combined.
fn check_unitary_sized(m: &ComplexMatrix, n_cells: usize) -> Result<()> {
    use rand::{Rng, SeedableRng};
    if n_cells <= 10 {
        m.check_unitary(1e-10)
    } else {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..4 {
            let v: Vec<C64> = (0..m.rows())
                .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let nv: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            let av = m.mul_vec(&v);
            let nav: f64 = av.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if (nav - nv).abs() > 1e-8 * nv {
                return Err(QcaError::NotUnitary {
                    residual: (nav - nv).abs() / nv,
                    tol: 1e-8,
                });
            }
        }
        Ok(())
    }
}

/// Single-cell rotation U = cos(theta) I - i sin(theta) (n . sigma).
pub fn local_unitary(p: &QubitQcaParams) -> Result<ComplexMatrix> {
    let [nx, ny, nz] = p.axis;
    let norm = (nx * nx + ny * ny + nz * nz).sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(QcaError::InvalidParams(format!(
            "axis has norm {norm}, expected 1"
        )));
    }
    let c = p.theta.cos();
    let s = p.theta.sin();
    Ok(ComplexMatrix::from_rows(&[
        vec![
            C64::new(c, -s * nz),
            C64::new(-s * ny, -s * nx),
        ],
        vec![
            C64::new(s * ny, -s * nx),
            C64::new(c, s * nz),
        ],
    ]))
}

/// Controlled-phase gate diag(1, 1, 1, e^{i phi}).
pub fn controlled_phase(phi: f64) -> ComplexMatrix {
    ComplexMatrix::diagonal(&[
        C64::new(1.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(1.0, 0.0),
        C64::from_polar(1.0, phi),
    ])
}

/// Two-cell gate G = C_phi (U (x) U) C_phi whose structure controls size-2
/// renormalizability.
pub fn build_g(p: &QubitQcaParams) -> Result<ComplexMatrix> {
    let u = local_unitary(p)?;
    let c = controlled_phase(p.phi);
    Ok(c.mul(&kron(&u, &u)).mul(&c))
}

/// Number of adjacent 11 pairs of basis state `s` on the ring of `n` cells.
pub(crate) fn adjacent_pairs(s: usize, n: usize) -> u32 {
    let mut count = 0;
    for x in 0..n {
        let a = (s >> (n - 1 - x)) & 1;
        let b = (s >> (n - 1 - (x + 1) % n)) & 1;
        count += (a & b) as u32;
    }
    count
}

/// Diagonal of D_phi = prod over ring pairs C_phi^(x,x+1).
///
/// Each entry is a single complex exponential of the integer pair count, so
/// the result is bit-exact regardless of the order the commuting factors
/// would have been multiplied in.
pub(crate) fn pair_phase_diag(phi: f64, n: usize) -> Vec<C64> {
    (0..1usize << n)
        .map(|s| C64::from_polar(1.0, phi * f64::from(adjacent_pairs(s, n))))
        .collect()
}

/// The wrapped step W = (tensor_x U) . D_phi.
pub fn build_step_unitary(p: &QubitQcaParams, lat: WrappedLattice) -> Result<StepUnitary> {
    let u = local_unitary(p)?;
    let n = lat.n_cells;
    let mut w = kron_pow(&u, n);
    let d = pair_phase_diag(p.phi, n);
    // right-multiplying by a diagonal scales columns
    for i in 0..w.rows() {
        for j in 0..w.cols() {
            w[(i, j)] *= d[j];
        }
    }
    Ok(StepUnitary {
        lattice: lat,
        matrix: w,
        params: Some(p.clone()),
        label: "qubit-step".to_string(),
    })
}

/// The shift automaton by k cells.
pub fn build_shift(lat: WrappedLattice, k: i64) -> StepUnitary {
    StepUnitary {
        lattice: lat,
        matrix: translation_operator(lat.n_cells, k),
        params: None,
        label: format!("shift{k:+}"),
    }
}

/// The identity automaton.
pub fn build_identity(lat: WrappedLattice) -> StepUnitary {
    StepUnitary {
        lattice: lat,
        matrix: ComplexMatrix::identity(lat.dim()),
        params: None,
        label: "identity".to_string(),
    }
}

/// The two staggered Margolus layers of the step.
///
/// Layer 1 applies C_phi on the even pairs (2x, 2x+1); layer 2 applies
/// (U (x) U) C_phi on the odd pairs (2x+1, 2x+2). Their product (layer 2
/// after layer 1) is the step.
pub fn margolus_layers(
    p: &QubitQcaParams,
    lat: WrappedLattice,
) -> Result<(StepUnitary, StepUnitary)> {
    if lat.n_cells % 2 != 0 {
        return Err(QcaError::Precondition("Margolus layers need an even ring".into()));
    }
    let m1 = controlled_phase(p.phi);
    let u = local_unitary(p)?;
    let m2 = kron(&u, &u).mul(&controlled_phase(p.phi));
    let layer1 = pair_layer(&m1, lat.n_cells, 0);
    let layer2 = pair_layer(&m2, lat.n_cells, 1);
    Ok((
        StepUnitary {
            lattice: lat,
            matrix: layer1,
            params: Some(p.clone()),
            label: "margolus-layer1".to_string(),
        },
        StepUnitary {
            lattice: lat,
            matrix: layer2,
            params: Some(p.clone()),
            label: "margolus-layer2".to_string(),
        },
    ))
}

/// Tensor product of one two-cell gate over the pairs (2x+offset, 2x+1+offset).
pub fn pair_layer(gate: &ComplexMatrix, n_cells: usize, offset: usize) -> ComplexMatrix {
    assert!(n_cells % 2 == 0);
    let aligned = kron_pow(gate, n_cells / 2);
    if offset % 2 == 0 {
        aligned
    } else {
        // shift the gate pattern by one cell: conjugate by tau_1
        let t = translation_operator(n_cells, 1);
        t.mul(&aligned).mul(&t.adjoint())
    }
}
