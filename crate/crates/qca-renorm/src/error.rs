use thiserror::Error;

/// Errors produced by the linear-algebra substrate and the QCA engine.
#[derive(Debug, Error)]
pub enum QcaError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not unitary (residual {residual:.3e} exceeds {tol:.3e})")]
    NotUnitary { residual: f64, tol: f64 },

    #[error("lattice of {0} cells is too small (need even n >= {1})")]
    LatticeTooSmall(usize, usize),

    #[error("lattice of {0} qubits exceeds the dense-storage cap of {1}")]
    SizeCap(usize, usize),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("matrix is not diagonal; renormalized rule is non-diagonal-unclassified")]
    NonDiagonal,

    #[error("algebra closure did not stabilize within {0} rounds")]
    ClosureUnstable(usize),

    #[error("projection is degenerate: rank {found}, expected {expected}")]
    DegenerateProjection { found: usize, expected: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, QcaError>;
