//! Dense complex linear algebra: matrices, products, adjoints, Kronecker
//! products, a from-scratch complex SVD, and the unitary factor used by the
//! local gate update.

mod local;
mod matrix;
mod svd;
mod umat;

pub use local::{apply_local_left, apply_local_right, partial_trace_env, LocalIndexer};
pub use matrix::{haar_unitary, hs_inner, ComplexMatrix};
pub use svd::{complex_svd, polar_unitary_of_adjoint, Svd};
pub use umat::{read_umat_json, write_umat_json};

use std::fmt;

/// Errors from the linear-algebra layer.
#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    /// Operand shapes are incompatible for the requested operation.
    DimensionMismatch {
        op: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },
    /// A square matrix was required.
    NotSquare { rows: usize, cols: usize },
    /// Matrix dimension is not a power of two.
    NotPowerOfTwo { dim: usize },
    /// The Jacobi sweep did not converge within the iteration cap.
    SvdNoConvergence { sweeps: usize },
    /// Input failed the unitarity check.
    NotUnitary { max_err: f64 },
    /// A unitary-matrix file could not be decoded.
    BadUnitaryFile(String),
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::DimensionMismatch { op, lhs, rhs } => write!(
                f,
                "dimension mismatch in {op}: {}x{} vs {}x{}",
                lhs.0, lhs.1, rhs.0, rhs.1
            ),
            LinalgError::NotSquare { rows, cols } => {
                write!(f, "expected square matrix, got {rows}x{cols}")
            }
            LinalgError::NotPowerOfTwo { dim } => {
                write!(f, "matrix dimension {dim} is not a power of two")
            }
            LinalgError::SvdNoConvergence { sweeps } => {
                write!(f, "SVD did not converge after {sweeps} Jacobi sweeps")
            }
            LinalgError::NotUnitary { max_err } => {
                write!(f, "matrix is not unitary (max |M†M - I| = {max_err:.3e})")
            }
            LinalgError::BadUnitaryFile(msg) => write!(f, "bad unitary file: {msg}"),
        }
    }
}

impl std::error::Error for LinalgError {}
