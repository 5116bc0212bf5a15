//! Stäckel separation: constants of motion, generating functions,
//! Hamilton-Jacobi residuals, the three-condition separability check and
//! block-form metrics adapted to commuting Killing vectors.
//!
//! Sign convention for the conjugate coordinates: with `H = c_1` and
//! `Q_a = dW/dc_a`, the flow gives `dQ_1/dt = +1` and `dQ_a/dt = 0` otherwise.

pub mod benenti;
pub mod blocks;
pub mod expr;
pub mod instances;
pub mod quadrature;
pub mod system;

use thiserror::Error;

use crate::mechanics::MechanicsError;

pub use benenti::{benenti_check, BenentiReport, SeparationCandidate};
pub use blocks::{assemble_block_metric, AssemblyFailure, BlockSample, SeparableMetric};
pub use expr::{Expr, ParseError};
pub use system::{
    conjugate_coordinates, generating_w, hj_residual, stackel_constants, verify_involution, InvolutionReport,
    StackelSystem, WValue,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StackelError {
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("{0}")]
    Io(String),
    #[error("Stäckel matrix is singular at {0:?}")]
    SingularMatrix(Vec<f64>),
    #[error("negative radicand for x{} at {xi}", index + 1)]
    NegativeRadicand { index: usize, xi: f64 },
    #[error("point {0:?} is outside the admissible box")]
    OutsideDomain(Vec<f64>),
    #[error("expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("branch signs must be +1 or -1, got {0:?}")]
    InvalidBranch(Vec<i8>),
    #[error(transparent)]
    Mechanics(#[from] MechanicsError),
}
