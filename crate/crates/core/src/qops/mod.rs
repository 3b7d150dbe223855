//! Dense complex linear algebra and the statevector engine.

mod density;
mod eig;
mod operator;
mod random;
mod state;
pub mod tol;

pub use density::{reduced_density_matrix, von_neumann_entropy, DensityMatrix};
pub use eig::{eig_hermitian, eig_unitary, eigvals_hermitian};
pub use operator::DenseOperator;
pub use random::{haar_unitary, random_state};
pub use state::{apply2_raw, apply4_raw, apply_two_qubit, StateVector, MAX_QUBITS};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QopsError {
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    IndexOutOfRange { index: usize, n_qubits: usize },
    #[error("two-qubit gate needs distinct qubits, got {0} twice")]
    SameQubit(usize),
    #[error("operator is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("operator is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("density matrix has eigenvalue {0:.3e} below zero")]
    NotPositive(f64),
    #[error("density matrix trace {0} differs from 1")]
    BadTrace(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("qubit count {0} outside the supported range 1..={MAX_QUBITS}")]
    BadQubitCount(usize),
    #[error("state norm {0} differs from 1")]
    NotNormalized(f64),
    #[error("site range {start}..{end} invalid for {n_qubits} qubits")]
    BadRange { start: usize, end: usize, n_qubits: usize },
    #[error("dimension {0} exceeds the dense eigensolver cap")]
    TooLarge(usize),
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
}
