//! Numerical tolerances shared by every module and test.

/// Max elementwise `|M^dagger M - I|` accepted for a unitary.
pub const UNITARITY: f64 = 1e-10;
/// Max elementwise `|M - M^dagger|` accepted for a Hermitian operator.
pub const HERMITICITY: f64 = 1e-10;
/// Allowed deviation of a state's squared norm from 1.
pub const NORM: f64 = 1e-12;
/// Per-pair residual `||M v - lambda v||` accepted from an eigensolver.
pub const EIG_RESIDUAL: f64 = 1e-9;
/// Eigenvalues of a density matrix below this count as zero in entropies.
pub const ENTROPY_CUTOFF: f64 = 1e-14;
/// Most negative eigenvalue tolerated in a density matrix.
pub const PSD: f64 = 1e-12;
/// Trace deviation tolerated in a density matrix.
pub const TRACE: f64 = 1e-12;
