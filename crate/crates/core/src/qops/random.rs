//! Random unitaries and states for tests and statistical oracles.

use faer::Mat;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{DenseOperator, QopsError, StateVector};
use crate::C64;

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Mat<C64> {
    Mat::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases of
/// `diag(R)` moved into `Q` (Mezzadri's construction).
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DenseOperator {
    let z = ginibre(dim, dim, rng);
    let qr = z.qr();
    let mut q = qr.compute_Q();
    let r = qr.R();
    for j in 0..dim {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= ph;
        }
    }
    DenseOperator::new(q)
}

/// Uniformly random pure state on `n` qubits.
pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<StateVector, QopsError> {
    if n == 0 || n > super::MAX_QUBITS {
        return Err(QopsError::BadQubitCount(n));
    }
    let z = ginibre(1 << n, 1, rng);
    StateVector::normalized(n, (0..1 << n).map(|i| z[(i, 0)]).collect())
}
