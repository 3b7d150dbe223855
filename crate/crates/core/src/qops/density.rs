use std::ops::Range;

use faer::Mat;

use super::{eigvals_hermitian, tol, DenseOperator, QopsError, StateVector};
use crate::C64;

/// Largest subsystem accepted by [`reduced_density_matrix`].
pub const MAX_KEEP: usize = 14;

/// Trace-one Hermitian matrix. Positivity is checked where the spectrum is
/// computed anyway, in [`von_neumann_entropy`] and [`DensityMatrix::eigenvalues`].
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    op: DenseOperator,
}

impl DensityMatrix {
    pub fn new(mat: Mat<C64>) -> Result<Self, QopsError> {
        let op = DenseOperator::hermitian(mat)?;
        let tr = op.trace();
        if (tr.re - 1.0).abs() > tol::TRACE || tr.im.abs() > tol::TRACE {
            return Err(QopsError::BadTrace(tr.re));
        }
        Ok(Self { op })
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &DenseOperator {
        &self.op
    }

    /// Ascending spectrum; fails if an eigenvalue is below `-tol::PSD`.
    pub fn eigenvalues(&self) -> Result<Vec<f64>, QopsError> {
        let vals = eigvals_hermitian(&self.op)?;
        if let Some(&lowest) = vals.first() {
            if lowest < -tol::PSD {
                return Err(QopsError::NotPositive(lowest));
            }
        }
        Ok(vals)
    }
}

/// Reduced state on the contiguous sites `keep`, tracing out everything else.
pub fn reduced_density_matrix(
    state: &StateVector,
    keep: Range<usize>,
) -> Result<DensityMatrix, QopsError> {
    let n = state.n_qubits();
    if keep.start >= keep.end || keep.end > n || keep.len() > MAX_KEEP {
        return Err(QopsError::BadRange {
            start: keep.start,
            end: keep.end,
            n_qubits: n,
        });
    }
    let k = 1usize << keep.len();
    let right = 1usize << (n - keep.end);
    let left = 1usize << keep.start;
    let amps = state.amplitudes();
    // rows: kept index; columns: (left, right) environment index
    let m = Mat::from_fn(k, left * right, |i, e| {
        let (l, r) = (e / right, e % right);
        amps[(l * k + i) * right + r]
    });
    let mut rho = &m * m.adjoint();
    // exact Hermitian symmetrisation removes rounding asymmetry
    for j in 0..k {
        for i in 0..j {
            let v = (rho[(i, j)] + rho[(j, i)].conj()) * 0.5;
            rho[(i, j)] = v;
            rho[(j, i)] = v.conj();
        }
        rho[(j, j)] = C64::new(rho[(j, j)].re, 0.0);
    }
    DensityMatrix::new(rho)
}

/// `S = -Tr(rho ln rho)` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64, QopsError> {
    let vals = rho.eigenvalues()?;
    Ok(vals
        .into_iter()
        .filter(|&l| l > tol::ENTROPY_CUTOFF)
        .map(|l| -l * l.ln())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn w_state(n: usize) -> StateVector {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        for site in 0..n {
            amps[1 << (n - 1 - site)] = C64::new(1.0, 0.0);
        }
        StateVector::normalized(n, amps).unwrap()
    }

    #[test]
    fn product_vacuum_half() {
        let s = StateVector::basis(6, 0).unwrap();
        let rho = reduced_density_matrix(&s, 0..3).unwrap();
        assert!((rho.operator().get(0, 0).re - 1.0).abs() < 1e-15);
        assert!(von_neumann_entropy(&rho).unwrap().abs() < 1e-12);
    }

    #[test]
    fn bell_pair_is_maximally_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = StateVector::from_amplitudes(
            2,
            vec![C64::new(h, 0.), C64::new(0., 0.), C64::new(0., 0.), C64::new(h, 0.)],
        )
        .unwrap();
        let rho = reduced_density_matrix(&s, 0..1).unwrap();
        let half = DenseOperator::identity(2).scale(C64::new(0.5, 0.0));
        assert!(rho.operator().max_abs_diff(&half) < 1e-15);
        assert!((von_neumann_entropy(&rho).unwrap() - LN_2).abs() < 1e-12);
    }

    #[test]
    fn w_state_half_chain() {
        // Oracle: the 8-site W state splits as (|0000>|W4> + |W4>|0000>)/sqrt2, so the
        // left-half state is diag(1/2 on |0000>, 1/2 on |W4>) built by hand here.
        let s = w_state(8);
        let rho = reduced_density_matrix(&s, 0..4).unwrap();
        let mut expect = Mat::<C64>::zeros(16, 16);
        expect[(0, 0)] = C64::new(0.5, 0.0);
        let w4 = [8usize, 4, 2, 1];
        for &a in &w4 {
            for &b in &w4 {
                expect[(a, b)] = C64::new(0.125, 0.0);
            }
        }
        assert!(rho.operator().max_abs_diff(&DenseOperator::new(expect)) < 1e-14);
        let vals = rho.eigenvalues().unwrap();
        let nonzero: Vec<f64> = vals.into_iter().filter(|v| v.abs() > 1e-12).collect();
        assert_eq!(nonzero.len(), 2);
        assert!(nonzero.iter().all(|v| (v - 0.5).abs() < 1e-12));
        assert!((von_neumann_entropy(&rho).unwrap() - LN_2).abs() < 1e-12);
    }

    #[test]
    fn interior_range() {
        let s = w_state(5);
        let rho = reduced_density_matrix(&s, 2..3).unwrap();
        assert!((rho.operator().get(1, 1).re - 0.2).abs() < 1e-14);
    }

    #[test]
    fn range_errors() {
        let s = StateVector::basis(4, 0).unwrap();
        assert!(reduced_density_matrix(&s, 2..2).is_err());
        assert!(reduced_density_matrix(&s, 3..5).is_err());
    }

    #[test]
    fn non_psd_rejected() {
        let mut m = Mat::<C64>::zeros(2, 2);
        m[(0, 0)] = C64::new(1.5, 0.0);
        m[(1, 1)] = C64::new(-0.5, 0.0);
        let rho = DensityMatrix::new(m).unwrap();
        assert!(matches!(von_neumann_entropy(&rho), Err(QopsError::NotPositive(_))));
        let mut m = Mat::<C64>::zeros(2, 2);
        m[(0, 0)] = C64::new(0.7, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(QopsError::BadTrace(_))));
    }

    #[test]
    fn entropy_bounded_by_subsystem_size() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let amps = (0..1 << 7)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let s = StateVector::normalized(7, amps).unwrap();
            for keep in [0..1, 0..3, 2..5, 4..7] {
                let len = keep.len() as f64;
                let rho = reduced_density_matrix(&s, keep).unwrap();
                let e = von_neumann_entropy(&rho).unwrap();
                assert!(e >= 0.0 && e <= len * LN_2 + 1e-9);
            }
        }
    }
}
