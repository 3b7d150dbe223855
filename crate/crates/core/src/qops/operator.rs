use faer::Mat;

use super::{tol, QopsError};
use crate::C64;

/// Square complex matrix with optional declared structure.
///
/// The flags are only ever set by the validating constructors, so a flagged
/// operator is known to satisfy the corresponding tolerance.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    mat: Mat<C64>,
    hermitian: bool,
    unitary: bool,
}

impl DenseOperator {
    pub fn new(mat: Mat<C64>) -> Self {
        assert_eq!(mat.nrows(), mat.ncols(), "operator must be square");
        Self {
            mat,
            hermitian: false,
            unitary: false,
        }
    }

    pub fn hermitian(mat: Mat<C64>) -> Result<Self, QopsError> {
        let mut op = Self::new(mat);
        let err = op.hermiticity_error();
        if err > tol::HERMITICITY {
            return Err(QopsError::NotHermitian(err));
        }
        op.hermitian = true;
        Ok(op)
    }

    pub fn unitary(mat: Mat<C64>) -> Result<Self, QopsError> {
        let mut op = Self::new(mat);
        let err = op.unitarity_error();
        if err > tol::UNITARITY {
            return Err(QopsError::NotUnitary(err));
        }
        op.unitary = true;
        Ok(op)
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self::new(Mat::from_fn(dim, dim, f))
    }

    /// Builds from row-major entries.
    pub fn from_rows<const D: usize>(rows: [[C64; D]; D]) -> Self {
        Self::from_fn(D, |i, j| rows[i][j])
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::new(Mat::identity(dim, dim));
        op.hermitian = true;
        op.unitary = true;
        op
    }

    pub fn zeros(dim: usize) -> Self {
        let mut op = Self::new(Mat::zeros(dim, dim));
        op.hermitian = true;
        op
    }

    /// Rank-one operator `|a><b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        assert_eq!(a.len(), b.len());
        Self::from_fn(a.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &Mat<C64> {
        &self.mat
    }

    pub fn into_mat(self) -> Mat<C64> {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    pub fn is_hermitian_flagged(&self) -> bool {
        self.hermitian
    }

    pub fn is_unitary_flagged(&self) -> bool {
        self.unitary
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                worst = worst.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim();
        let prod = self.mat.adjoint() * &self.mat;
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let target = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                worst = worst.max((prod[(i, j)] - target).norm());
            }
        }
        worst
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint().to_owned(),
            hermitian: self.hermitian,
            unitary: self.unitary,
        }
    }

    pub fn matmul(&self, rhs: &DenseOperator) -> Self {
        Self::new(&self.mat * &rhs.mat)
    }

    /// Tensor product with `self` on the more significant qubits.
    pub fn kron(&self, rhs: &DenseOperator) -> Self {
        let (a, b) = (self.dim(), rhs.dim());
        Self::from_fn(a * b, |i, j| self.mat[(i / b, j / b)] * rhs.mat[(i % b, j % b)])
    }

    pub fn add(&self, rhs: &DenseOperator) -> Self {
        Self::new(&self.mat + &rhs.mat)
    }

    pub fn sub(&self, rhs: &DenseOperator) -> Self {
        Self::new(&self.mat - &rhs.mat)
    }

    pub fn scale(&self, s: C64) -> Self {
        let n = self.dim();
        Self::from_fn(n, |i, j| self.mat[(i, j)] * s)
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim();
        assert_eq!(v.len(), n, "vector length must match operator dimension");
        let mut out = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            let vj = v[j];
            if vj == C64::new(0.0, 0.0) {
                continue;
            }
            let col = self.mat.col(j);
            for (o, m) in out.iter_mut().zip(col.iter()) {
                *o += m * vj;
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.mat[(i, i)]).sum()
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        assert_eq!(self.dim(), other.dim());
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                worst = worst.max((self.mat[(i, j)] - other.mat[(i, j)]).norm());
            }
        }
        worst
    }

    /// Max-entry norm of the commutator `[self, other]`.
    pub fn commutator_max_norm(&self, other: &DenseOperator) -> f64 {
        let ab = &self.mat * &other.mat;
        let ba = &other.mat * &self.mat;
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                worst = worst.max((ab[(i, j)] - ba[(i, j)]).norm());
            }
        }
        worst
    }

    /// Phase-insensitive distance `1 - |Tr(other^dagger self)| / dim`.
    pub fn phase_distance(&self, other: &DenseOperator) -> f64 {
        let n = self.dim();
        assert_eq!(n, other.dim());
        let mut tr = C64::new(0.0, 0.0);
        for j in 0..n {
            for i in 0..n {
                tr += other.mat[(i, j)].conj() * self.mat[(i, j)];
            }
        }
        (1.0 - tr.norm() / n as f64).max(0.0)
    }

    /// Row-major copy of a 4x4 operator, the layout used by the gate kernels.
    pub fn to_array4(&self) -> [C64; 16] {
        assert_eq!(self.dim(), 4);
        let mut out = [C64::new(0.0, 0.0); 16];
        for i in 0..4 {
            for j in 0..4 {
                out[4 * i + j] = self.mat[(i, j)];
            }
        }
        out
    }

    pub fn to_array2(&self) -> [C64; 4] {
        assert_eq!(self.dim(), 2);
        [self.mat[(0, 0)], self.mat[(0, 1)], self.mat[(1, 0)], self.mat[(1, 1)]]
    }
}
