use super::{tol, DenseOperator, QopsError};
use crate::C64;

pub const MAX_QUBITS: usize = 24;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Normalised amplitude vector over `n_qubits` qubits, qubit 0 most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

fn check_count(n: usize) -> Result<(), QopsError> {
    if n == 0 || n > MAX_QUBITS {
        return Err(QopsError::BadQubitCount(n));
    }
    Ok(())
}

impl StateVector {
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self, QopsError> {
        check_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(QopsError::IndexOutOfRange { index, n_qubits });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { n_qubits, amps })
    }

    /// Computational basis state from per-site bits, site 0 first.
    pub fn from_bits(bits: &[bool]) -> Result<Self, QopsError> {
        let n = bits.len();
        check_count(n)?;
        let index = bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b));
        Self::basis(n, index)
    }

    /// Wraps amplitudes that are already normalised.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<C64>) -> Result<Self, QopsError> {
        check_count(n_qubits)?;
        if amps.len() != 1usize << n_qubits {
            return Err(QopsError::DimensionMismatch {
                expected: 1usize << n_qubits,
                got: amps.len(),
            });
        }
        let s = Self { n_qubits, amps };
        let n2 = s.norm_sqr();
        if (n2 - 1.0).abs() > 1e3 * tol::NORM {
            return Err(QopsError::NotNormalized(n2.sqrt()));
        }
        Ok(s)
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(n_qubits: usize, mut amps: Vec<C64>) -> Result<Self, QopsError> {
        let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(QopsError::NotNormalized(n2.sqrt()));
        }
        let inv = 1.0 / n2.sqrt();
        for a in &mut amps {
            *a *= inv;
        }
        Self::from_amplitudes(n_qubits, amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Removes accumulated rounding drift from the norm.
    pub fn renormalize(&mut self) {
        let inv = 1.0 / self.norm();
        for a in &mut self.amps {
            *a *= inv;
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        assert_eq!(self.dim(), other.dim(), "state dimensions differ");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Euclidean distance `||self - other||`.
    pub fn distance(&self, other: &StateVector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "state dimensions differ");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn site_mask(&self, site: usize) -> usize {
        1usize << (self.n_qubits - 1 - site)
    }

    fn check_site(&self, site: usize) -> Result<(), QopsError> {
        if site >= self.n_qubits {
            return Err(QopsError::IndexOutOfRange {
                index: site,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// `<Z_n>` for every site.
    pub fn z_expectations(&self) -> Vec<f64> {
        let n = self.n_qubits;
        let mut ones = vec![0.0; n];
        for (idx, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            for (site, o) in ones.iter_mut().enumerate() {
                if idx & (1usize << (n - 1 - site)) != 0 {
                    *o += p;
                }
            }
        }
        ones.into_iter().map(|p1| 1.0 - 2.0 * p1).collect()
    }

    /// `<sum_n Z_n>`.
    pub fn total_magnetization(&self) -> f64 {
        let n = self.n_qubits as f64;
        let excitations: f64 = self
            .amps
            .iter()
            .enumerate()
            .map(|(idx, a)| a.norm_sqr() * idx.count_ones() as f64)
            .sum();
        n - 2.0 * excitations
    }

    /// Applies a 4x4 gate to the ordered pair `(q1, q2)`; `q1` indexes the more
    /// significant bit of the gate's own basis.
    pub fn apply_two_qubit(
        &mut self,
        gate: &DenseOperator,
        q1: usize,
        q2: usize,
    ) -> Result<(), QopsError> {
        self.check_site(q1)?;
        self.check_site(q2)?;
        if q1 == q2 {
            return Err(QopsError::SameQubit(q1));
        }
        if gate.dim() != 4 {
            return Err(QopsError::DimensionMismatch {
                expected: 4,
                got: gate.dim(),
            });
        }
        if !gate.is_unitary_flagged() {
            let err = gate.unitarity_error();
            if err > tol::UNITARITY {
                return Err(QopsError::NotUnitary(err));
            }
        }
        self.apply_gate4(&gate.to_array4(), q1, q2);
        Ok(())
    }

    pub fn apply_single(&mut self, gate: &DenseOperator, q: usize) -> Result<(), QopsError> {
        self.check_site(q)?;
        if gate.dim() != 2 {
            return Err(QopsError::DimensionMismatch {
                expected: 2,
                got: gate.dim(),
            });
        }
        if !gate.is_unitary_flagged() {
            let err = gate.unitarity_error();
            if err > tol::UNITARITY {
                return Err(QopsError::NotUnitary(err));
            }
        }
        self.apply_gate2(&gate.to_array2(), q);
        Ok(())
    }

    /// Unchecked kernel behind [`apply_two_qubit`](Self::apply_two_qubit).
    /// Indices must be valid and distinct; `g` is row-major.
    pub fn apply_gate4(&mut self, g: &[C64; 16], q1: usize, q2: usize) {
        apply4_raw(&mut self.amps, self.n_qubits, g, q1, q2);
    }

    /// Unchecked single-qubit kernel; `g` is row-major.
    pub fn apply_gate2(&mut self, g: &[C64; 4], q: usize) {
        apply2_raw(&mut self.amps, self.n_qubits, g, q);
    }

    /// Multiplies each amplitude by a phase that depends on the basis index.
    pub fn apply_diagonal(&mut self, phase: impl Fn(usize) -> C64) {
        for (idx, a) in self.amps.iter_mut().enumerate() {
            *a *= phase(idx);
        }
    }

    pub fn flip(&mut self, q: usize) {
        let m = self.site_mask(q);
        for k in 0..self.amps.len() >> 1 {
            let i0 = insert_zero(k, m);
            self.amps.swap(i0, i0 | m);
        }
    }
}

/// Applies a row-major 4x4 matrix to the ordered pair `(q1, q2)` of a raw
/// amplitude buffer over `n` qubits. No unitarity or range checks.
pub fn apply4_raw(amps: &mut [C64], n: usize, g: &[C64; 16], q1: usize, q2: usize) {
    let m1 = 1usize << (n - 1 - q1);
    let m2 = 1usize << (n - 1 - q2);
    let (lo, hi) = if m1 < m2 { (m1, m2) } else { (m2, m1) };
    for k in 0..amps.len() >> 2 {
        let i = insert_zero(insert_zero(k, lo), hi);
        let idx = [i, i | m2, i | m1, i | m1 | m2];
        let a = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for r in 0..4 {
            amps[idx[r]] =
                g[4 * r] * a[0] + g[4 * r + 1] * a[1] + g[4 * r + 2] * a[2] + g[4 * r + 3] * a[3];
        }
    }
}

/// Single-qubit counterpart of [`apply4_raw`].
pub fn apply2_raw(amps: &mut [C64], n: usize, g: &[C64; 4], q: usize) {
    let m = 1usize << (n - 1 - q);
    for k in 0..amps.len() >> 1 {
        let i0 = insert_zero(k, m);
        let i1 = i0 | m;
        let (a0, a1) = (amps[i0], amps[i1]);
        amps[i0] = g[0] * a0 + g[1] * a1;
        amps[i1] = g[2] * a0 + g[3] * a1;
    }
}

/// Inserts a zero bit at the position of the single-bit `mask`.
#[inline]
fn insert_zero(k: usize, mask: usize) -> usize {
    let low = k & (mask - 1);
    ((k ^ low) << 1) | low
}

/// Functional form of [`StateVector::apply_two_qubit`].
pub fn apply_two_qubit(
    state: &StateVector,
    gate: &DenseOperator,
    q1: usize,
    q2: usize,
) -> Result<StateVector, QopsError> {
    let mut out = state.clone();
    out.apply_two_qubit(gate, q1, q2)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qops::reduced_density_matrix;
    use proptest::prelude::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn swap() -> DenseOperator {
        let mut m = [[c(0.); 4]; 4];
        m[0][0] = c(1.);
        m[1][2] = c(1.);
        m[2][1] = c(1.);
        m[3][3] = c(1.);
        DenseOperator::from_rows(m)
    }

    fn pauli_x() -> DenseOperator {
        DenseOperator::from_rows([[c(0.), c(1.)], [c(1.), c(0.)]])
    }

    #[test]
    fn identity_gate_is_noop() {
        let s = StateVector::normalized(2, vec![c(1.), C64::new(0., 2.), c(-1.), c(0.5)]).unwrap();
        let out = apply_two_qubit(&s, &DenseOperator::identity(4), 0, 1).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn swap_moves_excitation() {
        let s = StateVector::from_bits(&[true, false]).unwrap();
        let out = apply_two_qubit(&s, &swap(), 0, 1).unwrap();
        assert_eq!(out, StateVector::from_bits(&[false, true]).unwrap());
    }

    #[test]
    fn x_on_first_qubit() {
        let s = StateVector::basis(2, 0).unwrap();
        let xi = pauli_x().kron(&DenseOperator::identity(2));
        let out = apply_two_qubit(&s, &xi, 0, 1).unwrap();
        assert_eq!(out, StateVector::from_bits(&[true, false]).unwrap());
    }

    #[test]
    fn ordered_pair_respected_for_distant_qubits() {
        // X (x) I on the ordered pair (3, 0) flips qubit 3 only
        let s = StateVector::basis(5, 0).unwrap();
        let xi = pauli_x().kron(&DenseOperator::identity(2));
        let out = apply_two_qubit(&s, &xi, 3, 0).unwrap();
        assert_eq!(out, StateVector::from_bits(&[false, false, false, true, false]).unwrap());
    }

    #[test]
    fn error_paths() {
        let mut s = StateVector::basis(3, 0).unwrap();
        let id = DenseOperator::identity(4);
        assert_eq!(
            s.apply_two_qubit(&id, 0, 3),
            Err(QopsError::IndexOutOfRange { index: 3, n_qubits: 3 })
        );
        assert_eq!(s.apply_two_qubit(&id, 1, 1), Err(QopsError::SameQubit(1)));
        let bad = DenseOperator::from_fn(4, |i, j| if i == j { c(2.) } else { c(0.) });
        assert!(matches!(s.apply_two_qubit(&bad, 0, 1), Err(QopsError::NotUnitary(_))));
        assert!(StateVector::basis(0, 0).is_err());
        assert!(StateVector::basis(25, 0).is_err());
        assert!(StateVector::from_amplitudes(1, vec![c(1.), c(1.)]).is_err());
    }

    #[test]
    fn magnetization_helpers() {
        let s = StateVector::from_bits(&[true, false, false]).unwrap();
        assert_eq!(s.z_expectations(), vec![-1.0, 1.0, 1.0]);
        assert_eq!(s.total_magnetization(), 1.0);
    }

    fn haar4(seed: &[f64]) -> DenseOperator {
        // QR of a complex Gaussian-ish matrix built from the seed values
        let m = faer::Mat::from_fn(4, 4, |i, j| C64::new(seed[8 * i + 2 * j], seed[8 * i + 2 * j + 1]));
        let q = m.qr().compute_Q();
        DenseOperator::new(q)
    }

    fn rand_state(n: usize, vals: &[f64]) -> StateVector {
        let amps = (0..1usize << n)
            .map(|i| C64::new(vals[(2 * i) % vals.len()] + 0.01, vals[(2 * i + 1) % vals.len()]))
            .collect();
        StateVector::normalized(n, amps).unwrap()
    }

    proptest! {
        #[test]
        fn norm_preserved(seed in prop::collection::vec(-1.0f64..1.0, 32),
                          vals in prop::collection::vec(-1.0f64..1.0, 64),
                          q1 in 0usize..5, q2 in 0usize..5) {
            prop_assume!(q1 != q2);
            let g = haar4(&seed);
            prop_assume!(g.unitarity_error() < 1e-12);
            let mut s = rand_state(5, &vals);
            s.apply_two_qubit(&g, q1, q2).unwrap();
            prop_assert!((s.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn gate_then_adjoint_restores(seed in prop::collection::vec(-1.0f64..1.0, 32),
                                      vals in prop::collection::vec(-1.0f64..1.0, 64),
                                      q1 in 0usize..4, q2 in 0usize..4) {
            prop_assume!(q1 != q2);
            let g = haar4(&seed);
            prop_assume!(g.unitarity_error() < 1e-12);
            let s0 = rand_state(4, &vals);
            let mut s = s0.clone();
            s.apply_two_qubit(&g, q1, q2).unwrap();
            s.apply_two_qubit(&g.adjoint(), q1, q2).unwrap();
            for (a, b) in s.amplitudes().iter().zip(s0.amplitudes()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }

        #[test]
        fn disjoint_sites_untouched(seed in prop::collection::vec(-1.0f64..1.0, 32),
                                    thetas in prop::collection::vec(0.0f64..3.0, 5)) {
            let g = haar4(&seed);
            prop_assume!(g.unitarity_error() < 1e-12);
            // product state of single-qubit rotations
            let mut amps = vec![c(1.)];
            for t in &thetas {
                let (s, co) = t.sin_cos();
                amps = amps.iter().flat_map(|a| [a * co, a * C64::new(0., s)]).collect();
            }
            let s0 = StateVector::from_amplitudes(5, amps).unwrap();
            let mut s = s0.clone();
            s.apply_two_qubit(&g, 1, 2).unwrap();
            for range in [0..1, 3..5, 3..4, 4..5] {
                let a = reduced_density_matrix(&s0, range.clone()).unwrap();
                let b = reduced_density_matrix(&s, range).unwrap();
                prop_assert!(a.operator().max_abs_diff(b.operator()) < 1e-12);
            }
        }
    }

    #[test]
    fn thousand_random_gates_preserve_norm() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut s = StateVector::basis(6, 0).unwrap();
        for _ in 0..1000 {
            let seed: Vec<f64> = (0..32).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let g = haar4(&seed);
            let q1 = rng.gen_range(0..6);
            let q2 = (q1 + rng.gen_range(1..6)) % 6;
            s.apply_two_qubit(&g, q1, q2).unwrap();
            assert!((s.norm() - 1.0).abs() < 1e-12);
        }
    }
}
