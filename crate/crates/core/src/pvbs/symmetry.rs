//! Site reflection and parity on the computational basis.

use crate::qops::DenseOperator;
use crate::C64;

/// Basis index with the site order reversed.
pub fn reflect_index(i: usize, n: usize) -> usize {
    i.reverse_bits() >> (usize::BITS as usize - n)
}

/// Exact integer symmetry operators of the chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryOp {
    /// Site reflection `R`.
    Reflection,
    /// `Pi R` with `Pi = (-1)^{number of excitations}`.
    ParityReflection,
}

impl SymmetryOp {
    /// The symmetry of the deformed models at real `g = +1` or `g = -1`.
    pub fn for_g(g: C64) -> Option<Self> {
        if g.im != 0.0 {
            return None;
        }
        if g.re == 1.0 {
            Some(Self::ParityReflection)
        } else if g.re == -1.0 {
            Some(Self::Reflection)
        } else {
            None
        }
    }

    /// `(image index, sign)` of basis state `i`.
    pub fn map(&self, i: usize, n: usize) -> (usize, f64) {
        let j = reflect_index(i, n);
        match self {
            Self::Reflection => (j, 1.0),
            Self::ParityReflection => (j, if i.count_ones() % 2 == 0 { 1.0 } else { -1.0 }),
        }
    }

    pub fn apply(&self, v: &[C64], n: usize) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for (i, a) in v.iter().enumerate() {
            let (j, s) = self.map(i, n);
            out[j] += a * s;
        }
        out
    }

    pub fn dense(&self, n: usize) -> DenseOperator {
        let dim = 1usize << n;
        let mut m = faer::Mat::<C64>::zeros(dim, dim);
        for i in 0..dim {
            let (j, s) = self.map(i, n);
            m[(j, i)] = C64::new(s, 0.0);
        }
        DenseOperator::new(m)
    }
}

pub fn reflection_operator(n: usize) -> DenseOperator {
    SymmetryOp::Reflection.dense(n)
}

pub fn parity_reflection_operator(n: usize) -> DenseOperator {
    SymmetryOp::ParityReflection.dense(n)
}
