//! Kinetically constrained limits and the site-reflection duality.

use super::{local_interaction, GeneratorCoeffs};
use crate::qops::DenseOperator;
use crate::C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

fn one_qubit(a: f64, b: f64, off: C64) -> DenseOperator {
    DenseOperator::from_rows([[C64::new(a, 0.0), off], [off.conj(), C64::new(b, 0.0)]])
}

fn proj_one() -> DenseOperator {
    DenseOperator::from_rows([[ZERO, ZERO], [ZERO, C64::new(1.0, 0.0)]])
}

/// `|1><1| (x) h_East` with `h_East = a|0><0| + b|1><1| - c|0><1| - c*|1><0|`,
/// the `g = 0` interaction.
pub fn east_form(coeffs: &GeneratorCoeffs) -> DenseOperator {
    proj_one().kron(&one_qubit(coeffs.a, coeffs.b, -coeffs.c))
}

/// `h_West (x) |1><1|` with `h_West = a|0><0| + b|1><1| + c|0><1| + c*|1><0|`.
pub fn west_form(coeffs: &GeneratorCoeffs) -> DenseOperator {
    one_qubit(coeffs.a, coeffs.b, coeffs.c).kron(&proj_one())
}

/// Coefficients whose West form the interaction approaches as `|g|` grows:
/// `c` picks up the phase of `<01|psi>`, i.e. `g*/|g|`.
pub fn west_rescaled(g: C64, coeffs: &GeneratorCoeffs) -> GeneratorCoeffs {
    GeneratorCoeffs {
        c: coeffs.c * g.conj() / g.norm(),
        ..*coeffs
    }
}

/// `SWAP M SWAP` for a 4x4 operator.
pub fn reflect_pair(m: &DenseOperator) -> DenseOperator {
    let perm = [0usize, 2, 1, 3];
    DenseOperator::from_fn(4, |i, j| m.get(perm[i], perm[j]))
}

/// Coefficients `c'` with `SWAP H^(g)(a,b,c) SWAP = H^(1/g)(a,b,c')`.
///
/// Reflection maps `|psi^(g)>` to `-(g*/|g|) |psi^(1/g)>`, so only the phase of
/// the coupling changes.
pub fn dual_coeffs(g: C64, coeffs: &GeneratorCoeffs) -> GeneratorCoeffs {
    let omega = -g.conj() / g.norm();
    GeneratorCoeffs {
        c: coeffs.c * omega,
        ..*coeffs
    }
}

/// Direction mismatch `1 - |Tr(A^dagger B)| / (||A||_F ||B||_F)` between two
/// operators; zero when one is a scalar multiple of the other.
pub fn structural_distance(a: &DenseOperator, b: &DenseOperator) -> f64 {
    let n = a.dim();
    assert_eq!(n, b.dim());
    let (mut tr, mut na, mut nb) = (ZERO, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (a.get(i, j), b.get(i, j));
            tr += x.conj() * y;
            na += x.norm_sqr();
            nb += y.norm_sqr();
        }
    }
    if na == 0.0 || nb == 0.0 {
        return if na == nb { 0.0 } else { 1.0 };
    }
    (1.0 - tr.norm() / (na.sqrt() * nb.sqrt())).max(0.0)
}

/// Interaction at `g` compared with its large-`|g|` West form.
pub fn west_deviation(g: C64, coeffs: &GeneratorCoeffs) -> (f64, f64) {
    let h = local_interaction(g, coeffs).matrix;
    let w = west_form(&west_rescaled(g, coeffs));
    (structural_distance(&h, &w), h.max_abs_diff(&w))
}
