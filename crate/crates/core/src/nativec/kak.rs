//! Canonical two-qubit decomposition `U ~ (A1 (x) C1) exp[i(a XX + b YY + c ZZ)] (A0 (x) C0)`
//! through the magic basis, and ZXZ Euler angles for single-qubit blocks.

use std::f64::consts::{FRAC_PI_2, PI};

use faer::{Mat, Side};

use super::{Circuit, NativeError, NativeGate, RECONSTRUCTION_TOL};
use crate::qops::DenseOperator;
use crate::C64;

/// Canonical coordinates below this magnitude are dropped (their omission costs
/// about `angle^2 / 8` in the reconstruction distance).
pub(crate) const ANGLE_EPS: f64 = 1e-10;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Mixing angles for the real and imaginary parts of `U_B^T U_B`; a later one is
/// used only when an accidental degeneracy spoils the first.
const MIX: [f64; 5] = [0.4142135623730951, 1.2360679774997896, 2.718281828459045, -0.7853981633974483, 0.1];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Pauli {
    X,
    Y,
    Z,
}

pub(crate) fn pauli(p: Pauli) -> DenseOperator {
    match p {
        Pauli::X => DenseOperator::from_rows([[ZERO, ONE], [ONE, ZERO]]),
        Pauli::Y => DenseOperator::from_rows([[ZERO, -I], [I, ZERO]]),
        Pauli::Z => DenseOperator::from_rows([[ONE, ZERO], [ZERO, -ONE]]),
    }
}

/// `C` with `C P C^dagger = Z`.
fn to_z_frame(p: Pauli) -> DenseOperator {
    let h = (0.5f64).sqrt();
    let had = DenseOperator::from_rows([[C64::new(h, 0.0), C64::new(h, 0.0)], [C64::new(h, 0.0), C64::new(-h, 0.0)]]);
    match p {
        Pauli::X => had,
        Pauli::Y => had.matmul(&DenseOperator::from_rows([[ONE, ZERO], [ZERO, -I]])),
        Pauli::Z => DenseOperator::identity(2),
    }
}

fn magic() -> DenseOperator {
    let h = C64::new((0.5f64).sqrt(), 0.0);
    DenseOperator::from_rows([
        [h, h * I, ZERO, ZERO],
        [ZERO, ZERO, h * I, h],
        [ZERO, ZERO, h * I, -h],
        [h, -h * I, ZERO, ZERO],
    ])
}

pub(crate) fn det(m: &DenseOperator) -> C64 {
    let n = m.dim();
    let mut a: Vec<Vec<C64>> = (0..n).map(|i| (0..n).map(|j| m.get(i, j)).collect()).collect();
    let mut d = ONE;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| a[x][k].norm().total_cmp(&a[y][k].norm()))
            .expect("non-empty");
        if a[p][k].norm() == 0.0 {
            return ZERO;
        }
        if p != k {
            a.swap(p, k);
            d = -d;
        }
        d *= a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                let t = a[k][j];
                a[i][j] -= f * t;
            }
        }
    }
    d
}

/// `exp(i alpha Z (x) Z)` as the equivalent native gate `ZZ(-2 alpha)`.
pub(crate) fn zz_alpha(alpha: f64) -> DenseOperator {
    NativeGate::ZZ { q1: 0, q2: 1, eta: -2.0 * alpha }.matrix()
}

/// Splits a 4x4 product operator into `A (x) C` with both factors unitary up to phase.
pub(crate) fn factor_local(m: &DenseOperator) -> (DenseOperator, DenseOperator) {
    let (mut bi, mut bj, mut best) = (0, 0, -1.0);
    for i in 0..4 {
        for j in 0..4 {
            let v = m.get(i, j).norm();
            if v > best {
                (bi, bj, best) = (i, j, v);
            }
        }
    }
    let (i1, i2, j1, j2) = (bi >> 1, bi & 1, bj >> 1, bj & 1);
    let pivot = m.get(bi, bj);
    let a = DenseOperator::from_fn(2, |r, s| m.get(2 * r + i2, 2 * s + j2));
    let c = DenseOperator::from_fn(2, |r, s| m.get(2 * i1 + r, 2 * j1 + s) / pivot);
    (unit_scale(&a), unit_scale(&c))
}

fn unit_scale(m: &DenseOperator) -> DenseOperator {
    let s = det(m).norm().sqrt();
    m.scale(C64::new(1.0 / s, 0.0))
}

/// `(alpha, theta, beta)` with `W = e^{i delta} Rz(alpha) Rx(theta) Rz(beta)`.
pub(crate) fn euler_zxz(w: &DenseOperator) -> (f64, f64, f64) {
    let delta = det(w).arg() / 2.0;
    let v = w.scale(C64::from_polar(1.0, -delta));
    let (v00, v10) = (v.get(0, 0), v.get(1, 0));
    let theta = 2.0 * v10.norm().atan2(v00.norm());
    let sum = if v00.norm() > 1e-14 { -2.0 * v00.arg() } else { 0.0 };
    let diff = if v10.norm() > 1e-14 { 2.0 * (v10.arg() + FRAC_PI_2) } else { 0.0 };
    ((sum + diff) / 2.0, theta, (sum - diff) / 2.0)
}

/// Wraps an angle into `(-pi, pi]`.
pub(crate) fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Native sequence `Rz(alpha + beta), U1q(theta, alpha)` for a single-qubit unitary
/// acting on qubit `q`, with identity pieces left out.
pub fn local_to_native(w: &DenseOperator, q: usize) -> Vec<NativeGate> {
    let (alpha, theta, beta) = euler_zxz(w);
    let mut out = Vec::with_capacity(2);
    let lambda = wrap(alpha + beta);
    if lambda.abs() > ANGLE_EPS {
        out.push(NativeGate::Rz { q, lambda });
    }
    if theta.abs() > ANGLE_EPS {
        out.push(NativeGate::U1q { q, theta, phi: wrap(alpha) });
    }
    out
}

/// `U ~ locals[m] E(alphas[m-1]) ... E(alphas[0]) locals[0]` in time order, where
/// `E(alpha) = exp(i alpha Z (x) Z)` and each local is `(qubit-0 factor, qubit-1 factor)`.
#[derive(Clone, Debug)]
pub struct KakDecomposition {
    /// `(a, b, c)`, each reduced into `[-pi/4, pi/4]`.
    pub coords: [f64; 3],
    pub locals: Vec<(DenseOperator, DenseOperator)>,
    pub alphas: Vec<f64>,
}

impl KakDecomposition {
    pub fn unitary(&self) -> DenseOperator {
        let kr = |l: &(DenseOperator, DenseOperator)| l.0.kron(&l.1);
        let mut u = kr(&self.locals[0]);
        for (k, &a) in self.alphas.iter().enumerate() {
            u = kr(&self.locals[k + 1]).matmul(&zz_alpha(a)).matmul(&u);
        }
        u
    }

    pub fn to_gates(&self) -> Vec<NativeGate> {
        let mut out = Vec::new();
        for (k, l) in self.locals.iter().enumerate() {
            if k > 0 {
                out.push(NativeGate::ZZ { q1: 0, q2: 1, eta: -2.0 * self.alphas[k - 1] });
            }
            out.extend(local_to_native(&l.0, 0));
            out.extend(local_to_native(&l.1, 1));
        }
        out
    }
}

fn real_orthogonal_diagonalizer(m2: &DenseOperator) -> Option<Mat<f64>> {
    for &t in &MIX {
        let (s, c) = t.sin_cos();
        let r = Mat::<f64>::from_fn(4, 4, |i, j| {
            let z = m2.get(i, j);
            let v = c * z.re + s * z.im;
            let w = m2.get(j, i);
            (v + c * w.re + s * w.im) / 2.0
        });
        let Ok(evd) = r.self_adjoint_eigen(Side::Lower) else {
            continue;
        };
        let mut p = evd.U().to_owned();
        let pc = DenseOperator::from_fn(4, |i, j| C64::new(p[(i, j)], 0.0));
        let d = pc.adjoint().matmul(m2).matmul(&pc);
        let off = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| d.get(i, j).norm())
            .fold(0.0, f64::max);
        if off < 1e-9 {
            if det(&pc).re < 0.0 {
                for i in 0..4 {
                    p[(i, 3)] = -p[(i, 3)];
                }
            }
            return Some(p);
        }
    }
    None
}

/// Canonical decomposition of a 4x4 unitary, verified by reconstruction.
pub fn kak(u: &DenseOperator) -> Result<KakDecomposition, NativeError> {
    if u.dim() != 4 {
        return Err(NativeError::BadTarget(format!("expected a 4x4 operator, got {0}x{0}", u.dim())));
    }
    let err = u.unitarity_error();
    if err > crate::qops::tol::UNITARITY {
        return Err(NativeError::NotUnitary(err));
    }
    let us = u.scale(C64::from_polar(1.0, -det(u).arg() / 4.0));
    let b = magic();
    let up = b.adjoint().matmul(&us).matmul(&b);
    let up_t = DenseOperator::from_fn(4, |i, j| up.get(j, i));
    let m2 = up_t.matmul(&up);
    let p = real_orthogonal_diagonalizer(&m2).ok_or(NativeError::Residual(f64::NAN))?;
    let pc = DenseOperator::from_fn(4, |i, j| C64::new(p[(i, j)], 0.0));
    let d2 = pc.adjoint().matmul(&m2).matmul(&pc);
    let mut theta = [0.0; 4];
    for j in 0..3 {
        theta[j] = d2.get(j, j).arg() / 2.0;
    }
    theta[3] = -(theta[0] + theta[1] + theta[2]);
    let dinv = DenseOperator::from_fn(4, |i, j| if i == j { C64::from_polar(1.0, -theta[i]) } else { ZERO });
    let k1 = up.matmul(&pc).matmul(&dinv);
    let mut left = b.matmul(&k1).matmul(&b.adjoint());
    let right = b.matmul(&pc.adjoint()).matmul(&b.adjoint());

    let paulis = [Pauli::X, Pauli::Y, Pauli::Z];
    let mut coords = [0.0; 3];
    for (k, &p) in paulis.iter().enumerate() {
        let pp = pauli(p).kron(&pauli(p));
        let dpat: Vec<f64> = (0..4).map(|j| b.adjoint().matmul(&pp).matmul(&b).get(j, j).re).collect();
        let raw: f64 = (0..4).map(|j| theta[j] * dpat[j]).sum::<f64>() / 4.0;
        let shift = (raw / FRAC_PI_2).round();
        coords[k] = raw - shift * FRAC_PI_2;
        if (shift as i64).rem_euclid(2) == 1 {
            left = left.matmul(&pp);
        }
    }

    let mut stages: Vec<DenseOperator> = vec![right];
    let mut alphas = Vec::new();
    for k in [2usize, 1, 0] {
        let a = coords[k];
        if a.abs() <= ANGLE_EPS {
            continue;
        }
        let c = to_z_frame(paulis[k]);
        let cc = c.kron(&c);
        let last = stages.pop().expect("at least one stage");
        stages.push(cc.matmul(&last));
        alphas.push(a);
        stages.push(cc.adjoint());
    }
    let last = stages.pop().expect("at least one stage");
    stages.push(left.matmul(&last));

    let locals = stages.iter().map(factor_local).collect();
    let dec = KakDecomposition { coords, locals, alphas };
    let d = dec.unitary().phase_distance(u);
    if d > RECONSTRUCTION_TOL {
        return Err(NativeError::Residual(d));
    }
    Ok(dec)
}

/// Native circuit with at most three ZZ gates reproducing `U` up to global phase.
pub fn decompose_general(u: &DenseOperator) -> Result<Circuit, NativeError> {
    let dec = kak(u)?;
    let c = Circuit::from_gates(2, dec.to_gates())?;
    let d = c.unitary()?.phase_distance(u);
    if d > RECONSTRUCTION_TOL {
        return Err(NativeError::Residual(d));
    }
    Ok(c)
}
