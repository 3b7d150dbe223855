//! Two-ZZ template for purely off-diagonal local generators.

use serde::{Deserialize, Serialize};

use super::kak::{euler_zxz, kak, local_to_native, zz_alpha};
use super::{Circuit, NativeError, NativeGate, RECONSTRUCTION_TOL};
use crate::pvbs::{floquet_gate, GeneratorCoeffs};
use crate::qops::DenseOperator;
use crate::C64;

/// `R = e^{i t1 Z/2} e^{i t2 X/2} e^{i t3 Z/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationTriple(pub f64, pub f64, pub f64);

impl RotationTriple {
    pub const IDENTITY: Self = Self(0.0, 0.0, 0.0);

    pub fn matrix(&self) -> DenseOperator {
        let rz = |t: f64| {
            DenseOperator::from_rows([
                [C64::from_polar(1.0, t / 2.0), C64::new(0.0, 0.0)],
                [C64::new(0.0, 0.0), C64::from_polar(1.0, -t / 2.0)],
            ])
        };
        let (s, c) = (self.1 / 2.0).sin_cos();
        let rx = DenseOperator::from_rows([[C64::new(c, 0.0), C64::new(0.0, s)], [C64::new(0.0, s), C64::new(c, 0.0)]]);
        rz(self.0).matmul(&rx).matmul(&rz(self.2))
    }

    /// Triple equal to `w` up to global phase.
    pub fn from_unitary(w: &DenseOperator) -> Self {
        let (a, t, b) = euler_zxz(w);
        Self(-a, -t, -b)
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite() && self.1.is_finite() && self.2.is_finite()
    }
}

/// `(eta_1, eta_2, R_1..R_6)` of the two-ZZ template.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemplateParams {
    pub eta: [f64; 2],
    pub thetas: [RotationTriple; 6],
}

/// How the printed template is read as a matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TemplateOrdering {
    /// Printed order is the matrix product:
    /// `(R2 (x) R1) Z(eta1) (R4 (x) R3) Z(eta2) (R6 (x) R5)`, with `Z(eta) = e^{+i eta ZZ/2}`
    /// and even-numbered rotations on qubit 0. This is the reading under which the
    /// tabulated gate parameters reproduce the Floquet gates.
    MatrixProduct,
    /// Printed order is time order: `(R5 (x) R6) Z(eta2) (R3 (x) R4) Z(eta1) (R1 (x) R2)`
    /// with odd-numbered rotations on qubit 0.
    CircuitOrder,
}

fn zz_template(eta: f64) -> DenseOperator {
    zz_alpha(eta / 2.0)
}

pub fn template_unitary(p: &TemplateParams, ordering: TemplateOrdering) -> DenseOperator {
    let r: Vec<DenseOperator> = p.thetas.iter().map(RotationTriple::matrix).collect();
    match ordering {
        TemplateOrdering::MatrixProduct => r[1]
            .kron(&r[0])
            .matmul(&zz_template(p.eta[0]))
            .matmul(&r[3].kron(&r[2]))
            .matmul(&zz_template(p.eta[1]))
            .matmul(&r[5].kron(&r[4])),
        TemplateOrdering::CircuitOrder => r[4]
            .kron(&r[5])
            .matmul(&zz_template(p.eta[1]))
            .matmul(&r[2].kron(&r[3]))
            .matmul(&zz_template(p.eta[0]))
            .matmul(&r[0].kron(&r[1])),
    }
}

/// Native two-qubit circuit for template parameters in the matrix-product reading.
/// Zero `eta` entries produce no ZZ gate.
pub fn template_circuit(p: &TemplateParams) -> Result<Circuit, NativeError> {
    let t = &p.thetas;
    let mut gates = Vec::new();
    let layer = |q0: &RotationTriple, q1: &RotationTriple, gates: &mut Vec<NativeGate>| {
        gates.extend(local_to_native(&q0.matrix(), 0));
        gates.extend(local_to_native(&q1.matrix(), 1));
    };
    layer(&t[5], &t[4], &mut gates);
    if p.eta[1] != 0.0 {
        gates.push(NativeGate::ZZ { q1: 0, q2: 1, eta: -p.eta[1] });
    }
    layer(&t[3], &t[2], &mut gates);
    if p.eta[0] != 0.0 {
        gates.push(NativeGate::ZZ { q1: 0, q2: 1, eta: -p.eta[0] });
    }
    layer(&t[1], &t[0], &mut gates);
    Circuit::from_gates(2, gates)
}

#[derive(Clone, Debug)]
pub struct RestrictedDecomposition {
    pub circuit: Circuit,
    pub params: TemplateParams,
    /// Reconstruction distance of the circuit against `exp(iPhP)`.
    pub residual: f64,
}

/// Two-ZZ circuit for `exp(i P h P)` when `h` has no diagonal part.
pub fn decompose_restricted(g: C64, coeffs: &GeneratorCoeffs) -> Result<RestrictedDecomposition, NativeError> {
    if coeffs.a != 0.0 || coeffs.b != 0.0 {
        return Err(NativeError::NotRestricted { a: coeffs.a, b: coeffs.b });
    }
    if !coeffs.c.re.is_finite() || !coeffs.c.im.is_finite() {
        return Err(NativeError::NonFinite);
    }
    if coeffs.c == C64::new(0.0, 0.0) {
        return Ok(RestrictedDecomposition {
            circuit: Circuit::new(2),
            params: TemplateParams { eta: [0.0; 2], thetas: [RotationTriple::IDENTITY; 6] },
            residual: 0.0,
        });
    }
    let target = floquet_gate(g, coeffs).matrix;
    let dec = kak(&target)?;
    if dec.alphas.len() > 2 {
        return Err(NativeError::Residual(dec.coords.iter().map(|c| c.abs()).fold(f64::INFINITY, f64::min)));
    }
    let t = |l: &(DenseOperator, DenseOperator)| (RotationTriple::from_unitary(&l.0), RotationTriple::from_unitary(&l.1));
    let id = (RotationTriple::IDENTITY, RotationTriple::IDENTITY);
    // locals are in time order; template layers run last-applied first
    let (layers, eta) = match dec.alphas[..] {
        [a0, a1] => ([t(&dec.locals[2]), t(&dec.locals[1]), t(&dec.locals[0])], [2.0 * a1, 2.0 * a0]),
        [a0] => ([t(&dec.locals[1]), id, t(&dec.locals[0])], [0.0, 2.0 * a0]),
        _ => ([t(&dec.locals[0]), id, id], [0.0, 0.0]),
    };
    let thetas = [layers[0].1, layers[0].0, layers[1].1, layers[1].0, layers[2].1, layers[2].0];
    let params = TemplateParams { eta, thetas };
    let circuit = template_circuit(&params)?;
    let residual = circuit.unitary()?.phase_distance(&target);
    if residual > RECONSTRUCTION_TOL {
        return Err(NativeError::Residual(residual));
    }
    Ok(RestrictedDecomposition { circuit, params, residual })
}
