//! Compilation of two-qubit blocks and one-excitation states into the
//! trapped-ion gate set `{U1q, Rz, ZZ}` (plus `X`, `Z`), with QASM and JSON exchange.
//!
//! Native conventions: `U1q(theta, phi) = exp[-i theta/2 (cos phi X + sin phi Y)]`,
//! `Rz(lambda) = exp[-i lambda/2 Z]`, `ZZ(eta) = exp[-i eta/2 Z (x) Z]`. The first
//! qubit of a pair is the more significant bit of the 4x4 matrices.

mod fixtures;
mod kak;
mod prep;
mod qasm;
mod restricted;

pub use fixtures::{
    sm_prep_circuit, sm_prep_fixture, sm_prep_layers, table1_fixture, PrepConvention, PrepOp,
    Table1Record, TABLE1_FILL, TABLE1_G,
};
pub use kak::{decompose_general, kak, local_to_native, KakDecomposition};
pub use prep::{single_excitation_output, splitter_to_native, synthesize_state_prep, PREP_TOL};
pub use qasm::{emit_qasm, parse_qasm, QasmError};
pub use restricted::{
    decompose_restricted, template_circuit, template_unitary, RestrictedDecomposition, RotationTriple,
    TemplateOrdering, TemplateParams,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qops::{DenseOperator, QopsError, StateVector, MAX_QUBITS};
use crate::C64;

/// Phase-insensitive reconstruction tolerance, `1 - |Tr(V^dagger U)|/dim`.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NativeError {
    #[error("gate on qubit {qubit} outside a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("two-qubit gate on a single qubit {0}")]
    SameQubit(usize),
    #[error("non-finite angle")]
    NonFinite,
    #[error("input is not unitary (error {0:e})")]
    NotUnitary(f64),
    #[error("reconstruction distance {0:e} above tolerance")]
    Residual(f64),
    #[error("generator has a diagonal part (a = {a}, b = {b}); the two-ZZ template needs a = b = 0")]
    NotRestricted { a: f64, b: f64 },
    #[error("target state: {0}")]
    BadTarget(String),
    #[error("no fixture for {0}")]
    NoFixture(String),
    #[error(transparent)]
    Qops(#[from] QopsError),
}

/// Two-qubit block `cos g` / `+-sin g` on `{|01>, |10>}` of the ordered pair `(q1, q2)`:
/// `|01> -> cos g |01> + sin g |10>`, `|10> -> -sin g |01> + cos g |10>`.
/// Equal to `exp[i g (XY - YX)/2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitterGate {
    pub q1: usize,
    pub q2: usize,
    pub gamma: f64,
}

impl SplitterGate {
    pub fn matrix(&self) -> DenseOperator {
        splitter_matrix(self.gamma)
    }
}

pub(crate) fn splitter_matrix(gamma: f64) -> DenseOperator {
    let (s, c) = gamma.sin_cos();
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    DenseOperator::from_rows([
        [l, o, o, o],
        [o, C64::new(c, 0.0), C64::new(-s, 0.0), o],
        [o, C64::new(s, 0.0), C64::new(c, 0.0), o],
        [o, o, o, l],
    ])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NativeGate {
    U1q { q: usize, theta: f64, phi: f64 },
    Rz { q: usize, lambda: f64 },
    ZZ { q1: usize, q2: usize, eta: f64 },
    X { q: usize },
    Z { q: usize },
    /// Abstract excitation splitter; [`Circuit::lowered`] expands it into natives.
    Splitter(SplitterGate),
}

impl NativeGate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Self::U1q { q, .. } | Self::Rz { q, .. } | Self::X { q } | Self::Z { q } => vec![q],
            Self::ZZ { q1, q2, .. } => vec![q1, q2],
            Self::Splitter(s) => vec![s.q1, s.q2],
        }
    }

    pub fn angles(&self) -> Vec<f64> {
        match *self {
            Self::U1q { theta, phi, .. } => vec![theta, phi],
            Self::Rz { lambda, .. } => vec![lambda],
            Self::ZZ { eta, .. } => vec![eta],
            Self::X { .. } | Self::Z { .. } => vec![],
            Self::Splitter(s) => vec![s.gamma],
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::U1q { .. } => "u1q",
            Self::Rz { .. } => "rz",
            Self::ZZ { .. } => "zz",
            Self::X { .. } => "x",
            Self::Z { .. } => "z",
            Self::Splitter(_) => "splitter",
        }
    }

    pub fn is_entangling(&self) -> bool {
        matches!(self, Self::ZZ { .. } | Self::Splitter(_))
    }

    /// The gate's 2x2 or 4x4 matrix on its own qubits.
    pub fn matrix(&self) -> DenseOperator {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        match *self {
            Self::U1q { theta, phi, .. } => {
                let (s, c) = (theta / 2.0).sin_cos();
                let mi = C64::new(0.0, -1.0);
                DenseOperator::from_rows([
                    [C64::new(c, 0.0), mi * s * C64::from_polar(1.0, -phi)],
                    [mi * s * C64::from_polar(1.0, phi), C64::new(c, 0.0)],
                ])
            }
            Self::Rz { lambda, .. } => DenseOperator::from_rows([
                [C64::from_polar(1.0, -lambda / 2.0), o],
                [o, C64::from_polar(1.0, lambda / 2.0)],
            ]),
            Self::ZZ { eta, .. } => {
                let m = C64::from_polar(1.0, -eta / 2.0);
                let p = C64::from_polar(1.0, eta / 2.0);
                DenseOperator::from_rows([[m, o, o, o], [o, p, o, o], [o, o, p, o], [o, o, o, m]])
            }
            Self::X { .. } => DenseOperator::from_rows([[o, l], [l, o]]),
            Self::Z { .. } => DenseOperator::from_rows([[l, o], [o, -l]]),
            Self::Splitter(s) => s.matrix(),
        }
    }

    fn validate(&self, n: usize) -> Result<(), NativeError> {
        let qs = self.qubits();
        for &q in &qs {
            if q >= n {
                return Err(NativeError::QubitOutOfRange { qubit: q, n_qubits: n });
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(NativeError::SameQubit(qs[0]));
        }
        if self.angles().iter().any(|a| !a.is_finite()) {
            return Err(NativeError::NonFinite);
        }
        Ok(())
    }
}

/// Ordered gate list on `n_qubits` wires.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<NativeGate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<NativeGate>) -> Result<Self, NativeError> {
        let mut c = Self::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: NativeGate) -> Result<(), NativeError> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = NativeGate>) -> Result<(), NativeError> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[NativeGate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Number of two-qubit gates (ZZ or splitter).
    pub fn entangling_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_entangling()).count()
    }

    /// Layers of two-qubit gates under as-soon-as-possible scheduling;
    /// single-qubit gates do not add depth.
    pub fn entangling_depth(&self) -> usize {
        let mut level = vec![0usize; self.n_qubits];
        let mut depth = 0;
        for g in &self.gates {
            if let [a, b] = g.qubits()[..] {
                let l = level[a].max(level[b]) + 1;
                level[a] = l;
                level[b] = l;
                depth = depth.max(l);
            }
        }
        depth
    }

    /// Same circuit with every splitter expanded into native gates.
    pub fn lowered(&self) -> Result<Circuit, NativeError> {
        let mut out = Circuit::new(self.n_qubits);
        for g in &self.gates {
            match g {
                NativeGate::Splitter(s) => out.extend(splitter_to_native(s)?)?,
                other => out.push(*other)?,
            }
        }
        Ok(out)
    }

    pub fn apply(&self, state: &mut StateVector) -> Result<(), NativeError> {
        if state.n_qubits() != self.n_qubits {
            return Err(QopsError::DimensionMismatch {
                expected: 1 << self.n_qubits,
                got: state.dim(),
            }
            .into());
        }
        for g in &self.gates {
            match g.qubits()[..] {
                [q] => state.apply_gate2(&g.matrix().to_array2(), q),
                [a, b] => state.apply_gate4(&g.matrix().to_array4(), a, b),
                _ => unreachable!(),
            }
        }
        Ok(())
    }

    /// Output state from `|0...0>`.
    pub fn run_from_zero(&self) -> Result<StateVector, NativeError> {
        let mut s = StateVector::basis(self.n_qubits, 0)?;
        self.apply(&mut s)?;
        Ok(s)
    }

    /// Dense unitary, for registers up to 12 qubits.
    pub fn unitary(&self) -> Result<DenseOperator, NativeError> {
        if self.n_qubits > 12 || self.n_qubits > MAX_QUBITS {
            return Err(QopsError::TooLarge(1 << self.n_qubits).into());
        }
        let dim = 1usize << self.n_qubits;
        let mut cols = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut s = StateVector::basis(self.n_qubits, j)?;
            self.apply(&mut s)?;
            cols.push(s.into_amplitudes());
        }
        Ok(DenseOperator::from_fn(dim, |i, j| cols[j][i]))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let gates: Vec<GateRecord> = self
            .gates
            .iter()
            .map(|g| GateRecord {
                kind: g.kind_name().to_string(),
                qubits: g.qubits(),
                angles: g.angles(),
            })
            .collect();
        serde_json::to_value(CircuitRecord {
            n_qubits: self.n_qubits,
            gates,
        })
        .expect("plain data serialises")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, NativeError> {
        let rec: CircuitRecord = serde_json::from_value(v.clone())
            .map_err(|e| NativeError::BadTarget(format!("circuit JSON: {e}")))?;
        let mut c = Circuit::new(rec.n_qubits);
        for g in rec.gates {
            c.push(g.into_gate()?)?;
        }
        Ok(c)
    }
}

/// Machine-exchange form of a circuit: `{"n_qubits": N, "gates": [{kind, qubits, angles}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitRecord {
    pub n_qubits: usize,
    pub gates: Vec<GateRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateRecord {
    pub kind: String,
    pub qubits: Vec<usize>,
    pub angles: Vec<f64>,
}

impl GateRecord {
    fn into_gate(self) -> Result<NativeGate, NativeError> {
        let bad = || NativeError::BadTarget(format!("malformed {} record", self.kind));
        let g = match (self.kind.as_str(), &self.qubits[..], &self.angles[..]) {
            ("u1q", &[q], &[theta, phi]) => NativeGate::U1q { q, theta, phi },
            ("rz", &[q], &[lambda]) => NativeGate::Rz { q, lambda },
            ("zz", &[q1, q2], &[eta]) => NativeGate::ZZ { q1, q2, eta },
            ("x", &[q], &[]) => NativeGate::X { q },
            ("z", &[q], &[]) => NativeGate::Z { q },
            ("splitter", &[q1, q2], &[gamma]) => NativeGate::Splitter(SplitterGate { q1, q2, gamma }),
            _ => return Err(bad()),
        };
        Ok(g)
    }
}

/// Embeds a two-qubit circuit on wires `(0, 1)` onto `(q1, q2)` of a larger register.
pub fn relabel(gates: &[NativeGate], q1: usize, q2: usize) -> Vec<NativeGate> {
    let m = |q: usize| if q == 0 { q1 } else { q2 };
    gates
        .iter()
        .map(|g| match *g {
            NativeGate::U1q { q, theta, phi } => NativeGate::U1q { q: m(q), theta, phi },
            NativeGate::Rz { q, lambda } => NativeGate::Rz { q: m(q), lambda },
            NativeGate::ZZ { q1: a, q2: b, eta } => NativeGate::ZZ { q1: m(a), q2: m(b), eta },
            NativeGate::X { q } => NativeGate::X { q: m(q) },
            NativeGate::Z { q } => NativeGate::Z { q: m(q) },
            NativeGate::Splitter(s) => NativeGate::Splitter(SplitterGate {
                q1: m(s.q1),
                q2: m(s.q2),
                gamma: s.gamma,
            }),
        })
        .collect()
}
