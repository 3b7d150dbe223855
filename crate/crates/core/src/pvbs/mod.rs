//! Local projectors, generators, Hamiltonians and Floquet layers.

mod limits;
mod symmetry;

pub use limits::{
    dual_coeffs, east_form, reflect_pair, structural_distance, west_deviation, west_form,
    west_rescaled,
};
pub use symmetry::{parity_reflection_operator, reflect_index, reflection_operator, SymmetryOp};

use faer::Mat;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qops::{apply4_raw, DenseOperator, QopsError, StateVector};
use crate::C64;

/// Dense many-body operators are built up to this size (2^14 amplitudes per column).
pub const DENSE_MAX_QUBITS: usize = 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PvbsError {
    #[error("brickwork models need an even qubit count >= 4, got {0}")]
    BadSize(usize),
    #[error("g = 0 requires the explicit East-limit flag")]
    ZeroG,
    #[error("g must be finite")]
    NonFiniteG,
    #[error("dense construction capped at {DENSE_MAX_QUBITS} qubits, got {0}")]
    DenseCap(usize),
    #[error("state has {got} qubits but the model has {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Qops(#[from] QopsError),
}

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Coefficients of `a|psi><psi| + b|11><11| + c|psi><11| + c*|11><psi|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: C64,
}

impl GeneratorCoeffs {
    pub const ZERO: GeneratorCoeffs = GeneratorCoeffs { a: 0.0, b: 0.0, c: ZERO };

    pub fn new(a: f64, b: f64, c: C64) -> Self {
        Self { a, b, c }
    }

    /// `alpha_x sx + alpha_y sy + alpha_z sz` in the block Pauli basis, with
    /// `sy = i|psi><11| - i|11><psi|`.
    pub fn from_sigma(alpha_x: f64, alpha_y: f64, alpha_z: f64) -> Self {
        Self {
            a: alpha_z,
            b: -alpha_z,
            c: C64::new(alpha_x, alpha_y),
        }
    }

    pub fn sigma_x() -> Self {
        Self::from_sigma(1.0, 0.0, 0.0)
    }

    pub fn sigma_y() -> Self {
        Self::from_sigma(0.0, 1.0, 0.0)
    }

    pub fn sigma_z() -> Self {
        Self::from_sigma(0.0, 0.0, 1.0)
    }

    /// Even-bond generator of the hardware experiment, `(1+2i)|11><psi| + h.c.`.
    pub fn paper_even() -> Self {
        Self::new(0.0, 0.0, C64::new(1.0, -2.0))
    }

    /// Odd-bond generator of the hardware experiment, `((6+i pi)/2)|11><psi| + h.c.`.
    pub fn paper_odd() -> Self {
        Self::new(0.0, 0.0, C64::new(3.0, -std::f64::consts::FRAC_PI_2))
    }

    /// True when only the off-diagonal coupling is present.
    pub fn is_off_diagonal(&self) -> bool {
        self.a == 0.0 && self.b == 0.0
    }

    /// The 2x2 block in the ordered basis `{|psi>, |11>}`.
    pub fn block(&self) -> [[C64; 2]; 2] {
        [[C64::new(self.a, 0.0), self.c], [self.c.conj(), C64::new(self.b, 0.0)]]
    }
}

/// Named generator pairs `(even, odd)`.
pub fn preset(name: &str) -> Option<(GeneratorCoeffs, GeneratorCoeffs)> {
    use std::f64::consts::FRAC_PI_2;
    match name {
        "paper" => Some((GeneratorCoeffs::paper_even(), GeneratorCoeffs::paper_odd())),
        "smF-deg" => Some((
            GeneratorCoeffs::from_sigma(1.0, 2.0, 0.0),
            GeneratorCoeffs::from_sigma(3.0, FRAC_PI_2, 0.0),
        )),
        "smF-nodeg" => Some((
            GeneratorCoeffs::from_sigma(1.0, 2.0, 1.0),
            GeneratorCoeffs::from_sigma(3.0, FRAC_PI_2, 0.0),
        )),
        "smH-zero" => Some((
            GeneratorCoeffs::from_sigma(1.0, 2.0, 0.0),
            GeneratorCoeffs::from_sigma(2.0, FRAC_PI_2, 0.0),
        )),
        _ => None,
    }
}

pub const PRESET_NAMES: [&str; 4] = ["paper", "smF-deg", "smF-nodeg", "smH-zero"];

/// Complete description of a Hamiltonian or Floquet model on an open chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub g: C64,
    pub n_qubits: usize,
    pub gen_even: GeneratorCoeffs,
    pub gen_odd: GeneratorCoeffs,
    pub east_limit: bool,
}

impl ModelParams {
    pub fn new(
        g: C64,
        n_qubits: usize,
        gen_even: GeneratorCoeffs,
        gen_odd: GeneratorCoeffs,
    ) -> Result<Self, PvbsError> {
        let p = Self {
            g,
            n_qubits,
            gen_even,
            gen_odd,
            east_limit: false,
        };
        p.validate()?;
        Ok(p)
    }

    /// The `g = 0` model, where every interaction is conditioned on its left site.
    pub fn east(
        n_qubits: usize,
        gen_even: GeneratorCoeffs,
        gen_odd: GeneratorCoeffs,
    ) -> Result<Self, PvbsError> {
        let p = Self {
            g: ZERO,
            n_qubits,
            gen_even,
            gen_odd,
            east_limit: true,
        };
        p.validate()?;
        Ok(p)
    }

    /// Real `g` with the experiment's generators.
    pub fn paper(g: f64, n_qubits: usize) -> Result<Self, PvbsError> {
        Self::new(
            C64::new(g, 0.0),
            n_qubits,
            GeneratorCoeffs::paper_even(),
            GeneratorCoeffs::paper_odd(),
        )
    }

    pub fn validate(&self) -> Result<(), PvbsError> {
        if self.n_qubits < 4 || self.n_qubits % 2 != 0 || self.n_qubits > crate::qops::MAX_QUBITS {
            return Err(PvbsError::BadSize(self.n_qubits));
        }
        if !self.g.re.is_finite() || !self.g.im.is_finite() {
            return Err(PvbsError::NonFiniteG);
        }
        if self.g == ZERO && !self.east_limit {
            return Err(PvbsError::ZeroG);
        }
        Ok(())
    }

    /// Generator acting on bond `(n, n+1)`.
    pub fn coeffs_for_bond(&self, n: usize) -> &GeneratorCoeffs {
        if n % 2 == 0 {
            &self.gen_even
        } else {
            &self.gen_odd
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    Projector,
    Generator,
    Interaction,
    Gate,
}

#[derive(Clone, Debug)]
pub struct LocalBlock {
    pub matrix: DenseOperator,
    pub kind: BlockKind,
}

fn norm_factor(g: C64) -> f64 {
    1.0 / (1.0 + g.norm_sqr()).sqrt()
}

/// `(g*|01> - |10>) / sqrt(1 + |g|^2)` in the basis `|00>, |01>, |10>, |11>`.
pub fn psi_g(g: C64) -> [C64; 4] {
    let s = norm_factor(g);
    [ZERO, g.conj() * s, C64::new(-s, 0.0), ZERO]
}

/// `(|01> + g|10>) / sqrt(1 + |g|^2)`, the excitation-carrying kernel vector.
pub fn psi_perp(g: C64) -> [C64; 4] {
    let s = norm_factor(g);
    [ZERO, C64::new(s, 0.0), g * s, ZERO]
}

const E11: [C64; 4] = [ZERO, ZERO, ZERO, ONE];

/// `W B W^dagger` with `W = [|psi>, |11>]`.
fn embed(g: C64, block: [[C64; 2]; 2]) -> DenseOperator {
    let psi = psi_g(g);
    let cols = [psi, E11];
    DenseOperator::from_fn(4, |i, j| {
        let mut s = ZERO;
        for (r, col_r) in cols.iter().enumerate() {
            for (c, col_c) in cols.iter().enumerate() {
                s += col_r[i] * block[r][c] * col_c[j].conj();
            }
        }
        s
    })
}

/// `P = |11><11| + |psi><psi|`.
pub fn projector(g: C64) -> LocalBlock {
    let m = embed(g, [[ONE, ZERO], [ZERO, ONE]]);
    LocalBlock {
        matrix: DenseOperator::hermitian(m.into_mat()).expect("projector is Hermitian"),
        kind: BlockKind::Projector,
    }
}

/// The bare generator block on `{|psi>, |11>}` as a 2x2 operator.
pub fn generator_block(coeffs: &GeneratorCoeffs) -> LocalBlock {
    let b = coeffs.block();
    LocalBlock {
        matrix: DenseOperator::from_rows(b),
        kind: BlockKind::Generator,
    }
}

/// `P h P` written directly in the block form.
pub fn local_interaction(g: C64, coeffs: &GeneratorCoeffs) -> LocalBlock {
    let m = embed(g, coeffs.block());
    LocalBlock {
        matrix: DenseOperator::hermitian(m.into_mat()).expect("interaction is Hermitian"),
        kind: BlockKind::Interaction,
    }
}

/// `exp(i B)` for a Hermitian 2x2 block, in closed form.
fn expi_block(b: [[C64; 2]; 2]) -> [[C64; 2]; 2] {
    let m0 = (b[0][0].re + b[1][1].re) / 2.0;
    let mz = (b[0][0].re - b[1][1].re) / 2.0;
    let mx = b[0][1].re;
    let my = -b[0][1].im;
    let r = (mx * mx + my * my + mz * mz).sqrt();
    let (sr, cr) = r.sin_cos();
    let k = if r > 0.0 { sr / r } else { 1.0 };
    let ph = C64::from_polar(1.0, m0);
    let i = C64::new(0.0, 1.0);
    // exp(i m.sigma) = cos r + i sin r (m.sigma)/r
    let d0 = C64::new(cr, 0.0) + i * k * mz;
    let d1 = C64::new(cr, 0.0) - i * k * mz;
    let off01 = i * k * C64::new(mx, -my);
    let off10 = i * k * C64::new(mx, my);
    [[ph * d0, ph * off01], [ph * off10, ph * d1]]
}

/// `exp(i P h P)` for a single bond.
pub fn floquet_gate(g: C64, coeffs: &GeneratorCoeffs) -> LocalBlock {
    let e = expi_block(coeffs.block());
    let minus_id = [[-ONE, ZERO], [ZERO, -ONE]];
    // exp(iPhP) = I + W (E - I) W^dagger
    let shifted = [
        [e[0][0] + minus_id[0][0], e[0][1]],
        [e[1][0], e[1][1] + minus_id[1][1]],
    ];
    let m = DenseOperator::identity(4).add(&embed(g, shifted));
    LocalBlock {
        matrix: DenseOperator::unitary(m.into_mat()).expect("Floquet gate is unitary"),
        kind: BlockKind::Gate,
    }
}

/// `(U_e, U_o)` for the even and odd bonds.
pub fn floquet_gates(params: &ModelParams) -> (LocalBlock, LocalBlock) {
    (
        floquet_gate(params.g, &params.gen_even),
        floquet_gate(params.g, &params.gen_odd),
    )
}

/// Gate arrays for repeated stepping without rebuilding the blocks.
#[derive(Clone, Debug)]
pub struct FloquetStepper {
    n_qubits: usize,
    even: [C64; 16],
    odd: [C64; 16],
}

impl FloquetStepper {
    pub fn new(params: &ModelParams) -> Self {
        let (ue, uo) = floquet_gates(params);
        Self {
            n_qubits: params.n_qubits,
            even: ue.matrix.to_array4(),
            odd: uo.matrix.to_array4(),
        }
    }

    /// One period: even bonds `(0,1), (2,3), ...` then odd bonds `(1,2), (3,4), ...`.
    pub fn step_raw(&self, amps: &mut [C64]) {
        let n = self.n_qubits;
        for q in (0..n - 1).step_by(2) {
            apply4_raw(amps, n, &self.even, q, q + 1);
        }
        for q in (1..n - 1).step_by(2) {
            apply4_raw(amps, n, &self.odd, q, q + 1);
        }
    }

    pub fn step(&self, state: &mut StateVector) -> Result<(), PvbsError> {
        if state.n_qubits() != self.n_qubits {
            return Err(PvbsError::SizeMismatch {
                expected: self.n_qubits,
                got: state.n_qubits(),
            });
        }
        let n = self.n_qubits;
        for q in (0..n - 1).step_by(2) {
            state.apply_gate4(&self.even, q, q + 1);
        }
        for q in (1..n - 1).step_by(2) {
            state.apply_gate4(&self.odd, q, q + 1);
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }
}

/// One Floquet period applied in place.
pub fn apply_floquet_step(state: &mut StateVector, params: &ModelParams) -> Result<(), PvbsError> {
    params.validate()?;
    FloquetStepper::new(params).step(state)
}

/// Dense sum of one local 4x4 term per bond.
fn dense_sum(n: usize, term: impl Fn(usize) -> [C64; 16]) -> Result<DenseOperator, PvbsError> {
    if n > DENSE_MAX_QUBITS {
        return Err(PvbsError::DenseCap(n));
    }
    let dim = 1usize << n;
    let mut h = Mat::<C64>::zeros(dim, dim);
    for bond in 0..n - 1 {
        let t = term(bond);
        let m1 = 1usize << (n - 1 - bond);
        let m2 = m1 >> 1;
        for j in 0..dim {
            let l = 2 * usize::from(j & m1 != 0) + usize::from(j & m2 != 0);
            let rest = j & !(m1 | m2);
            for r in 0..4 {
                let v = t[4 * r + l];
                if v != ZERO {
                    let i = rest | if r & 2 != 0 { m1 } else { 0 } | if r & 1 != 0 { m2 } else { 0 };
                    h[(i, j)] += v;
                }
            }
        }
    }
    Ok(DenseOperator::hermitian(h)?)
}

/// Dense `H = sum_n P h_n P` with alternating generators and open boundaries.
pub fn hamiltonian(params: &ModelParams) -> Result<DenseOperator, PvbsError> {
    params.validate()?;
    let terms = [
        local_interaction(params.g, &params.gen_even).matrix.to_array4(),
        local_interaction(params.g, &params.gen_odd).matrix.to_array4(),
    ];
    dense_sum(params.n_qubits, |bond| terms[bond % 2])
}

/// Dense reference Hamiltonian `H_+ = sum_n P_{n,n+1}`.
pub fn reference_hamiltonian(params: &ModelParams) -> Result<DenseOperator, PvbsError> {
    params.validate()?;
    let p = projector(params.g).matrix.to_array4();
    dense_sum(params.n_qubits, |_| p)
}

fn sum_local_terms(amps: &[C64], n: usize, term: impl Fn(usize) -> [C64; 16]) -> Vec<C64> {
    let mut out = vec![ZERO; amps.len()];
    let mut scratch = amps.to_vec();
    for bond in 0..n - 1 {
        scratch.copy_from_slice(amps);
        apply4_raw(&mut scratch, n, &term(bond), bond, bond + 1);
        for (o, s) in out.iter_mut().zip(&scratch) {
            *o += s;
        }
    }
    out
}

/// `H|psi>` without forming `H`; works at any size the state supports.
pub fn apply_hamiltonian(params: &ModelParams, state: &StateVector) -> Result<Vec<C64>, PvbsError> {
    params.validate()?;
    if state.n_qubits() != params.n_qubits {
        return Err(PvbsError::SizeMismatch {
            expected: params.n_qubits,
            got: state.n_qubits(),
        });
    }
    Ok(apply_hamiltonian_raw(params, state.amplitudes()))
}

/// `H v` for an arbitrary (unnormalised) amplitude vector of length `2^N`.
pub fn apply_hamiltonian_raw(params: &ModelParams, amps: &[C64]) -> Vec<C64> {
    assert_eq!(amps.len(), 1usize << params.n_qubits);
    let terms = [
        local_interaction(params.g, &params.gen_even).matrix.to_array4(),
        local_interaction(params.g, &params.gen_odd).matrix.to_array4(),
    ];
    sum_local_terms(amps, params.n_qubits, |b| terms[b % 2])
}

/// `H_+|psi>` without forming `H_+`.
pub fn apply_reference_hamiltonian(
    params: &ModelParams,
    state: &StateVector,
) -> Result<Vec<C64>, PvbsError> {
    params.validate()?;
    if state.n_qubits() != params.n_qubits {
        return Err(PvbsError::SizeMismatch {
            expected: params.n_qubits,
            got: state.n_qubits(),
        });
    }
    let p = projector(params.g).matrix.to_array4();
    Ok(sum_local_terms(state.amplitudes(), params.n_qubits, |_| p))
}

/// Dense Floquet unitary, built by streaming the gates through every basis column.
pub fn floquet_unitary(params: &ModelParams) -> Result<DenseOperator, PvbsError> {
    params.validate()?;
    let n = params.n_qubits;
    if n > DENSE_MAX_QUBITS {
        return Err(PvbsError::DenseCap(n));
    }
    let dim = 1usize << n;
    let stepper = FloquetStepper::new(params);
    let mut u = Mat::<C64>::zeros(dim, dim);
    let mut col = vec![ZERO; dim];
    for j in 0..dim {
        col.iter_mut().for_each(|c| *c = ZERO);
        col[j] = ONE;
        stepper.step_raw(&mut col);
        for (i, v) in col.iter().enumerate() {
            u[(i, j)] = *v;
        }
    }
    Ok(DenseOperator::unitary(u)?)
}

/// Total magnetisation `sum_n Z_n` as a dense diagonal operator.
pub fn total_z(n: usize) -> Result<DenseOperator, PvbsError> {
    if n > DENSE_MAX_QUBITS {
        return Err(PvbsError::DenseCap(n));
    }
    let dim = 1usize << n;
    Ok(DenseOperator::from_fn(dim, |i, j| {
        if i == j {
            C64::new(n as f64 - 2.0 * i.count_ones() as f64, 0.0)
        } else {
            ZERO
        }
    }))
}
