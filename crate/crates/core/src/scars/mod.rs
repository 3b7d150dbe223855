//! Closed-form special states and their analytic properties.

use std::f64::consts::{LN_2, PI};

use thiserror::Error;

use crate::qops::{DenseOperator, QopsError, StateVector, MAX_QUBITS};
use crate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScarsError {
    #[error("g = 0 has no boundary state")]
    ZeroG,
    #[error("mode index {k} out of range for {n} sites")]
    ModeOutOfRange { k: usize, n: usize },
    #[error("unsupported size {0}")]
    BadSize(usize),
    #[error("amplitudes have zero norm")]
    ZeroNorm,
    #[error(transparent)]
    Qops(#[from] QopsError),
}

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Normalised amplitudes `c_n` over the one-excitation basis `|0..0 1_n 0..0>`.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleExcitationState {
    amps: Vec<C64>,
}

impl SingleExcitationState {
    /// Normalises `amps`; fails on an all-zero vector.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self, ScarsError> {
        if amps.is_empty() {
            return Err(ScarsError::BadSize(0));
        }
        let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(ScarsError::ZeroNorm);
        }
        let inv = 1.0 / n2.sqrt();
        amps.iter_mut().for_each(|a| *a *= inv);
        Ok(Self { amps })
    }

    pub fn n_sites(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(self.n_sites(), other.n_sites());
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Embeds into the full register: `c_n` sits on the index with only bit `n` set.
    pub fn to_state_vector(&self) -> Result<StateVector, ScarsError> {
        let n = self.n_sites();
        if n > MAX_QUBITS {
            return Err(ScarsError::BadSize(n));
        }
        let mut full = vec![ZERO; 1usize << n];
        for (site, a) in self.amps.iter().enumerate() {
            full[1usize << (n - 1 - site)] = *a;
        }
        Ok(StateVector::from_amplitudes(n, full)?)
    }

    /// Excitation weight on the first half minus the second half.
    pub fn imbalance(&self) -> f64 {
        let half = self.n_sites() / 2;
        let left: f64 = self.amps[..half].iter().map(|a| a.norm_sqr()).sum();
        let right: f64 = self.amps[half..].iter().map(|a| a.norm_sqr()).sum();
        left - right
    }

    /// Half-chain entanglement entropy. A one-excitation state splits as
    /// `sqrt(w_L)|L>|0..0> + sqrt(w_R)|0..0>|R>`, so the reduced spectrum is `{w_L, w_R}`.
    pub fn half_chain_entropy(&self) -> f64 {
        let half = self.n_sites() / 2;
        let left: f64 = self.amps[..half].iter().map(|a| a.norm_sqr()).sum();
        binary_entropy(left)
    }
}

fn binary_entropy(p: f64) -> f64 {
    [p, 1.0 - p]
        .iter()
        .filter(|&&x| x > 1e-300)
        .map(|&x| -x * x.ln())
        .sum()
}

fn basis_state(bits: impl Fn(usize) -> bool, n: usize) -> Result<StateVector, ScarsError> {
    if n == 0 || n > MAX_QUBITS {
        return Err(ScarsError::BadSize(n));
    }
    let b: Vec<bool> = (0..n).map(bits).collect();
    Ok(StateVector::from_bits(&b)?)
}

/// `|0>^N`.
pub fn product_vacuum(n: usize) -> Result<StateVector, ScarsError> {
    basis_state(|_| false, n)
}

/// `|1>^N`.
pub fn all_ones(n: usize) -> Result<StateVector, ScarsError> {
    basis_state(|_| true, n)
}

/// `|1>|0>^{N-1}`, the excitation on the left edge.
pub fn left_edge(n: usize) -> Result<StateVector, ScarsError> {
    basis_state(|i| i == 0, n)
}

/// Boundary state with `c_n` proportional to `g^{-n}`.
///
/// Amplitudes are generated from whichever end keeps them bounded, so any `N`
/// works without overflow.
pub fn boundary_state(g: C64, n: usize) -> Result<SingleExcitationState, ScarsError> {
    if g == ZERO {
        return Err(ScarsError::ZeroG);
    }
    if n == 0 {
        return Err(ScarsError::BadSize(0));
    }
    let mut amps = vec![ZERO; n];
    if g.norm() >= 1.0 {
        let q = g.inv();
        let mut c = C64::new(1.0, 0.0);
        for a in amps.iter_mut() {
            *a = c;
            c *= q;
        }
    } else {
        // g^{-n} = g^{N-1-n} / g^{N-1}
        let mut c = C64::new(1.0, 0.0);
        for a in amps.iter_mut().rev() {
            *a = c;
            c *= g;
        }
    }
    SingleExcitationState::normalized(amps)
}

/// Asymptotic scar amplitudes `e^{-i n phi} cos[(N - n - 1/2) k pi / N]`.
///
/// The phase factor carries `e^{-i n phi}` so that `k = 0` reproduces the
/// boundary state at `g = e^{i phi}` exactly and every `A_k` is an eigenstate of
/// the reference Hamiltonian at that `g`.
pub fn aqmbs_state(k: usize, phi: f64, n: usize) -> Result<SingleExcitationState, ScarsError> {
    if n == 0 {
        return Err(ScarsError::BadSize(0));
    }
    if k >= n {
        return Err(ScarsError::ModeOutOfRange { k, n });
    }
    let nf = n as f64;
    let amps = (0..n)
        .map(|site| {
            let env = ((nf - site as f64 - 0.5) * k as f64 * PI / nf).cos();
            C64::from_polar(env, -(site as f64) * phi)
        })
        .collect();
    SingleExcitationState::normalized(amps)
}

/// `epsilon_k = 1 - cos(k pi / N)`.
pub fn aqmbs_energy(k: usize, n: usize) -> f64 {
    1.0 - (k as f64 * PI / n as f64).cos()
}

/// `min(|g|^N, |g|^-N)` evaluated in log space.
fn small_ratio(g: C64, n: usize) -> f64 {
    (-(n as f64) * g.norm().ln().abs()).exp()
}

/// Closed form of `<B|I|B>`, `(1 - |g^-1|^N) / (1 + |g^-1|^N)`.
pub fn imbalance_expectation(g: C64, n: usize) -> Result<f64, ScarsError> {
    if g == ZERO {
        return Err(ScarsError::ZeroG);
    }
    if n == 0 || n % 2 != 0 {
        return Err(ScarsError::BadSize(n));
    }
    let r = g.norm();
    if r == 1.0 {
        return Ok(0.0);
    }
    let x = small_ratio(g, n);
    let mag = (1.0 - x) / (1.0 + x);
    Ok(if r > 1.0 { mag } else { -mag })
}

/// `<I>` with `I = sum_{i<N/2} n_i - sum_{i>=N/2} n_i`, `n_i = (1 - Z_i)/2`,
/// evaluated directly on a full state.
pub fn imbalance_operator_check(state: &StateVector) -> f64 {
    let n = state.n_qubits();
    let z = state.z_expectations();
    z.iter()
        .enumerate()
        .map(|(i, zi)| {
            let occ = (1.0 - zi) / 2.0;
            if i < n / 2 {
                occ
            } else {
                -occ
            }
        })
        .sum()
}

/// Closed-form half-chain entropy of the boundary state, with
/// `p = 1 / (1 + |g^-1|^N)`.
pub fn boundary_entropy(g: C64, n: usize) -> Result<f64, ScarsError> {
    if g == ZERO {
        return Err(ScarsError::ZeroG);
    }
    if n == 0 || n % 2 != 0 {
        return Err(ScarsError::BadSize(n));
    }
    if g.norm() == 1.0 {
        return Ok(LN_2);
    }
    // binary entropy of p = 1/(1+x) is symmetric under x -> 1/x
    let y = small_ratio(g, n);
    if y == 0.0 {
        return Ok(0.0);
    }
    Ok(y.ln_1p() - y * y.ln() / (1.0 + y))
}

/// `xi = 1 / |ln |g||`; infinite at `|g| = 1`.
pub fn localization_length(g: C64) -> Result<f64, ScarsError> {
    if g == ZERO {
        return Err(ScarsError::ZeroG);
    }
    let l = g.norm().ln().abs();
    if l == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / l)
}

/// `<H^2> - <H>^2` from the action `H|psi>`.
pub fn variance_from_action(state: &StateVector, h_psi: &[C64]) -> f64 {
    let mean: C64 = state
        .amplitudes()
        .iter()
        .zip(h_psi)
        .map(|(a, b)| a.conj() * b)
        .sum();
    let sq: f64 = h_psi.iter().map(|b| b.norm_sqr()).sum();
    sq - mean.re * mean.re
}

/// Energy variance of `state` under a dense Hermitian `h`.
pub fn energy_variance(state: &StateVector, h: &DenseOperator) -> Result<f64, ScarsError> {
    if h.dim() != state.dim() {
        return Err(QopsError::DimensionMismatch {
            expected: state.dim(),
            got: h.dim(),
        }
        .into());
    }
    if !h.is_hermitian_flagged() {
        let err = h.hermiticity_error();
        if err > crate::qops::tol::HERMITICITY {
            return Err(QopsError::NotHermitian(err).into());
        }
    }
    let hp = h.apply(state.amplitudes());
    Ok(variance_from_action(state, &hp))
}
