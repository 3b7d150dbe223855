//! Floquet time evolution: initial states, per-step observables, projective
//! sampling and trajectory noise.
//!
//! Randomness: every generator is `ChaCha8Rng::seed_from_u64(seed)` moved to a
//! numbered stream with `set_stream`. Noiseless shot mode samples time point `t`
//! from stream `t`; noisy runs give trajectory `j` stream `j`. Results are reduced
//! in index order, so output does not depend on the worker count.

mod noise;
mod series;

pub use noise::{gate_noise_counts, noisy_evolve, spam_flip_probability, GateNoiseCounts};
pub use series::{csv_file_name, format_g, parse_csv, Column, CsvTable, TimeSeries};

use std::collections::BTreeMap;
use std::str::FromStr;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nativec::{sm_prep_circuit, synthesize_state_prep, NativeError, PrepConvention};
use crate::pvbs::{FloquetStepper, ModelParams, PvbsError};
use crate::qops::{reduced_density_matrix, von_neumann_entropy, QopsError, StateVector, MAX_QUBITS};
use crate::scars::{aqmbs_state, boundary_state, left_edge, product_vacuum, all_ones, ScarsError};

/// Shots per time point when the caller does not choose.
pub const DEFAULT_SHOTS: usize = 200;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("{0} qubits exceeds the statevector cap of {MAX_QUBITS}")]
    SizeCap(usize),
    #[error("unknown observable `{0}` (expected m_total, m_sites, fidelity, imbalance or half_entropy)")]
    UnknownObservable(String),
    #[error("noise needs trajectory sampling: set shots >= 1")]
    ExactWithNoise,
    #[error("noisy evolution requested without a noise model")]
    MissingNoise,
    #[error("{name} = {value} is not a valid probability")]
    BadProbability { name: &'static str, value: f64 },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Pvbs(#[from] PvbsError),
    #[error(transparent)]
    Scars(#[from] ScarsError),
    #[error(transparent)]
    Native(#[from] NativeError),
    #[error(transparent)]
    Qops(#[from] QopsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    Vacuum,
    Ones,
    LeftEdge,
    /// The boundary scar of the model's `g`.
    Boundary,
    Aqmbs { k: usize, phi: f64 },
    /// `|A_k>` produced by simulating a preparation circuit: the published protocol
    /// (`k = 1`, `phi = 0`, `N` in 8/12/16/20) when `fixture` is set, otherwise the
    /// synthesized tree circuit.
    Prepared { k: usize, phi: f64, fixture: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    MTotal,
    MSites,
    /// `|<ref|psi(t)>|^2` with `ref` the target scar for AQMBS starts and the initial state otherwise.
    Fidelity,
    /// Excitation number on the left half minus the right half.
    Imbalance,
    HalfEntropy,
}

impl Observable {
    pub const ALL: [Observable; 5] = [Self::MTotal, Self::MSites, Self::Fidelity, Self::Imbalance, Self::HalfEntropy];

    pub fn name(&self) -> &'static str {
        match self {
            Self::MTotal => "m_total",
            Self::MSites => "m_sites",
            Self::Fidelity => "fidelity",
            Self::Imbalance => "imbalance",
            Self::HalfEntropy => "half_entropy",
        }
    }
}

impl FromStr for Observable {
    type Err = DynamicsError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| DynamicsError::UnknownObservable(s.to_string()))
    }
}

/// Per-gate depolarizing rates and the symmetric SPAM error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    /// After each single-qubit native gate.
    pub p1: f64,
    /// After each ZZ gate.
    pub p2: f64,
    /// Net bit-flip probability of one preparation plus one readout.
    pub p_spam: f64,
}

impl NoiseModel {
    /// The rates quoted for the trapped-ion device.
    pub const DEVICE: Self = Self { p1: 1e-5, p2: 2e-5, p_spam: 3e-5 };

    pub fn validate(&self) -> Result<(), DynamicsError> {
        for (name, value) in [("p1", self.p1), ("p2", self.p2)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(DynamicsError::BadProbability { name, value });
            }
        }
        if !(0.0..=0.5).contains(&self.p_spam) {
            return Err(DynamicsError::BadProbability { name: "p_spam", value: self.p_spam });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub params: ModelParams,
    pub initial: InitialState,
    pub steps: usize,
    pub observables: Vec<Observable>,
    /// 0 records exact expectation values.
    pub shots: usize,
    pub noise: Option<NoiseModel>,
    pub seed: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        if self.params.n_qubits > MAX_QUBITS {
            return Err(DynamicsError::SizeCap(self.params.n_qubits));
        }
        self.params.validate()?;
        if let Some(noise) = &self.noise {
            noise.validate()?;
            if self.shots == 0 {
                return Err(DynamicsError::ExactWithNoise);
            }
        }
        Ok(())
    }

    fn wants(&self, o: Observable) -> bool {
        self.observables.contains(&o)
    }

    /// Requested scalar observables in canonical order, without duplicates.
    fn scalar_observables(&self) -> Vec<Observable> {
        Observable::ALL
            .into_iter()
            .filter(|&o| o != Observable::MSites && self.wants(o))
            .collect()
    }
}

/// The ideal initial state and the fidelity reference.
pub fn initial_and_reference(config: &RunConfig) -> Result<(StateVector, StateVector), DynamicsError> {
    let p = &config.params;
    let n = p.n_qubits;
    let state = match config.initial {
        InitialState::Vacuum => product_vacuum(n)?,
        InitialState::Ones => all_ones(n)?,
        InitialState::LeftEdge => left_edge(n)?,
        InitialState::Boundary => boundary_state(p.g, n)?.to_state_vector()?,
        InitialState::Aqmbs { k, phi } => aqmbs_state(k, phi, n)?.to_state_vector()?,
        InitialState::Prepared { k, phi, fixture } => {
            let target = aqmbs_state(k, phi, n)?;
            let circuit = prep_circuit(n, k, phi, fixture)?;
            let out = circuit.lowered()?.run_from_zero()?;
            return Ok((out, target.to_state_vector()?));
        }
    };
    Ok((state.clone(), state))
}

pub(crate) fn prep_circuit(n: usize, k: usize, phi: f64, fixture: bool) -> Result<crate::nativec::Circuit, DynamicsError> {
    if fixture {
        if k != 1 || phi != 0.0 {
            return Err(DynamicsError::BadConfig("the published protocols prepare k = 1, phi = 0 only".into()));
        }
        Ok(sm_prep_circuit(n, PrepConvention::RESOLVED)?)
    } else {
        Ok(synthesize_state_prep(&aqmbs_state(k, phi, n)?)?)
    }
}

pub(crate) fn imbalance_from_z(z: &[f64]) -> f64 {
    let half = z.len() / 2;
    z.iter()
        .enumerate()
        .map(|(i, zi)| if i < half { (1.0 - zi) / 2.0 } else { -(1.0 - zi) / 2.0 })
        .sum()
}

pub(crate) fn half_entropy(state: &StateVector) -> Result<f64, DynamicsError> {
    let rho = reduced_density_matrix(state, 0..state.n_qubits() / 2)?;
    Ok(von_neumann_entropy(&rho)?)
}

/// Index of the single computational basis state `s` is equal to, if any.
pub(crate) fn basis_index(s: &StateVector) -> Option<usize> {
    let amps = s.amplitudes();
    let k = amps.iter().position(|a| a.norm() > 0.5)?;
    let rest: f64 = amps.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, a)| a.norm_sqr()).sum();
    (rest < 1e-24).then_some(k)
}

pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn bitstring(index: usize, n: usize) -> String {
    format!("{index:0n$b}")
}

fn sample_indices(state: &StateVector, shots: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if shots == 0 {
        return Vec::new();
    }
    let dist = WeightedIndex::new(state.probabilities()).expect("normalised state has positive weight");
    (0..shots).map(|_| dist.sample(rng)).collect()
}

/// Multinomial computational-basis sample; keys are bitstrings with qubit 0 leftmost.
pub fn sample_measurements(state: &StateVector, shots: usize, seed: u64) -> BTreeMap<String, u64> {
    let mut rng = rng_for(seed, 0);
    let mut counts = BTreeMap::new();
    for i in sample_indices(state, shots, &mut rng) {
        *counts.entry(bitstring(i, state.n_qubits())).or_insert(0) += 1;
    }
    counts
}

/// Mean and standard error of the mean.
pub(crate) fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// One time point of sampled data: per-shot records reduced to estimates.
pub(crate) struct ShotRecord {
    pub bits: usize,
    /// Per-shot fidelity estimate (indicator for a basis reference, otherwise the exact overlap).
    pub fidelity: f64,
    pub entropy: f64,
}

pub(crate) struct Builder {
    n: usize,
    scalars: Vec<Observable>,
    sites: bool,
    values: Vec<Vec<f64>>,
    errors: Vec<Vec<f64>>,
    site_rows: Vec<Vec<f64>>,
    site_err: Vec<Vec<f64>>,
    counts: Vec<BTreeMap<String, u64>>,
}

impl Builder {
    pub fn new(config: &RunConfig) -> Self {
        let scalars = config.scalar_observables();
        Self {
            n: config.params.n_qubits,
            values: vec![Vec::new(); scalars.len()],
            errors: vec![Vec::new(); scalars.len()],
            scalars,
            sites: config.wants(Observable::MSites),
            site_rows: Vec::new(),
            site_err: Vec::new(),
            counts: Vec::new(),
        }
    }

    pub fn push_exact(&mut self, state: &StateVector, reference: &StateVector) -> Result<(), DynamicsError> {
        let z = state.z_expectations();
        for (k, o) in self.scalars.iter().enumerate() {
            let v = match o {
                Observable::MTotal => z.iter().sum(),
                Observable::Imbalance => imbalance_from_z(&z),
                Observable::Fidelity => reference.fidelity(state),
                Observable::HalfEntropy => half_entropy(state)?,
                Observable::MSites => unreachable!(),
            };
            self.values[k].push(v);
        }
        if self.sites {
            self.site_rows.push(z);
        }
        Ok(())
    }

    pub fn push_shots(&mut self, shots: &[ShotRecord]) {
        let n = self.n;
        let z_of = |bits: usize| -> Vec<f64> { (0..n).map(|q| if bits >> (n - 1 - q) & 1 == 1 { -1.0 } else { 1.0 }).collect() };
        let zs: Vec<Vec<f64>> = shots.iter().map(|s| z_of(s.bits)).collect();
        for (k, o) in self.scalars.iter().enumerate() {
            let xs: Vec<f64> = match o {
                Observable::MTotal => zs.iter().map(|z| z.iter().sum()).collect(),
                Observable::Imbalance => zs.iter().map(|z| imbalance_from_z(z)).collect(),
                Observable::Fidelity => shots.iter().map(|s| s.fidelity).collect(),
                Observable::HalfEntropy => shots.iter().map(|s| s.entropy).collect(),
                Observable::MSites => unreachable!(),
            };
            let (m, se) = mean_se(&xs);
            self.values[k].push(m);
            self.errors[k].push(se);
        }
        if self.sites {
            let (mut row, mut err) = (Vec::with_capacity(n), Vec::with_capacity(n));
            for q in 0..n {
                let xs: Vec<f64> = zs.iter().map(|z| z[q]).collect();
                let (m, se) = mean_se(&xs);
                row.push(m);
                err.push(se);
            }
            self.site_rows.push(row);
            self.site_err.push(err);
        }
        let mut counts = BTreeMap::new();
        for s in shots {
            *counts.entry(bitstring(s.bits, n)).or_insert(0) += 1;
        }
        self.counts.push(counts);
    }

    pub fn finish(self, config: &RunConfig) -> TimeSeries {
        let sampled = config.shots > 0;
        let columns = self
            .scalars
            .iter()
            .zip(self.values)
            .zip(self.errors)
            .map(|((o, values), errors)| Column {
                name: o.name().to_string(),
                values,
                stderr: sampled.then_some(errors),
            })
            .collect();
        TimeSeries {
            n_qubits: self.n,
            g: [config.params.g.re, config.params.g.im],
            t: (0..=config.steps).collect(),
            columns,
            sites: self.sites.then_some(self.site_rows),
            sites_stderr: (self.sites && sampled).then_some(self.site_err),
            counts: sampled.then_some(self.counts),
            shots: config.shots,
        }
    }
}

/// Runs `config.steps` Floquet periods and records the requested observables at
/// every `t`, including `t = 0`. With noise this dispatches to [`noisy_evolve`].
pub fn evolve(config: &RunConfig) -> Result<TimeSeries, DynamicsError> {
    config.validate()?;
    if config.noise.is_some() {
        return noisy_evolve(config);
    }
    let (mut state, reference) = initial_and_reference(config)?;
    let stepper = FloquetStepper::new(&config.params);
    let mut b = Builder::new(config);
    let ref_basis = basis_index(&reference);
    let need_fid = config.wants(Observable::Fidelity);
    let need_ent = config.wants(Observable::HalfEntropy);
    for t in 0..=config.steps {
        if t > 0 {
            stepper.step(&mut state)?;
        }
        if config.shots == 0 {
            b.push_exact(&state, &reference)?;
        } else {
            let mut rng = rng_for(config.seed, t as u64);
            let fid = if need_fid && ref_basis.is_none() { reference.fidelity(&state) } else { 0.0 };
            let ent = if need_ent { half_entropy(&state)? } else { 0.0 };
            let shots: Vec<ShotRecord> = sample_indices(&state, config.shots, &mut rng)
                .into_iter()
                .map(|bits| ShotRecord {
                    bits,
                    fidelity: match ref_basis {
                        Some(r) => f64::from(u8::from(bits == r)),
                        None => fid,
                    },
                    entropy: ent,
                })
                .collect();
            b.push_shots(&shots);
        }
    }
    Ok(b.finish(config))
}

/// `<Z_n(t)>` as an `N x (T+1)` matrix (row `n`, column `t`).
pub fn site_resolved_profile(config: &RunConfig) -> Result<Vec<Vec<f64>>, DynamicsError> {
    let mut c = config.clone();
    c.observables = vec![Observable::MSites];
    let series = evolve(&c)?;
    let sites = series.sites.expect("site data requested");
    let n = c.params.n_qubits;
    Ok((0..n).map(|q| sites.iter().map(|row| row[q]).collect()).collect())
}

#[cfg(test)]
mod tests;
