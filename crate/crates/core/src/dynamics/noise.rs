//! Monte Carlo trajectories with depolarizing errors after native gates and
//! symmetric bit flips at preparation and readout.
//!
//! Each trajectory is evolved once and read out at every `t` by drawing one
//! outcome from `|psi_t|^2` without collapsing. Errors before `t` do not depend on
//! later ones, so each time point sees exactly the distribution of a fresh run
//! stopped at `t`; only cross-time correlations differ, and those are never reported.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    basis_index, half_entropy, initial_and_reference, prep_circuit, rng_for, Builder, DynamicsError, InitialState,
    NoiseModel, Observable, RunConfig, ShotRecord, TimeSeries,
};
use crate::nativec::{decompose_general, decompose_restricted, Circuit, NativeGate};
use crate::pvbs::{floquet_gate, GeneratorCoeffs};
use crate::qops::{apply2_raw, apply4_raw, StateVector};
use crate::C64;

/// Native gate tally of one compiled Floquet gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GateNoiseCounts {
    pub zz: usize,
    /// Single-qubit natives on the first and second qubit of the bond.
    pub one_qubit: [usize; 2],
}

fn tally(c: &Circuit) -> GateNoiseCounts {
    let mut t = GateNoiseCounts { zz: 0, one_qubit: [0, 0] };
    for g in c.gates() {
        match g.qubits()[..] {
            [q] => t.one_qubit[q] += 1,
            _ => t.zz += 1,
        }
    }
    t
}

/// Compiles `exp(iPhP)` (two-ZZ template when `h` is off-diagonal) and counts its gates.
pub fn gate_noise_counts(g: C64, coeffs: &GeneratorCoeffs) -> Result<GateNoiseCounts, DynamicsError> {
    let c = if coeffs.a == 0.0 && coeffs.b == 0.0 {
        decompose_restricted(g, coeffs)?.circuit
    } else {
        decompose_general(&floquet_gate(g, coeffs).matrix)?
    };
    Ok(tally(&c))
}

/// Per-event flip probability `q` with `2q(1 - q) = p`, so that one preparation
/// flip and one readout flip combine to a net flip probability `p`.
pub fn spam_flip_probability(p: f64) -> f64 {
    (1.0 - (1.0 - 2.0 * p).max(0.0).sqrt()) / 2.0
}

const I2: [C64; 4] = [C64 { re: 1.0, im: 0.0 }, C64 { re: 0.0, im: 0.0 }, C64 { re: 0.0, im: 0.0 }, C64 { re: 1.0, im: 0.0 }];

fn pauli(k: usize) -> [C64; 4] {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match k {
        1 => [o, l, l, o],
        2 => [o, -i, i, o],
        3 => [l, o, o, -l],
        _ => I2,
    }
}

fn depolarize1(amps: &mut [C64], n: usize, q: usize, p: f64, rng: &mut ChaCha8Rng) {
    if rng.gen::<f64>() < p {
        let k = rng.gen_range(1..4);
        apply2_raw(amps, n, &pauli(k), q);
    }
}

fn depolarize2(amps: &mut [C64], n: usize, q1: usize, q2: usize, p: f64, rng: &mut ChaCha8Rng) {
    if rng.gen::<f64>() < p {
        let k = rng.gen_range(1..16);
        let (a, b) = (k / 4, k % 4);
        if a > 0 {
            apply2_raw(amps, n, &pauli(a), q1);
        }
        if b > 0 {
            apply2_raw(amps, n, &pauli(b), q2);
        }
    }
}

fn flip_each(amps: &mut [C64], n: usize, q_flip: f64, rng: &mut ChaCha8Rng) {
    for q in 0..n {
        if rng.gen::<f64>() < q_flip {
            apply2_raw(amps, n, &pauli(1), q);
        }
    }
}

fn sample_one(state: &StateVector, rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let amps = state.amplitudes();
    for (i, a) in amps.iter().enumerate() {
        acc += a.norm_sqr();
        if u < acc {
            return i;
        }
    }
    amps.iter().rposition(|a| a.norm_sqr() > 0.0).unwrap_or(0)
}

struct Plan {
    n: usize,
    even: [C64; 16],
    odd: [C64; 16],
    even_counts: GateNoiseCounts,
    odd_counts: GateNoiseCounts,
    noise: NoiseModel,
    q_spam: f64,
    prep: Option<Circuit>,
}

impl Plan {
    fn step(&self, amps: &mut [C64], rng: &mut ChaCha8Rng) {
        let n = self.n;
        let layers = [(0usize, &self.even, &self.even_counts), (1, &self.odd, &self.odd_counts)];
        for (start, gate, counts) in layers {
            for q in (start..n - 1).step_by(2) {
                apply4_raw(amps, n, gate, q, q + 1);
                for _ in 0..counts.zz {
                    depolarize2(amps, n, q, q + 1, self.noise.p2, rng);
                }
                for (side, &m) in counts.one_qubit.iter().enumerate() {
                    for _ in 0..m {
                        depolarize1(amps, n, q + side, self.noise.p1, rng);
                    }
                }
            }
        }
    }

    fn run_prep(&self, amps: &mut [C64], c: &Circuit, rng: &mut ChaCha8Rng) {
        let n = self.n;
        for g in c.gates() {
            let m = g.matrix();
            match g.qubits()[..] {
                [q] => {
                    apply2_raw(amps, n, &m.to_array2(), q);
                    depolarize1(amps, n, q, self.noise.p1, rng);
                }
                [a, b] => {
                    apply4_raw(amps, n, &m.to_array4(), a, b);
                    if matches!(g, NativeGate::ZZ { .. }) {
                        depolarize2(amps, n, a, b, self.noise.p2, rng);
                    }
                }
                _ => unreachable!(),
            }
        }
    }
}

/// Trajectory-averaged evolution; `config.shots` trajectories, one readout per
/// trajectory and time point. Fidelity against a basis-state reference and all
/// `Z`-type observables come from the noisy readouts; a non-basis fidelity and
/// the half-chain entropy are trajectory averages of the exact values.
pub fn noisy_evolve(config: &RunConfig) -> Result<TimeSeries, DynamicsError> {
    let noise = config.noise.ok_or(DynamicsError::MissingNoise)?;
    config.validate()?;
    let p = &config.params;
    let n = p.n_qubits;
    let (ideal, reference) = initial_and_reference(config)?;
    let prep = match config.initial {
        InitialState::Prepared { k, phi, fixture } => Some(prep_circuit(n, k, phi, fixture)?.lowered()?),
        _ => None,
    };
    let plan = Plan {
        n,
        even: floquet_gate(p.g, &p.gen_even).matrix.to_array4(),
        odd: floquet_gate(p.g, &p.gen_odd).matrix.to_array4(),
        even_counts: gate_noise_counts(p.g, &p.gen_even)?,
        odd_counts: gate_noise_counts(p.g, &p.gen_odd)?,
        noise,
        q_spam: spam_flip_probability(noise.p_spam),
        prep,
    };
    let ref_basis = basis_index(&reference);
    let need_fid = config.wants(Observable::Fidelity);
    let need_ent = config.wants(Observable::HalfEntropy);

    let run = |j: usize| -> Result<Vec<ShotRecord>, DynamicsError> {
        let mut rng = rng_for(config.seed, j as u64);
        let mut state = match &plan.prep {
            Some(_) => StateVector::basis(n, 0)?,
            None => ideal.clone(),
        };
        let mut amps = state.amplitudes().to_vec();
        flip_each(&mut amps, n, plan.q_spam, &mut rng);
        if let Some(c) = &plan.prep {
            plan.run_prep(&mut amps, c, &mut rng);
        }
        let mut out = Vec::with_capacity(config.steps + 1);
        for t in 0..=config.steps {
            if t > 0 {
                plan.step(&mut amps, &mut rng);
            }
            state = StateVector::normalized(n, amps)?;
            let mut bits = sample_one(&state, &mut rng);
            for q in 0..n {
                if rng.gen::<f64>() < plan.q_spam {
                    bits ^= 1 << (n - 1 - q);
                }
            }
            let fidelity = match ref_basis {
                Some(r) => f64::from(u8::from(bits == r)),
                None if need_fid => reference.fidelity(&state),
                None => 0.0,
            };
            let entropy = if need_ent { half_entropy(&state)? } else { 0.0 };
            out.push(ShotRecord { bits, fidelity, entropy });
            amps = state.into_amplitudes();
        }
        Ok(out)
    };
    let trajectories: Vec<Vec<ShotRecord>> = (0..config.shots).into_par_iter().map(run).collect::<Result<_, _>>()?;

    let mut b = Builder::new(config);
    let mut per_t: Vec<Vec<ShotRecord>> = (0..=config.steps).map(|_| Vec::with_capacity(config.shots)).collect();
    for traj in trajectories {
        for (t, rec) in traj.into_iter().enumerate() {
            per_t[t].push(rec);
        }
    }
    for shots in &per_t {
        b.push_shots(shots);
    }
    Ok(b.finish(config))
}
