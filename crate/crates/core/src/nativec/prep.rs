//! Logarithmic-depth preparation of one-excitation states with a binary tree of
//! excitation splitters.

use std::f64::consts::PI;

use super::kak::{kak, wrap, ANGLE_EPS};
use super::{relabel, Circuit, NativeError, NativeGate, SplitterGate, RECONSTRUCTION_TOL};
use crate::scars::SingleExcitationState;
use crate::C64;

/// Fidelity shortfall allowed for a synthesized preparation.
pub const PREP_TOL: f64 = 1e-10;

/// Native gates (at most two ZZ) equal to the splitter up to global phase.
pub fn splitter_to_native(sp: &SplitterGate) -> Result<Vec<NativeGate>, NativeError> {
    if !sp.gamma.is_finite() {
        return Err(NativeError::NonFinite);
    }
    if sp.q1 == sp.q2 {
        return Err(NativeError::SameQubit(sp.q1));
    }
    let target = sp.matrix();
    let dec = kak(&target)?;
    if dec.alphas.len() > 2 {
        return Err(NativeError::Residual(dec.coords.iter().map(|c| c.abs()).fold(f64::INFINITY, f64::min)));
    }
    let gates = dec.to_gates();
    let d = Circuit::from_gates(2, gates.clone())?.unitary()?.phase_distance(&target);
    if d > RECONSTRUCTION_TOL {
        return Err(NativeError::Residual(d));
    }
    Ok(relabel(&gates, sp.q1, sp.q2))
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Splits `[lo, hi)` with the excitation amplitude sitting on `lo`; `sign` tracks
/// the real amplitude produced so far on each site.
fn split(t: &[C64], lo: usize, hi: usize, layer: usize, layers: &mut Vec<Vec<SplitterGate>>, sign: &mut [f64]) {
    let m = hi - lo;
    if m < 2 || norm(&t[lo..hi]) == 0.0 {
        return;
    }
    let mid = lo + m.div_ceil(2);
    let (l, r) = (norm(&t[lo..mid]), norm(&t[mid..hi]));
    if r > 0.0 {
        let gamma = r.atan2(l);
        while layers.len() <= layer {
            layers.push(Vec::new());
        }
        layers[layer].push(SplitterGate { q1: lo, q2: mid, gamma });
        sign[mid] = -sign[lo];
    }
    split(t, lo, mid, layer + 1, layers, sign);
    split(t, mid, hi, layer + 1, layers, sign);
}

/// Circuit taking `|0...0>` to the one-excitation `target`: `X` on qubit 0, splitter
/// layers (at most `N - 1` splitters in `ceil(log2 N)` layers), then `Z`/`Rz` phase fixes.
/// Splitters stay abstract; [`Circuit::lowered`] gives the native form.
pub fn synthesize_state_prep(target: &SingleExcitationState) -> Result<Circuit, NativeError> {
    let n = target.n_sites();
    if n < 2 {
        return Err(NativeError::BadTarget(format!("need at least 2 sites, got {n}")));
    }
    let t = target.amplitudes();
    let mut layers = Vec::new();
    let mut sign = vec![1.0; n];
    split(t, 0, n, 0, &mut layers, &mut sign);

    let mut c = Circuit::new(n);
    c.push(NativeGate::X { q: 0 })?;
    for layer in layers {
        for sp in layer {
            c.push(NativeGate::Splitter(sp))?;
        }
    }
    let occupied: Vec<usize> = (0..n).filter(|&k| t[k].norm() > 0.0).collect();
    let corr = |k: usize| t[k].arg() - if sign[k] < 0.0 { PI } else { 0.0 };
    if let Some(&r) = occupied.first() {
        let base = corr(r);
        for &k in &occupied[1..] {
            let d = wrap(corr(k) - base);
            if (d.abs() - PI).abs() < ANGLE_EPS {
                c.push(NativeGate::Z { q: k })?;
            } else if d.abs() > ANGLE_EPS {
                c.push(NativeGate::Rz { q: k, lambda: d })?;
            }
        }
    }
    let out = single_excitation_output(&c)?;
    let f = target.inner(&out).norm_sqr();
    if f < 1.0 - PREP_TOL {
        return Err(NativeError::Residual(1.0 - f));
    }
    Ok(c)
}

/// Output of a circuit that starts from `|0...0>`, creates one excitation with a
/// single leading `X`, and afterwards uses only excitation-preserving gates
/// (splitters, `Z`, `Rz`). Costs `O(N)` per gate, so it works for any register size.
pub fn single_excitation_output(c: &Circuit) -> Result<SingleExcitationState, NativeError> {
    let n = c.n_qubits();
    let gates = c.gates();
    let Some(NativeGate::X { q: start }) = gates.first() else {
        return Err(NativeError::BadTarget("circuit must open with X".into()));
    };
    let mut a = vec![C64::new(0.0, 0.0); n];
    a[*start] = C64::new(1.0, 0.0);
    for g in &gates[1..] {
        match *g {
            NativeGate::Z { q } => a[q] = -a[q],
            NativeGate::Rz { q, lambda } => {
                let (up, down) = (C64::from_polar(1.0, lambda / 2.0), C64::from_polar(1.0, -lambda / 2.0));
                for (k, z) in a.iter_mut().enumerate() {
                    *z *= if k == q { up } else { down };
                }
            }
            NativeGate::Splitter(SplitterGate { q1, q2, gamma }) => {
                let (s, co) = gamma.sin_cos();
                let (x1, x2) = (a[q1], a[q2]);
                a[q1] = x1 * co + x2 * s;
                a[q2] = x2 * co - x1 * s;
            }
            other => {
                return Err(NativeError::BadTarget(format!(
                    "{} does not preserve the excitation number",
                    other.kind_name()
                )))
            }
        }
    }
    SingleExcitationState::normalized(a).map_err(|e| NativeError::BadTarget(e.to_string()))
}
