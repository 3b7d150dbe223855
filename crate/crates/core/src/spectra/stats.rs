//! Level-spacing statistics and the two random-matrix reference ensembles.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use super::{Sector, SpectraError, Spectrum, SpectrumKind, CLUSTER_TOL};
use crate::qops::{eig_unitary, haar_unitary};

/// Minimum number of levels for a statistics request.
pub const MIN_LEVELS: usize = 200;
/// `<r>` for uncorrelated levels, `2 ln 2 - 1`.
pub const R_POISSON: f64 = 0.386_294_361_119_890_6;
/// Large-dimension `<r>` of the unitary ensembles.
pub const R_GUE: f64 = 0.5996;

const HIST_BINS: usize = 40;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub densities: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    /// Raw spacings of the sorted levels.
    pub spacings: Vec<f64>,
    pub mean_r: f64,
    /// Density of `s / <s>`.
    pub histogram: Histogram,
    /// Levels used after exclusions.
    pub n_levels: usize,
    /// Levels removed as the degenerate zero cluster.
    pub excluded: usize,
}

/// Mean of `min(s_i, s_{i+1}) / max(s_i, s_{i+1})`; pairs of two zero spacings are skipped.
pub fn mean_r(spacings: &[f64]) -> f64 {
    let (sum, count) = spacings
        .windows(2)
        .filter_map(|w| {
            let (lo, hi) = if w[0] < w[1] { (w[0], w[1]) } else { (w[1], w[0]) };
            (hi > 0.0).then(|| lo / hi)
        })
        .fold((0.0, 0usize), |(s, c), r| (s + r, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

fn histogram(spacings: &[f64]) -> Histogram {
    let mean = spacings.iter().sum::<f64>() / spacings.len() as f64;
    let scaled: Vec<f64> = spacings.iter().map(|s| s / mean).collect();
    let top = scaled.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let width = top / HIST_BINS as f64;
    let mut counts = vec![0usize; HIST_BINS];
    for s in &scaled {
        let b = ((s / width) as usize).min(HIST_BINS - 1);
        counts[b] += 1;
    }
    let total = scaled.len() as f64;
    Histogram {
        edges: (0..=HIST_BINS).map(|k| k as f64 * width).collect(),
        densities: counts.iter().map(|&c| c as f64 / (total * width)).collect(),
    }
}

/// Statistics of a bare list of levels.
///
/// A degenerate cluster (two or more levels) at zero is removed first. With
/// `circular` the levels are phases and the wrap-around spacing is included.
pub fn level_stats_from_values(values: &[f64], circular: bool) -> Result<LevelStats, SpectraError> {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    let zero: Vec<usize> = (0..v.len()).filter(|&i| v[i].abs() < CLUSTER_TOL).collect();
    let mut excluded = 0;
    if !zero.is_empty() {
        // grow the cluster around the exact zeros
        let (mut lo, mut hi) = (zero[0], *zero.last().unwrap());
        while lo > 0 && v[lo] - v[lo - 1] <= CLUSTER_TOL {
            lo -= 1;
        }
        while hi + 1 < v.len() && v[hi + 1] - v[hi] <= CLUSTER_TOL {
            hi += 1;
        }
        if hi > lo {
            excluded = hi - lo + 1;
            v.drain(lo..=hi);
        }
    }
    if v.len() < MIN_LEVELS {
        return Err(SpectraError::TooFewLevels {
            got: v.len(),
            need: MIN_LEVELS,
        });
    }
    let mut spacings: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
    if circular {
        spacings.push(v[0] + 2.0 * std::f64::consts::PI - v[v.len() - 1]);
    }
    Ok(LevelStats {
        mean_r: mean_r(&spacings),
        histogram: histogram(&spacings),
        n_levels: v.len(),
        excluded,
        spacings,
    })
}

/// Statistics of one sector of a spectrum; [`Sector::None`] takes every level.
pub fn level_spacing_stats(spectrum: &Spectrum, sector: Sector) -> Result<LevelStats, SpectraError> {
    let values: Vec<f64> = spectrum
        .records
        .iter()
        .filter(|r| sector == Sector::None || r.sector == sector)
        .map(|r| r.value)
        .collect();
    level_stats_from_values(&values, spectrum.kind == SpectrumKind::Floquet)
}

/// `n` levels with independent unit-mean exponential spacings.
pub fn poisson_levels<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut x = 0.0;
    (0..n)
        .map(|_| {
            let s: f64 = rng.sample(Exp1);
            x += s;
            x
        })
        .collect()
}

/// Eigenphases of a Haar-random `dim x dim` unitary.
pub fn cue_phases<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Vec<f64>, SpectraError> {
    Ok(eig_unitary(&haar_unitary(dim, rng))?.0)
}
