//! Exact-diagonalisation diagnostics: Floquet and Hamiltonian spectra, symmetry
//! sectors, level statistics, eigenstate entanglement and the one-excitation
//! tight-binding problem.

mod stats;
mod tight;
mod verify;

pub use stats::{
    cue_phases, level_spacing_stats, level_stats_from_values, mean_r, poisson_levels, Histogram,
    LevelStats, MIN_LEVELS, R_GUE, R_POISSON,
};
pub use tight::{gap_curve, single_excitation_solver, single_excitation_spectrum, TightBinding, MAX_SITES};
pub use verify::{verify_aqmbs_scaling, verify_frustration_free, ResidualMode};

use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pvbs::{
    apply_hamiltonian_raw, floquet_unitary, hamiltonian, FloquetStepper, ModelParams, PvbsError,
    SymmetryOp,
};
use crate::qops::{
    eig_hermitian, eig_unitary, eigvals_hermitian, reduced_density_matrix, von_neumann_entropy,
    DenseOperator, QopsError, StateVector,
};
use crate::scars::ScarsError;
use crate::C64;

/// Dense spectra (full eigendecomposition) are computed up to this size.
pub const ED_MAX_QUBITS: usize = 12;
/// Levels closer than this belong to one degeneracy cluster.
pub const CLUSTER_TOL: f64 = 1e-8;
/// Default threshold for `|E| = 0` in [`zero_mode_count`].
pub const DEFAULT_ZERO_TOL: f64 = 1e-10;
/// `|<v|S|v>|` needed before a symmetry label is accepted.
const LABEL_THRESHOLD: f64 = 0.99;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("{n} qubits exceeds the {cap}-qubit limit for this diagnostic")]
    SizeCap { n: usize, cap: usize },
    #[error("no reflection symmetry at g = {0}")]
    NoSymmetry(C64),
    #[error("eigenvector {index} has ambiguous symmetry expectation {expectation}")]
    Ambiguous { index: usize, expectation: f64 },
    #[error("level statistics need at least {need} levels, got {got}")]
    TooFewLevels { got: usize, need: usize },
    #[error("invalid argument: {0}")]
    BadArgument(String),
    #[error("residuals not strictly decreasing over sizes {sizes:?}: {residuals:?}")]
    NonMonotone { sizes: Vec<usize>, residuals: Vec<f64> },
    #[error(transparent)]
    Pvbs(#[from] PvbsError),
    #[error(transparent)]
    Qops(#[from] QopsError),
    #[error(transparent)]
    Scars(#[from] ScarsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Even,
    Odd,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumKind {
    /// Values are eigenphases in `(-pi, pi]`.
    Floquet,
    /// Values are energies.
    Hamiltonian,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub value: f64,
    pub sector: Sector,
    pub entanglement: Option<f64>,
    pub degeneracy_cluster: usize,
}

/// Eigenvalues or eigenphases with eigenvector columns in the full basis.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub kind: SpectrumKind,
    pub n_qubits: usize,
    pub records: Vec<SpectrumRecord>,
    pub eigvecs: Mat<C64>,
}

impl Spectrum {
    fn from_parts(
        kind: SpectrumKind,
        n_qubits: usize,
        values: Vec<f64>,
        sectors: Vec<Sector>,
        eigvecs: Mat<C64>,
    ) -> Self {
        let clusters = assign_clusters(&values, kind);
        let records = values
            .into_iter()
            .zip(sectors)
            .zip(clusters)
            .map(|((value, sector), degeneracy_cluster)| SpectrumRecord {
                value,
                sector,
                entanglement: None,
                degeneracy_cluster,
            })
            .collect();
        Self {
            kind,
            n_qubits,
            records,
            eigvecs,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.value).collect()
    }

    pub fn eigenvector(&self, j: usize) -> Vec<C64> {
        (0..self.eigvecs.nrows()).map(|i| self.eigvecs[(i, j)]).collect()
    }

    /// Number of levels in the even, odd and unlabelled sectors.
    pub fn sector_dims(&self) -> (usize, usize, usize) {
        let mut d = (0, 0, 0);
        for r in &self.records {
            match r.sector {
                Sector::Even => d.0 += 1,
                Sector::Odd => d.1 += 1,
                Sector::None => d.2 += 1,
            }
        }
        d
    }

    /// Indices of levels at zero energy or zero phase.
    pub fn zero_levels(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&j| self.records[j].value.abs() < CLUSTER_TOL)
            .collect()
    }

    /// Indices grouped by `(cluster, sector)`, keeping only groups with more than one member.
    fn degenerate_groups(&self) -> Vec<Vec<usize>> {
        let mut map: std::collections::BTreeMap<(usize, u8), Vec<usize>> = Default::default();
        for (j, r) in self.records.iter().enumerate() {
            let s = match r.sector {
                Sector::Even => 0,
                Sector::Odd => 1,
                Sector::None => 2,
            };
            map.entry((r.degeneracy_cluster, s)).or_default().push(j);
        }
        map.into_values().filter(|g| g.len() > 1).collect()
    }

    /// Re-diagonalises every degenerate group in the Hermitian operator given by
    /// `apply`, replacing the arbitrary eigensolver basis with its eigenbasis.
    /// Returns the operator eigenvalue attached to each rotated column.
    fn rotate_groups(
        &mut self,
        groups: &[Vec<usize>],
        apply: impl Fn(&[C64]) -> Vec<C64>,
    ) -> Result<Vec<(usize, f64)>, SpectraError> {
        let dim = self.eigvecs.nrows();
        let mut labels = Vec::new();
        for group in groups {
            let m = group.len();
            let vc = Mat::from_fn(dim, m, |i, a| self.eigvecs[(i, group[a])]);
            let mut svc = Mat::<C64>::zeros(dim, m);
            for a in 0..m {
                let col: Vec<C64> = (0..dim).map(|i| vc[(i, a)]).collect();
                for (i, v) in apply(&col).into_iter().enumerate() {
                    svc[(i, a)] = v;
                }
            }
            let mut b = vc.adjoint() * &svc;
            for j in 0..m {
                for i in 0..j {
                    let v = (b[(i, j)] + b[(j, i)].conj()) * 0.5;
                    b[(i, j)] = v;
                    b[(j, i)] = v.conj();
                }
                b[(j, j)] = C64::new(b[(j, j)].re, 0.0);
            }
            let (vals, w) = eig_hermitian(&DenseOperator::new(b))?;
            let rotated = &vc * &w;
            for (a, &j) in group.iter().enumerate() {
                for i in 0..dim {
                    self.eigvecs[(i, j)] = rotated[(i, a)];
                }
                labels.push((j, vals[a]));
            }
        }
        Ok(labels)
    }

    /// Within every degenerate group, switch to the eigenbasis of the total
    /// magnetisation projected onto the group. Product and one-excitation scars
    /// sitting inside a degenerate cluster then appear as individual columns.
    pub fn split_degenerate_by_magnetization(&mut self) -> Result<(), SpectraError> {
        let n = self.n_qubits;
        let groups = self.degenerate_groups();
        self.rotate_groups(&groups, |v| {
            v.iter()
                .enumerate()
                .map(|(i, a)| a * (n as f64 - 2.0 * i.count_ones() as f64))
                .collect()
        })?;
        Ok(())
    }
}

/// Cluster ids: consecutive sorted values closer than [`CLUSTER_TOL`] share an id.
/// Floquet phases wrap, so a cluster straddling `+-pi` is merged.
fn assign_clusters(values: &[f64], kind: SpectrumKind) -> Vec<usize> {
    let n = values.len();
    let mut ids = vec![0; n];
    if n == 0 {
        return ids;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut id = 0;
    ids[order[0]] = 0;
    for w in order.windows(2) {
        if values[w[1]] - values[w[0]] > CLUSTER_TOL {
            id += 1;
        }
        ids[w[1]] = id;
    }
    if kind == SpectrumKind::Floquet && id > 0 {
        let (first, last) = (order[0], order[n - 1]);
        let wrap = values[first] + 2.0 * std::f64::consts::PI - values[last];
        if wrap <= CLUSTER_TOL {
            let last_id = ids[last];
            ids.iter_mut().filter(|x| **x == last_id).for_each(|x| *x = 0);
        }
    }
    ids
}

fn check_cap(n: usize) -> Result<(), SpectraError> {
    if n > ED_MAX_QUBITS {
        return Err(SpectraError::SizeCap {
            n,
            cap: ED_MAX_QUBITS,
        });
    }
    Ok(())
}

/// Full Floquet spectrum without symmetry labels.
pub fn floquet_spectrum(params: &ModelParams) -> Result<Spectrum, SpectraError> {
    params.validate()?;
    check_cap(params.n_qubits)?;
    let u = floquet_unitary(params)?;
    let (phases, vecs) = eig_unitary(&u)?;
    let k = phases.len();
    Ok(Spectrum::from_parts(
        SpectrumKind::Floquet,
        params.n_qubits,
        phases,
        vec![Sector::None; k],
        vecs,
    ))
}

/// Full Hamiltonian spectrum without symmetry labels.
pub fn hamiltonian_spectrum(params: &ModelParams) -> Result<Spectrum, SpectraError> {
    params.validate()?;
    check_cap(params.n_qubits)?;
    let (vals, vecs) = eig_hermitian(&hamiltonian(params)?)?;
    let k = vals.len();
    Ok(Spectrum::from_parts(
        SpectrumKind::Hamiltonian,
        params.n_qubits,
        vals,
        vec![Sector::None; k],
        vecs,
    ))
}

/// Labels every eigenvector by the reflection symmetry present at `g = +-1`.
///
/// Degenerate clusters are first rotated into eigenvectors of the symmetry.
pub fn symmetry_resolve(spectrum: &mut Spectrum, g: C64) -> Result<(), SpectraError> {
    let op = SymmetryOp::for_g(g).ok_or(SpectraError::NoSymmetry(g))?;
    let n = spectrum.n_qubits;
    // group by cluster only: labels are not known yet
    for r in spectrum.records.iter_mut() {
        r.sector = Sector::None;
    }
    let groups = spectrum.degenerate_groups();
    let mut expectation = vec![f64::NAN; spectrum.len()];
    for (j, e) in spectrum.rotate_groups(&groups, |v| op.apply(v, n))? {
        expectation[j] = e;
    }
    for (j, e) in expectation.iter_mut().enumerate() {
        if e.is_nan() {
            let v = spectrum.eigenvector(j);
            let sv = op.apply(&v, n);
            *e = v.iter().zip(&sv).map(|(a, b)| a.conj() * b).sum::<C64>().re;
        }
    }
    for (j, e) in expectation.into_iter().enumerate() {
        spectrum.records[j].sector = if e > LABEL_THRESHOLD {
            Sector::Even
        } else if e < -LABEL_THRESHOLD {
            Sector::Odd
        } else {
            return Err(SpectraError::Ambiguous {
                index: j,
                expectation: e,
            });
        };
    }
    Ok(())
}

/// One basis vector of a symmetry sector: `|i>` alone, or `(|i> + c|j>)/sqrt 2`.
#[derive(Clone, Copy, Debug)]
struct SectorVec {
    i: usize,
    j: usize,
    cj: f64,
}

impl SectorVec {
    fn entries(&self) -> ([(usize, f64); 2], usize) {
        if self.i == self.j {
            ([(self.i, 1.0), (self.i, 0.0)], 1)
        } else {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            ([(self.i, h), (self.j, self.cj * h)], 2)
        }
    }
}

fn sector_basis(op: SymmetryOp, n: usize, s: f64) -> Vec<SectorVec> {
    let mut out = Vec::new();
    for i in 0..1usize << n {
        let (j, sign) = op.map(i, n);
        if j == i {
            if sign == s {
                out.push(SectorVec { i, j, cj: 1.0 });
            }
        } else if i < j {
            out.push(SectorVec { i, j, cj: s * sign });
        }
    }
    out
}

/// `B^dagger A B` for a sector basis `B`, with `A` given by its action.
fn project(
    basis: &[SectorVec],
    dim: usize,
    apply: impl Fn(&mut Vec<C64>) + Sync,
) -> Mat<C64> {
    let m = basis.len();
    let cols: Vec<Vec<C64>> = basis
        .par_iter()
        .map(|b| {
            let mut v = vec![ZERO; dim];
            let (e, k) = b.entries();
            for &(idx, c) in &e[..k] {
                v[idx] += c;
            }
            apply(&mut v);
            basis
                .iter()
                .map(|a| {
                    let (e, k) = a.entries();
                    e[..k].iter().map(|&(idx, c)| v[idx] * c).sum()
                })
                .collect()
        })
        .collect();
    Mat::from_fn(m, m, |r, c| cols[c][r])
}

fn embed(basis: &[SectorVec], w: &Mat<C64>, out: &mut Mat<C64>, offset: usize) {
    for c in 0..w.ncols() {
        for (a, b) in basis.iter().enumerate() {
            let (e, k) = b.entries();
            for &(idx, coef) in &e[..k] {
                out[(idx, offset + c)] += w[(a, c)] * coef;
            }
        }
    }
}

fn resolved_blocks(
    params: &ModelParams,
    kind: SpectrumKind,
) -> Result<(SymmetryOp, [(Sector, Vec<SectorVec>, Mat<C64>); 2]), SpectraError> {
    params.validate()?;
    check_cap(params.n_qubits)?;
    let op = SymmetryOp::for_g(params.g).ok_or(SpectraError::NoSymmetry(params.g))?;
    let n = params.n_qubits;
    let dim = 1usize << n;
    let build = |s: f64| -> Result<(Vec<SectorVec>, Mat<C64>), SpectraError> {
        let basis = sector_basis(op, n, s);
        let m = match kind {
            SpectrumKind::Floquet => {
                let stepper = FloquetStepper::new(params);
                project(&basis, dim, |v| stepper.step_raw(v))
            }
            SpectrumKind::Hamiltonian => project(&basis, dim, |v| {
                *v = apply_hamiltonian_raw(params, v);
            }),
        };
        Ok((basis, m))
    };
    let (be, me) = build(1.0)?;
    let (bo, mo) = build(-1.0)?;
    Ok((op, [(Sector::Even, be, me), (Sector::Odd, bo, mo)]))
}

fn hermitised(mut m: Mat<C64>) -> DenseOperator {
    let k = m.nrows();
    for j in 0..k {
        for i in 0..j {
            let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
        m[(j, j)] = C64::new(m[(j, j)].re, 0.0);
    }
    DenseOperator::new(m)
}

/// Spectrum computed block by block in the two reflection sectors at `g = +-1`.
///
/// Each sector is diagonalised separately, so the labels are exact and the cost
/// is roughly a quarter of the full problem.
pub fn resolved_spectrum(params: &ModelParams, kind: SpectrumKind) -> Result<Spectrum, SpectraError> {
    let (_, blocks) = resolved_blocks(params, kind)?;
    let dim = 1usize << params.n_qubits;
    let mut eigvecs = Mat::<C64>::zeros(dim, dim);
    let mut values = Vec::with_capacity(dim);
    let mut sectors = Vec::with_capacity(dim);
    let mut offset = 0;
    for (sector, basis, m) in blocks {
        let (vals, w) = match kind {
            SpectrumKind::Floquet => eig_unitary(&DenseOperator::new(m))?,
            SpectrumKind::Hamiltonian => eig_hermitian(&hermitised(m))?,
        };
        embed(&basis, &w, &mut eigvecs, offset);
        offset += vals.len();
        sectors.extend(std::iter::repeat(sector).take(vals.len()));
        values.extend(vals);
    }
    Ok(Spectrum::from_parts(kind, params.n_qubits, values, sectors, eigvecs))
}

/// Half-chain von Neumann entropy of every eigenvector (sites `0..N/2` kept).
pub fn entanglement_scan(spectrum: &mut Spectrum) -> Result<(), SpectraError> {
    let n = spectrum.n_qubits;
    check_cap(n)?;
    let entropies: Result<Vec<f64>, SpectraError> = (0..spectrum.len())
        .into_par_iter()
        .map(|j| {
            let s = StateVector::normalized(n, spectrum.eigenvector(j))?;
            let rho = reduced_density_matrix(&s, 0..n / 2)?;
            Ok(von_neumann_entropy(&rho)?)
        })
        .collect();
    for (r, s) in spectrum.records.iter_mut().zip(entropies?) {
        r.entanglement = Some(s);
    }
    Ok(())
}

/// `S_Page = (N ln 2 - 1) / 2`.
pub fn page_entropy(n: usize) -> f64 {
    (n as f64 * std::f64::consts::LN_2 - 1.0) / 2.0
}

/// Median entanglement over levels outside the zero cluster.
pub fn bulk_median_entropy(spectrum: &Spectrum) -> Option<f64> {
    let mut s: Vec<f64> = spectrum
        .records
        .iter()
        .filter(|r| r.value.abs() >= CLUSTER_TOL)
        .filter_map(|r| r.entanglement)
        .collect();
    if s.is_empty() {
        return None;
    }
    s.sort_by(f64::total_cmp);
    let m = s.len();
    Some(if m % 2 == 1 {
        s[m / 2]
    } else {
        0.5 * (s[m / 2 - 1] + s[m / 2])
    })
}

/// Hamiltonian eigenvalues, sector by sector when a reflection symmetry exists.
pub fn hamiltonian_eigenvalues(params: &ModelParams) -> Result<Vec<f64>, SpectraError> {
    params.validate()?;
    check_cap(params.n_qubits)?;
    let mut vals = if SymmetryOp::for_g(params.g).is_some() {
        let (_, blocks) = resolved_blocks(params, SpectrumKind::Hamiltonian)?;
        let mut v = Vec::new();
        for (_, _, m) in blocks {
            v.extend(eigvals_hermitian(&hermitised(m))?);
        }
        v
    } else {
        eigvals_hermitian(&hamiltonian(params)?)?
    };
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Number of Hamiltonian eigenvalues with `|E| < tol`.
pub fn zero_mode_count(params: &ModelParams, tol: f64) -> Result<usize, SpectraError> {
    if !(tol > 0.0) {
        return Err(SpectraError::BadArgument(format!("tolerance {tol}")));
    }
    Ok(hamiltonian_eigenvalues(params)?
        .into_iter()
        .filter(|e| e.abs() < tol)
        .count())
}

#[cfg(test)]
mod tests;
