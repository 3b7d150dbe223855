//! The reference Hamiltonian restricted to one excitation: an open tight-binding
//! chain with hopping `t = -g/(1+|g|^2)`, bulk on-site energy 1 and reduced
//! end energies.

use rayon::prelude::*;

use super::SpectraError;
use crate::qops::DenseOperator;
use crate::scars::{ScarsError, SingleExcitationState};
use crate::C64;

/// Largest chain accepted by the tight-binding routines.
pub const MAX_SITES: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct TightBinding {
    pub n_sites: usize,
    pub onsite: Vec<f64>,
    /// `<n|H|n+1>`.
    pub hopping: C64,
}

impl TightBinding {
    pub fn new(g: C64, n: usize) -> Result<Self, SpectraError> {
        if g == C64::new(0.0, 0.0) {
            return Err(ScarsError::ZeroG.into());
        }
        if !(2..=MAX_SITES).contains(&n) {
            return Err(SpectraError::BadArgument(format!("{n} sites")));
        }
        let den = 1.0 + g.norm_sqr();
        let mut onsite = vec![1.0; n];
        onsite[0] = 1.0 / den;
        onsite[n - 1] = g.norm_sqr() / den;
        Ok(Self {
            n_sites: n,
            onsite,
            hopping: -g / den,
        })
    }

    pub fn apply(&self, c: &[C64]) -> Vec<C64> {
        let n = self.n_sites;
        assert_eq!(c.len(), n);
        let t = self.hopping;
        (0..n)
            .map(|i| {
                let mut v = c[i] * self.onsite[i];
                if i + 1 < n {
                    v += t * c[i + 1];
                }
                if i > 0 {
                    v += t.conj() * c[i - 1];
                }
                v
            })
            .collect()
    }

    pub fn dense(&self) -> DenseOperator {
        let n = self.n_sites;
        let t = self.hopping;
        DenseOperator::from_fn(n, |i, j| {
            if i == j {
                C64::new(self.onsite[i], 0.0)
            } else if j == i + 1 {
                t
            } else if i == j + 1 {
                t.conj()
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Real off-diagonal `-|t|` of the gauge-transformed chain.
    fn beta(&self) -> f64 {
        -self.hopping.norm()
    }

    /// Gauge angle `theta` with `c_n = e^{i theta n} c'_n`, `c'` real.
    fn gauge(&self) -> f64 {
        std::f64::consts::PI - self.hopping.arg()
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    fn count_below(&self, x: f64) -> usize {
        let b2 = self.beta() * self.beta();
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in self.onsite.iter().enumerate() {
            q = if i == 0 { d - x } else { d - x - b2 / q };
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// `k`-th eigenvalue (ascending, from 0) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.n_sites);
        let r = 2.0 * self.beta().abs();
        let mut lo = self.onsite.iter().cloned().fold(f64::INFINITY, f64::min) - r - 1e-12;
        let mut hi = self.onsite.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + r + 1e-12;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        (0..self.n_sites).into_par_iter().map(|k| self.eigenvalue(k)).collect()
    }

    /// Eigenvector for eigenvalue `lambda` by inverse iteration on the real
    /// gauge-transformed chain, mapped back to the original gauge.
    pub fn eigenvector(&self, lambda: f64) -> Result<SingleExcitationState, SpectraError> {
        let n = self.n_sites;
        let lu = TridiagLu::new(&self.onsite, self.beta(), lambda);
        let mut y: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
        for _ in 0..4 {
            lu.solve(&mut y);
            let nrm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(nrm > 0.0) || !nrm.is_finite() {
                return Err(SpectraError::BadArgument("inverse iteration diverged".into()));
            }
            y.iter_mut().for_each(|v| *v /= nrm);
        }
        // fix the sign so the largest component is positive
        let big = y.iter().cloned().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
        let sign = if big < 0.0 { -1.0 } else { 1.0 };
        let theta = self.gauge();
        let amps = y
            .iter()
            .enumerate()
            .map(|(i, v)| C64::from_polar(sign * v, theta * i as f64))
            .collect();
        Ok(SingleExcitationState::normalized(amps)?)
    }

    /// Lowest `levels` eigenpairs.
    pub fn lowest(&self, levels: usize) -> Result<(Vec<f64>, Vec<SingleExcitationState>), SpectraError> {
        let levels = levels.min(self.n_sites);
        let vals: Vec<f64> = (0..levels).map(|k| self.eigenvalue(k)).collect();
        let vecs = vals
            .iter()
            .map(|&l| self.eigenvector(l))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((vals, vecs))
    }
}

/// LU factorisation with partial pivoting of `T - lambda` for symmetric
/// tridiagonal `T` with constant off-diagonal.
struct TridiagLu {
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    dl: Vec<f64>,
    swap: Vec<bool>,
}

impl TridiagLu {
    fn new(diag: &[f64], beta: f64, lambda: f64) -> Self {
        let n = diag.len();
        let mut d: Vec<f64> = diag.iter().map(|x| x - lambda).collect();
        let mut du = vec![beta; n.saturating_sub(1)];
        let mut dl = vec![beta; n.saturating_sub(1)];
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swap = vec![false; n.saturating_sub(1)];
        let eps = f64::EPSILON * (diag.iter().fold(0.0f64, |m, x| m.max(x.abs())) + 2.0 * beta.abs());
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = eps;
                }
                let f = dl[i] / d[i];
                dl[i] = f;
                d[i + 1] -= f * du[i];
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - f * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du[i + 1];
                }
                swap[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = eps;
        }
        Self { d, du, du2, dl, swap }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n - 1 {
            if self.swap[i] {
                let t = b[i];
                b[i] = b[i + 1];
                b[i + 1] = t - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

/// Lowest `levels` eigenpairs of the one-excitation problem.
pub fn single_excitation_solver(
    g: C64,
    n: usize,
    levels: usize,
) -> Result<(Vec<f64>, Vec<SingleExcitationState>), SpectraError> {
    TightBinding::new(g, n)?.lowest(levels)
}

/// Every one-excitation eigenvalue, ascending.
pub fn single_excitation_spectrum(g: C64, n: usize) -> Result<Vec<f64>, SpectraError> {
    Ok(TightBinding::new(g, n)?.eigenvalues())
}

/// `(g, eps_1 - eps_0)` over a grid of positive real `g`.
pub fn gap_curve(g_grid: &[f64], n: usize) -> Result<Vec<(f64, f64)>, SpectraError> {
    g_grid
        .par_iter()
        .map(|&g| {
            if !(g > 0.0) || !g.is_finite() {
                return Err(SpectraError::BadArgument(format!("g = {g}")));
            }
            let tb = TightBinding::new(C64::new(g, 0.0), n)?;
            Ok((g, tb.eigenvalue(1) - tb.eigenvalue(0)))
        })
        .collect()
}
