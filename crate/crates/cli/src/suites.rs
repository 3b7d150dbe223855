//! Invariant suites behind `scarlab verify`.

use std::f64::consts::LN_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use scarlab_core::pvbs::{
    apply_hamiltonian_raw, apply_reference_hamiltonian, dual_coeffs, east_form, floquet_unitary,
    local_interaction, parity_reflection_operator, reflect_index, reflection_operator, west_deviation,
    GeneratorCoeffs, ModelParams,
};
use scarlab_core::qops::{reduced_density_matrix, von_neumann_entropy, StateVector};
use scarlab_core::scars::{
    aqmbs_energy, aqmbs_state, boundary_entropy, boundary_state, imbalance_expectation,
    imbalance_operator_check, localization_length, product_vacuum,
};
use scarlab_core::spectra::{verify_aqmbs_scaling, verify_frustration_free, ResidualMode, TightBinding};
use scarlab_core::C64;

use crate::args::{Suite, VerifyArgs};
use crate::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq)]
enum Bound {
    Below(f64),
    Above(f64),
    Within(f64, f64),
}

#[derive(Clone, Debug)]
pub struct Check {
    suite: &'static str,
    name: String,
    value: f64,
    bound: Bound,
}

impl Check {
    fn below(suite: &'static str, name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self { suite, name: name.into(), value, bound: Bound::Below(tol) }
    }

    fn above(suite: &'static str, name: impl Into<String>, value: f64, floor: f64) -> Self {
        Self { suite, name: name.into(), value, bound: Bound::Above(floor) }
    }

    fn within(suite: &'static str, name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self { suite, name: name.into(), value, bound: Bound::Within(lo, hi) }
    }

    fn error(suite: &'static str, name: impl Into<String>, msg: impl std::fmt::Display) -> Self {
        let name = format!("{} ({msg})", name.into());
        Self { suite, name, value: f64::NAN, bound: Bound::Below(0.0) }
    }

    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::Below(t) => self.value < t,
            Bound::Above(t) => self.value > t,
            Bound::Within(lo, hi) => lo <= self.value && self.value <= hi,
        }
    }

    fn bound_text(&self) -> String {
        match self.bound {
            Bound::Below(t) => format!("< {t:.0e}"),
            Bound::Above(t) => format!("> {t:.0e}"),
            Bound::Within(lo, hi) => format!("in [{lo}, {hi}]"),
        }
    }
}

type Case = Box<dyn Fn() -> Vec<Check> + Send + Sync>;

const G_VALUES: [f64; 4] = [2.0 / 3.0, 1.0, 1.5, 2.0];
const RANDOM_GENS: usize = 10;

fn random_coeffs(rng: &mut ChaCha8Rng) -> GeneratorCoeffs {
    GeneratorCoeffs::new(
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-2.0..2.0),
        C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
    )
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    (0..1usize << n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn scars_cases(sizes: &[usize]) -> Vec<Case> {
    const S: &str = "scars";
    let mut cases: Vec<Case> = Vec::new();
    for &n in sizes {
        for g in G_VALUES {
            cases.push(Box::new(move || {
                let mut rng = ChaCha8Rng::seed_from_u64(n as u64 * 1000 + (g * 100.0) as u64);
                let mut gens = vec![(GeneratorCoeffs::paper_even(), GeneratorCoeffs::paper_odd())];
                gens.extend((0..RANDOM_GENS).map(|_| (random_coeffs(&mut rng), random_coeffs(&mut rng))));
                let label = format!("N={n} g={g:.4}");
                let run = || -> Result<[f64; 3], String> {
                    let vac = product_vacuum(n).map_err(|e| e.to_string())?;
                    let b = boundary_state(C64::new(g, 0.0), n)
                        .and_then(|s| s.to_state_vector())
                        .map_err(|e| e.to_string())?;
                    let mut worst = [0.0f64; 3];
                    for (e, o) in &gens {
                        let p = ModelParams::new(C64::new(g, 0.0), n, *e, *o).map_err(|e| e.to_string())?;
                        let r = [
                            verify_frustration_free(&p, &vac, ResidualMode::Hamiltonian),
                            verify_frustration_free(&p, &b, ResidualMode::Hamiltonian),
                            verify_frustration_free(&p, &b, ResidualMode::Circuit),
                        ];
                        for (w, x) in worst.iter_mut().zip(r) {
                            *w = w.max(x.map_err(|e| e.to_string())?);
                        }
                    }
                    Ok(worst)
                };
                match run() {
                    Ok([hv, hb, ub]) => vec![
                        Check::below(S, format!("{label} max ||H V||"), hv, 1e-12),
                        Check::below(S, format!("{label} max ||H B||"), hb, 1e-12),
                        Check::below(S, format!("{label} max ||U B - B||"), ub, 1e-10),
                    ],
                    Err(e) => vec![Check::error(S, label, e)],
                }
            }));
        }
    }
    cases
}

fn aqmbs_cases(sizes: &[usize]) -> Vec<Case> {
    const S: &str = "aqmbs";
    let mut cases: Vec<Case> = Vec::new();
    for mode in [ResidualMode::Hamiltonian, ResidualMode::Circuit] {
        let sizes = sizes.to_vec();
        cases.push(Box::new(move || {
            let label = match mode {
                ResidualMode::Hamiltonian => format!("||H A_1|| strictly decreasing over {sizes:?}"),
                ResidualMode::Circuit => format!("||U A_1 - A_1|| strictly decreasing over {sizes:?}"),
            };
            let p = match ModelParams::paper(1.0, sizes[0]) {
                Ok(p) => p,
                Err(e) => return vec![Check::error(S, label, e)],
            };
            match verify_aqmbs_scaling(&p, 1, &sizes, mode) {
                // the value is the largest ratio of successive residuals
                Ok(r) => {
                    let ratio = r.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
                    vec![Check::below(S, label, ratio, 1.0)]
                }
                Err(e) => vec![Check::error(S, label, e)],
            }
        }));
    }
    for &n in sizes {
        cases.push(Box::new(move || {
            let mut out = Vec::new();
            for k in 1..=3usize.min(n - 1) {
                let label = format!("N={n} k={k} single-excitation H+ A_k = eps_k A_k");
                let res = TightBinding::new(C64::new(1.0, 0.0), n)
                    .map_err(|e| e.to_string())
                    .and_then(|tb| {
                        let a = aqmbs_state(k, 0.0, n).map_err(|e| e.to_string())?;
                        let ha = tb.apply(a.amplitudes());
                        let eps = aqmbs_energy(k, n);
                        let want: Vec<C64> = a.amplitudes().iter().map(|x| x * eps).collect();
                        Ok(max_diff(&ha, &want))
                    });
                out.push(match res {
                    Ok(r) => Check::below(S, label, r, 1e-12),
                    Err(e) => Check::error(S, label, e),
                });
                if n <= 16 {
                    let label = format!("N={n} k={k} full-register H+ A_k = eps_k A_k");
                    let res = (|| -> Result<f64, String> {
                        let p = ModelParams::paper(1.0, n).map_err(|e| e.to_string())?;
                        let a = aqmbs_state(k, 0.0, n)
                            .and_then(|s| s.to_state_vector())
                            .map_err(|e| e.to_string())?;
                        let ha = apply_reference_hamiltonian(&p, &a).map_err(|e| e.to_string())?;
                        let eps = aqmbs_energy(k, n);
                        let want: Vec<C64> = a.amplitudes().iter().map(|x| x * eps).collect();
                        Ok(max_diff(&ha, &want))
                    })();
                    out.push(match res {
                        Ok(r) => Check::below(S, label, r, 1e-12),
                        Err(e) => Check::error(S, label, e),
                    });
                }
            }
            out
        }));
    }
    cases
}

fn symmetry_cases(sizes: &[usize]) -> Vec<Case> {
    const S: &str = "symmetry";
    let mut cases: Vec<Case> = Vec::new();
    for &n in sizes {
        cases.push(Box::new(move || {
            let comm = |g: f64, op: &scarlab_core::qops::DenseOperator| -> Result<f64, String> {
                let u = ModelParams::paper(g, n)
                    .and_then(|p| floquet_unitary(&p))
                    .map_err(|e| e.to_string())?;
                Ok(u.commutator_max_norm(op))
            };
            let pr = parity_reflection_operator(n);
            let r = reflection_operator(n);
            let items = [
                (format!("N={n} g=1 ||[U, Pi R]||"), comm(1.0, &pr), true),
                (format!("N={n} g=-1 ||[U, R]||"), comm(-1.0, &r), true),
                (format!("N={n} g=1.5 ||[U, Pi R]|| (control)"), comm(1.5, &pr), false),
                (format!("N={n} g=1.5 ||[U, R]|| (control)"), comm(1.5, &r), false),
            ];
            items
                .into_iter()
                .map(|(name, v, symmetric)| match v {
                    Ok(v) if symmetric => Check::below(S, name, v, 1e-10),
                    Ok(v) => Check::above(S, name, v, 1e-3),
                    Err(e) => Check::error(S, name, e),
                })
                .collect()
        }));
    }
    cases
}

fn closedform_cases(sizes: &[usize]) -> Vec<Case> {
    const S: &str = "closedforms";
    let mut cases: Vec<Case> = Vec::new();
    cases.push(Box::new(|| {
        let v = imbalance_expectation(C64::new(2.0, 0.0), 4).unwrap_or(f64::NAN);
        vec![Check::below(S, "imbalance g=2 N=4 equals 15/17", (v - 15.0 / 17.0).abs(), 1e-15)]
    }));
    for &n in sizes {
        cases.push(Box::new(move || {
            let mut grid: Vec<C64> = (0..20).map(|i| C64::new(0.3 + 0.15 * i as f64, 0.0)).collect();
            grid.extend([C64::new(-1.0, 0.0), C64::from_polar(1.0, 0.3), C64::from_polar(1.7, -0.8), C64::new(-0.6, 0.0)]);
            let mut worst_i: f64 = 0.0;
            let mut worst_s: f64 = 0.0;
            let mut unit: f64 = 0.0;
            for g in grid {
                let res = (|| -> Result<(f64, f64), String> {
                    let state = boundary_state(g, n).and_then(|s| s.to_state_vector()).map_err(|e| e.to_string())?;
                    let ci = imbalance_expectation(g, n).map_err(|e| e.to_string())?;
                    let cs = boundary_entropy(g, n).map_err(|e| e.to_string())?;
                    let s = entropy(&state)?;
                    Ok(((ci - imbalance_operator_check(&state)).abs(), (cs - s).abs()))
                })();
                match res {
                    Ok((di, ds)) => {
                        worst_i = worst_i.max(di);
                        worst_s = worst_s.max(ds);
                    }
                    Err(e) => return vec![Check::error(S, format!("N={n} g={g}"), e)],
                }
                if (g.norm() - 1.0).abs() < 1e-15 {
                    unit = unit.max((boundary_entropy(g, n).unwrap_or(f64::NAN) - LN_2).abs());
                }
            }
            vec![
                Check::below(S, format!("N={n} imbalance closed form vs operator"), worst_i, 1e-12),
                Check::below(S, format!("N={n} entropy closed form vs reduced state"), worst_s, 1e-12),
                Check::below(S, format!("N={n} entropy at |g|=1 equals ln 2"), unit, 1e-12),
            ]
        }));
    }
    cases.push(Box::new(|| {
        // xi fitted from boundary amplitudes against |g| - 1 on a log scale
        let deltas: Vec<f64> = (0..12).map(|i| 10f64.powf(-3.0 + i as f64 * 2.0 / 11.0)).collect();
        let mut pts = Vec::new();
        for d in &deltas {
            let g = C64::new(1.0 + d, 0.0);
            let Ok(b) = boundary_state(g, 64) else {
                return vec![Check::error(S, "localisation length fit", "boundary state")];
            };
            let a = b.amplitudes();
            let decay = (a[0].norm().ln() - a[63].norm().ln()) / 63.0;
            let xi = 1.0 / decay;
            let closed = localization_length(g).unwrap_or(f64::NAN);
            if (xi - closed).abs() > 1e-6 * closed {
                return vec![Check::error(S, "localisation length fit", format!("xi {xi} vs closed form {closed}"))];
            }
            pts.push((d.ln(), xi.ln()));
        }
        let m = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (mx, my) = (sx / m, sy / m);
        let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx).powi(2)));
        vec![Check::within(S, "log-log slope of xi vs |g|-1", sxy / sxx, -1.05, -0.95)]
    }));
    cases
}

fn entropy(state: &StateVector) -> Result<f64, String> {
    let rho = reduced_density_matrix(state, 0..state.n_qubits() / 2).map_err(|e| e.to_string())?;
    von_neumann_entropy(&rho).map_err(|e| e.to_string())
}

fn east_west_cases(sizes: &[usize]) -> Vec<Case> {
    const S: &str = "east-west";
    let mut cases: Vec<Case> = Vec::new();
    cases.push(Box::new(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mut east: f64 = 0.0;
        let mut west: f64 = 0.0;
        for _ in 0..20 {
            let c = random_coeffs(&mut rng);
            east = east.max(local_interaction(C64::new(0.0, 0.0), &c).matrix.max_abs_diff(&east_form(&c)));
            for g in [C64::new(1e3, 0.0), C64::new(-1e3, 0.0), C64::from_polar(1e3, 0.7)] {
                west = west.max(west_deviation(g, &c).0);
            }
        }
        vec![
            Check::below(S, "g=0 interaction equals the East form", east, 1e-14),
            Check::below(S, "|g|=1e3 interaction direction vs West form", west, 1e-5),
        ]
    }));
    for &n in sizes {
        cases.push(Box::new(move || {
            let mut rng = ChaCha8Rng::seed_from_u64(43 + n as u64);
            let (e, o) = (random_coeffs(&mut rng), random_coeffs(&mut rng));
            let g = C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let res = (|| -> Result<(f64, f64), String> {
                let p = ModelParams::new(g, n, e, o).map_err(|e| e.to_string())?;
                let dual = ModelParams::new(g.inv(), n, dual_coeffs(g, &e), dual_coeffs(g, &o)).map_err(|e| e.to_string())?;
                let v = random_state(n, &mut rng);
                let reflect = |x: &[C64]| -> Vec<C64> {
                    let mut y = vec![C64::new(0.0, 0.0); x.len()];
                    for (i, a) in x.iter().enumerate() {
                        y[reflect_index(i, n)] = *a;
                    }
                    y
                };
                let lhs = reflect(&apply_hamiltonian_raw(&p, &reflect(&v)));
                let rhs = apply_hamiltonian_raw(&dual, &v);
                let east = ModelParams::east(n, e, o).map_err(|e| e.to_string())?;
                let vac = product_vacuum(n).map_err(|e| e.to_string())?;
                let hv = verify_frustration_free(&east, &vac, ResidualMode::Hamiltonian).map_err(|e| e.to_string())?;
                Ok((max_diff(&lhs, &rhs), hv))
            })();
            match res {
                Ok((d, hv)) => vec![
                    Check::below(S, format!("N={n} reflection maps g to 1/g with dual generators"), d, 1e-12),
                    Check::below(S, format!("N={n} East chain annihilates the vacuum"), hv, 1e-12),
                ],
                Err(err) => vec![Check::error(S, format!("N={n} duality"), err)],
            }
        }));
    }
    cases
}

fn default_sizes(suite: Suite) -> Vec<usize> {
    match suite {
        Suite::Scars => vec![6, 8, 10, 12],
        Suite::Aqmbs => vec![8, 12, 16],
        Suite::Symmetry => vec![8],
        Suite::Closedforms => vec![4, 6, 8, 10, 12],
        Suite::EastWest => vec![8, 10, 12],
        Suite::All => Vec::new(),
    }
}

fn cases_for(suite: Suite, sizes: &[usize]) -> Vec<Case> {
    match suite {
        Suite::Scars => scars_cases(sizes),
        Suite::Aqmbs => aqmbs_cases(sizes),
        Suite::Symmetry => symmetry_cases(sizes),
        Suite::Closedforms => closedform_cases(sizes),
        Suite::EastWest => east_west_cases(sizes),
        Suite::All => Vec::new(),
    }
}

fn check_sizes(suite: Suite, sizes: &[usize]) -> CliResult<()> {
    let (min, max) = match suite {
        Suite::Symmetry => (4, 12),
        Suite::Closedforms => (4, 20),
        _ => (4, 20),
    };
    if sizes.is_empty() {
        return Err(CliError::Config("--sizes is empty".into()));
    }
    for &n in sizes {
        if n % 2 != 0 || n < min {
            return Err(CliError::Config(format!("sizes must be even and at least {min}, got {n}")));
        }
        if n > max {
            return Err(CliError::Cap(format!("this suite is capped at {max} qubits, got {n}")));
        }
    }
    if suite == Suite::Aqmbs && sizes.len() < 2 {
        return Err(CliError::Config("the aqmbs suite compares at least two sizes".into()));
    }
    Ok(())
}

/// All checks of the selected suites, evaluated concurrently and returned in a fixed order.
pub fn collect(suite: Suite, sizes: Option<&[usize]>) -> CliResult<Vec<Check>> {
    let suites: Vec<Suite> = match suite {
        Suite::All => vec![Suite::Scars, Suite::Aqmbs, Suite::Symmetry, Suite::Closedforms, Suite::EastWest],
        s => vec![s],
    };
    let mut cases = Vec::new();
    for s in suites {
        let sz = sizes.map_or_else(|| default_sizes(s), <[usize]>::to_vec);
        check_sizes(s, &sz)?;
        cases.extend(cases_for(s, &sz));
    }
    Ok(cases.par_iter().flat_map_iter(|c| c()).collect())
}

pub fn run(a: &VerifyArgs, verbose: u8) -> CliResult<()> {
    if verbose > 0 {
        eprintln!("running {:?} on {} threads", a.suite, rayon::current_num_threads());
    }
    let checks = collect(a.suite, a.sizes.as_deref())?;
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    println!("{:<12} {:<width$} {:>12} {:>14} result", "suite", "check", "value", "bound");
    for c in &checks {
        println!(
            "{:<12} {:<width$} {:>12.3e} {:>14} {}",
            c.suite,
            c.name,
            c.value,
            c.bound_text(),
            if c.passed() { "PASS" } else { "FAIL" }
        );
    }
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| format!("{}: {}", c.suite, c.name))
        .collect();
    println!("{} of {} checks passed", checks.len() - failed.len(), checks.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Suite(format!("failed: {}", failed.join("; "))))
    }
}
