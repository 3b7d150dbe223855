use std::path::PathBuf;

use rayon::prelude::*;
use scarlab_core::numfmt::fmt17;
use scarlab_core::scars::{boundary_state, localization_length};
use scarlab_core::spectra::{gap_curve, MAX_SITES};
use scarlab_core::C64;
use serde_json::json;

use crate::args::{Quantity, SweepArgs};
use crate::config::{self, pick, CliConfig};
use crate::io::Run;
use crate::{CliError, CliResult};

const DEFAULT_SITES: usize = 256;

fn quantity_name(q: Quantity) -> &'static str {
    match q {
        Quantity::Gap => "gap",
        Quantity::Imbalance => "imbalance",
        Quantity::Entropy => "entropy",
        Quantity::Xi => "xi",
    }
}

/// `points` evenly spaced values from `from` to `to` inclusive.
pub fn grid(from: f64, to: f64, points: usize) -> CliResult<Vec<f64>> {
    if !from.is_finite() || !to.is_finite() || !(from < to) {
        return Err(CliError::Config(format!("invalid range [{from}, {to}]: need finite from < to")));
    }
    if points < 2 {
        return Err(CliError::Config(format!("need at least 2 points, got {points}")));
    }
    let step = (to - from) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| if i + 1 == points { to } else { from + i as f64 * step })
        .collect())
}

pub fn run(a: &SweepArgs, cfg: &CliConfig, verbose: u8) -> CliResult<()> {
    let verbose = verbose.max(cfg.verbosity.unwrap_or(0));
    let gs = grid(a.from, a.to, a.points)?;
    let n = a.n.or(cfg.n).unwrap_or(DEFAULT_SITES);
    if n < 2 || n % 2 != 0 {
        return Err(CliError::Config(format!("n must be even and at least 2, got {n}")));
    }
    if n > MAX_SITES {
        return Err(CliError::Cap(format!("single-excitation sweeps are capped at {MAX_SITES} sites, got {n}")));
    }
    match a.quantity {
        Quantity::Gap if a.from <= 0.0 => {
            return Err(CliError::Config("the gap sweep runs over positive g only".into()));
        }
        _ if gs.contains(&0.0) => {
            return Err(CliError::Config("g = 0 lies inside the range; the boundary state needs g != 0".into()));
        }
        _ => {}
    }
    let out: PathBuf = pick(a.output.out.clone(), &cfg.out, PathBuf::from("."));
    let run_id = pick(a.output.run_id.clone(), &cfg.run_id, "run".to_string());
    config::check_run_id(&run_id)?;

    let values: Vec<f64> = match a.quantity {
        Quantity::Gap => gap_curve(&gs, n)
            .map_err(|e| CliError::Config(e.to_string()))?
            .into_iter()
            .map(|(_, d)| d)
            .collect(),
        q => gs
            .par_iter()
            .map(|&g| {
                let g = C64::new(g, 0.0);
                let v = match q {
                    Quantity::Xi => localization_length(g),
                    Quantity::Imbalance => boundary_state(g, n).map(|s| s.imbalance()),
                    _ => boundary_state(g, n).map(|s| s.half_chain_entropy()),
                };
                v.map_err(|e| CliError::Config(e.to_string()))
            })
            .collect::<CliResult<_>>()?,
    };

    let name = quantity_name(a.quantity);
    let mut run = Run::start("sweep", &out, verbose)?;
    let mut csv = format!("g,{name}\n");
    for (g, v) in gs.iter().zip(&values) {
        csv.push_str(&format!("{},{}\n", fmt17(*g), fmt17(*v)));
    }
    let stem = format!("{run_id}_sweep_{name}");
    run.write(&format!("{stem}.csv"), csv.as_bytes())?;
    let echo = CliConfig {
        n: Some(n),
        out: Some(out),
        run_id: Some(run_id),
        verbosity: Some(verbose),
        ..CliConfig::default()
    };
    let results = json!({ "quantity": name, "from": a.from, "to": a.to, "points": a.points });
    let manifest = run.finish(&stem, serde_json::to_value(&echo).expect("config serialises"), results)?;
    println!("{}", manifest.display());
    Ok(())
}
