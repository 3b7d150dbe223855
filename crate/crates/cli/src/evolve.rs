use std::path::PathBuf;

use scarlab_core::dynamics::{csv_file_name, evolve, DynamicsError, Observable, RunConfig, DEFAULT_SHOTS};
use scarlab_core::numfmt::fmt17;
use scarlab_core::pvbs::ModelParams;
use scarlab_core::qops::MAX_QUBITS;
use serde_json::json;

use crate::args::EvolveArgs;
use crate::config::{self, pick, CliConfig, GValue, NoiseValue};
use crate::io::Run;
use crate::{CliError, CliResult};

pub fn dynamics_error(e: DynamicsError) -> CliError {
    match e {
        DynamicsError::SizeCap(_) => CliError::Cap(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

const DEFAULT_OBSERVABLES: [Observable; 4] =
    [Observable::MTotal, Observable::Fidelity, Observable::Imbalance, Observable::MSites];

pub fn run(a: &EvolveArgs, cfg: &CliConfig, verbose: u8) -> CliResult<()> {
    let verbose = verbose.max(cfg.verbosity.unwrap_or(0));
    let n = a
        .model
        .n
        .or(cfg.n)
        .ok_or_else(|| CliError::Config("--n is required".into()))?;
    config::check_chain_length(n)?;
    let (g, even, odd, gens) = config::resolve_model(a.model.g.as_deref(), a.model.gens.as_deref(), cfg)?;
    let steps = pick(a.steps, &cfg.steps, 10);
    let phi = pick(a.phi, &cfg.phi, 0.0);
    let prep = a.prep.or(cfg.prep);
    let init_name = pick(a.init.clone(), &cfg.init, "vacuum".to_string());
    let initial = config::parse_init(&init_name, phi, prep)?;
    let noise_value = match &a.noise {
        Some(s) => Some(NoiseValue::Named(s.clone())),
        None => cfg.noise.clone(),
    };
    let noise = match &noise_value {
        Some(v) => config::noise_from_value(v)?,
        None => None,
    };
    let shots = a
        .shots
        .or(cfg.shots)
        .unwrap_or(if noise.is_some() { DEFAULT_SHOTS } else { 0 });
    let seed = pick(a.seed, &cfg.seed, 0);
    let obs_names: Vec<String> = match (&a.observables, &cfg.observables) {
        (Some(v), _) | (None, Some(v)) => v.clone(),
        _ => DEFAULT_OBSERVABLES.iter().map(|o| o.name().to_string()).collect(),
    };
    let mut observables = config::parse_observables(&obs_names)?;
    // the site profile file is always written
    if !observables.contains(&Observable::MSites) {
        observables.push(Observable::MSites);
    }
    let out: PathBuf = pick(a.output.out.clone(), &cfg.out, PathBuf::from("."));
    let run_id = pick(a.output.run_id.clone(), &cfg.run_id, "run".to_string());
    config::check_run_id(&run_id)?;

    if n > MAX_QUBITS {
        return Err(CliError::Cap(format!("statevectors are capped at {MAX_QUBITS} qubits, got {n}")));
    }
    let params = ModelParams::new(g, n, even, odd).map_err(|e| CliError::Config(e.to_string()))?;
    let rc = RunConfig { params, initial, steps, observables, shots, noise, seed };
    rc.validate().map_err(dynamics_error)?;
    if verbose > 0 {
        eprintln!("evolving N = {n}, g = {g}, {steps} periods, shots = {shots}");
    }

    let mut run = Run::start("evolve", &out, verbose)?;
    let series = evolve(&rc).map_err(dynamics_error)?;
    let csv_name = csv_file_name(&run_id, n, g);
    let stem = csv_name.trim_end_matches(".csv").to_string();
    run.write(&csv_name, series.to_csv().as_bytes())?;

    let sites = series.sites.as_ref().expect("site data requested");
    let mut text = std::iter::once("t".to_string())
        .chain((0..n).map(|q| format!("z_{q}")))
        .collect::<Vec<_>>()
        .join(",");
    text.push('\n');
    for (t, row) in series.t.iter().zip(sites) {
        text.push_str(&t.to_string());
        for z in row {
            text.push(',');
            text.push_str(&fmt17(*z));
        }
        text.push('\n');
    }
    run.write(&format!("{stem}_sites.csv"), text.as_bytes())?;
    run.write_json(&format!("{stem}.json"), &series.to_json())?;

    let echo = CliConfig {
        n: Some(n),
        g: Some(GValue::from_c64(g)),
        steps: Some(steps),
        init: Some(init_name),
        phi: Some(phi),
        prep,
        gens: Some(gens),
        shots: Some(shots),
        noise: Some(noise_value.unwrap_or(NoiseValue::Named("none".into()))),
        seed: Some(seed),
        observables: Some(rc.observables.iter().map(|o| o.name().to_string()).collect()),
        out: Some(out),
        run_id: Some(run_id),
        verbosity: Some(verbose),
    };
    let summary = json!({
        "rows": series.t.len(),
        "final": series.columns.iter().map(|c| (c.name.clone(), json!(c.values.last()))).collect::<serde_json::Map<_, _>>(),
    });
    let manifest = run.finish(&stem, serde_json::to_value(&echo).expect("config serialises"), summary)?;
    println!("{}", manifest.display());
    Ok(())
}
