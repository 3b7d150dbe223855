use std::path::PathBuf;

use scarlab_core::numfmt::fmt17;
use scarlab_core::pvbs::{ModelParams, SymmetryOp};
use scarlab_core::spectra::{
    bulk_median_entropy, entanglement_scan, floquet_spectrum, hamiltonian_spectrum, level_spacing_stats,
    page_entropy, resolved_spectrum, zero_mode_count, Sector, SpectraError, SpectrumKind, DEFAULT_ZERO_TOL,
    ED_MAX_QUBITS,
};
use serde_json::{json, Value};

use crate::args::{ModelKind, SectorArg, SpectrumArgs};
use crate::config::{self, pick, CliConfig, GValue};
use crate::io::Run;
use crate::{CliError, CliResult};

pub fn spectra_error(e: SpectraError) -> CliError {
    match e {
        SpectraError::SizeCap { .. } => CliError::Cap(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

fn sector_name(s: Sector) -> &'static str {
    match s {
        Sector::Even => "even",
        Sector::Odd => "odd",
        Sector::None => "none",
    }
}

pub fn run(a: &SpectrumArgs, cfg: &CliConfig, verbose: u8) -> CliResult<()> {
    let verbose = verbose.max(cfg.verbosity.unwrap_or(0));
    let n = a
        .model
        .n
        .or(cfg.n)
        .ok_or_else(|| CliError::Config("--n is required".into()))?;
    config::check_chain_length(n)?;
    if n > ED_MAX_QUBITS {
        return Err(CliError::Cap(format!(
            "exact diagonalisation is capped at {ED_MAX_QUBITS} qubits, got {n}"
        )));
    }
    let (g, even, odd, gens) = config::resolve_model(a.model.g.as_deref(), a.model.gens.as_deref(), cfg)?;
    let out: PathBuf = pick(a.output.out.clone(), &cfg.out, PathBuf::from("."));
    let run_id = pick(a.output.run_id.clone(), &cfg.run_id, "run".to_string());
    config::check_run_id(&run_id)?;
    let params = ModelParams::new(g, n, even, odd).map_err(|e| CliError::Config(e.to_string()))?;
    let kind = match a.model_kind {
        ModelKind::Floquet => SpectrumKind::Floquet,
        ModelKind::Hamiltonian => SpectrumKind::Hamiltonian,
    };

    let symmetric = SymmetryOp::for_g(g).is_some();
    let wanted: Vec<Sector> = match (a.sector, symmetric) {
        (SectorArg::Even | SectorArg::Odd, false) => {
            return Err(CliError::Config(format!(
                "sector resolution needs the reflection symmetry present only at g = 1 or g = -1; g = {g} has none (use --sector all)"
            )));
        }
        (SectorArg::Even, true) => vec![Sector::Even],
        (SectorArg::Odd, true) => vec![Sector::Odd],
        (SectorArg::All, true) => vec![Sector::Even, Sector::Odd],
        (SectorArg::All, false) => {
            eprintln!("warning: g = {g} has no reflection symmetry; running without sector resolution");
            vec![Sector::None]
        }
    };

    let mut run = Run::start("spectrum", &out, verbose)?;
    if verbose > 0 {
        eprintln!("diagonalising N = {n}, g = {g}");
    }
    let mut spectrum = match (symmetric, kind) {
        (true, k) => resolved_spectrum(&params, k),
        (false, SpectrumKind::Floquet) => floquet_spectrum(&params),
        (false, SpectrumKind::Hamiltonian) => hamiltonian_spectrum(&params),
    }
    .map_err(spectra_error)?;
    if a.entanglement {
        spectrum.split_degenerate_by_magnetization().map_err(spectra_error)?;
        entanglement_scan(&mut spectrum).map_err(spectra_error)?;
    }

    let mut csv = String::from("index,value,sector,entanglement,cluster\n");
    for (j, r) in spectrum.records.iter().enumerate() {
        if !wanted.contains(&r.sector) {
            continue;
        }
        let s = r.entanglement.map(fmt17).unwrap_or_default();
        csv.push_str(&format!("{j},{},{},{s},{}\n", fmt17(r.value), sector_name(r.sector), r.degeneracy_cluster));
    }
    run.write(&format!("{run_id}_spectrum.csv"), csv.as_bytes())?;

    let mut stats = serde_json::Map::new();
    stats.insert("n".into(), json!(n));
    stats.insert("g".into(), json!([g.re, g.im]));
    stats.insert("model".into(), json!(if kind == SpectrumKind::Floquet { "floquet" } else { "hamiltonian" }));
    stats.insert("sector_resolved".into(), json!(symmetric));
    if a.stats {
        let mut sectors = Vec::new();
        for &s in &wanted {
            let entry = match level_spacing_stats(&spectrum, s) {
                Ok(ls) => {
                    println!("mean_r[{}] = {:.6} ({} levels, {} excluded)", sector_name(s), ls.mean_r, ls.n_levels, ls.excluded);
                    json!({
                        "sector": sector_name(s),
                        "mean_r": ls.mean_r,
                        "n_levels": ls.n_levels,
                        "excluded": ls.excluded,
                        "histogram": ls.histogram,
                    })
                }
                Err(e) => {
                    eprintln!("warning: no statistics for sector {}: {e}", sector_name(s));
                    json!({ "sector": sector_name(s), "error": e.to_string() })
                }
            };
            sectors.push(entry);
        }
        stats.insert("sectors".into(), Value::Array(sectors));
    }
    if a.entanglement {
        let median = bulk_median_entropy(&spectrum);
        stats.insert("page_entropy".into(), json!(page_entropy(n)));
        stats.insert("bulk_median_entropy".into(), json!(median));
        if let Some(m) = median {
            println!("bulk_median_entropy = {m:.6} (page {:.6})", page_entropy(n));
        }
    }
    if a.zero_modes {
        let count = zero_mode_count(&params, DEFAULT_ZERO_TOL).map_err(spectra_error)?;
        println!("zero_modes = {count}");
        stats.insert("zero_modes".into(), json!(count));
        stats.insert("zero_tol".into(), json!(DEFAULT_ZERO_TOL));
    }
    let stats = Value::Object(stats);
    run.write_json(&format!("{run_id}_stats.json"), &stats)?;

    let echo = CliConfig {
        n: Some(n),
        g: Some(GValue::from_c64(g)),
        gens: Some(gens),
        out: Some(out),
        run_id: Some(run_id.clone()),
        verbosity: Some(verbose),
        ..CliConfig::default()
    };
    let manifest = run.finish(
        &format!("{run_id}_spectrum"),
        serde_json::to_value(&echo).expect("config serialises"),
        stats,
    )?;
    println!("{}", manifest.display());
    Ok(())
}
