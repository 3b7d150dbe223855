use std::path::PathBuf;

use scarlab_core::nativec::{
    decompose_general, decompose_restricted, emit_qasm, single_excitation_output, sm_prep_circuit,
    synthesize_state_prep, table1_fixture, template_circuit, Circuit, NativeError, PrepConvention, PREP_TOL,
    RECONSTRUCTION_TOL, TABLE1_G,
};
use scarlab_core::pvbs::{floquet_gate, GeneratorCoeffs};
use scarlab_core::qops::StateVector;
use scarlab_core::scars::aqmbs_state;
use serde_json::json;

use crate::args::{CompileArgs, Emit, PrepareArgs, Which};
use crate::config::{self, pick, CliConfig, GValue, GensValue};
use crate::io::Run;
use crate::{CliError, CliResult};

/// Tolerance for the tabulated (four-decimal) template parameters.
pub const TABLE1_TOL: f64 = 5e-3;
/// Fidelity floor for the published preparation angles, which are printed to three decimals.
pub const FIXTURE_FIDELITY: f64 = 0.999;
/// Largest register simulated as a full statevector during `prepare --verify`.
const FULL_CHECK_MAX: usize = 20;

fn native_error(e: NativeError) -> CliError {
    match e {
        NativeError::Residual(_) => CliError::Verify(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

fn emit(c: &Circuit, format: Emit) -> (String, &'static str) {
    match format {
        Emit::Qasm => (emit_qasm(c), "qasm"),
        Emit::Json => {
            let mut s = serde_json::to_string_pretty(&c.to_json()).expect("circuit serialises");
            s.push('\n');
            (s, "json")
        }
    }
}

pub fn run_compile(a: &CompileArgs, cfg: &CliConfig, verbose: u8) -> CliResult<()> {
    let verbose = verbose.max(cfg.verbosity.unwrap_or(0));
    let (g, even, odd, gens) = config::resolve_model(a.model.g.as_deref(), a.model.gens.as_deref(), cfg)?;
    let out: PathBuf = pick(a.output.out.clone(), &cfg.out, PathBuf::from("."));
    let run_id = pick(a.output.run_id.clone(), &cfg.run_id, "run".to_string());
    config::check_run_id(&run_id)?;
    let (coeffs, which): (GeneratorCoeffs, &str) = match a.which {
        Which::Even => (even, "even"),
        Which::Odd => (odd, "odd"),
    };
    let target = floquet_gate(g, &coeffs).matrix;

    let (circuit, tol, method) = if a.table1 {
        if gens != GensValue::Preset("paper".into()) {
            return Err(CliError::Config("--table1 holds parameters for the paper generators only".into()));
        }
        if g.im != 0.0 || !TABLE1_G.iter().any(|&x| (x - g.re).abs() < 1e-9) {
            return Err(CliError::Config(format!("no tabulated parameters at g = {g} (available: {TABLE1_G:?})")));
        }
        let rec = table1_fixture(g.re).map_err(native_error)?;
        if !rec.is_complete() {
            eprintln!("warning: a tabulated angle is missing and has been filled");
        }
        let rec = rec.filled();
        let p = match a.which {
            Which::Even => rec.even,
            Which::Odd => rec.odd,
        };
        (template_circuit(&p).map_err(native_error)?, TABLE1_TOL, "table")
    } else if coeffs.is_off_diagonal() {
        (decompose_restricted(g, &coeffs).map_err(native_error)?.circuit, RECONSTRUCTION_TOL, "restricted")
    } else {
        (decompose_general(&target).map_err(native_error)?, RECONSTRUCTION_TOL, "general")
    };

    let mut run = Run::start("compile", &out, verbose)?;
    let (text, ext) = emit(&circuit, a.emit);
    let stem = format!("{run_id}_{which}");
    run.write(&format!("{stem}.{ext}"), text.as_bytes())?;
    println!("zz_count = {}", circuit.entangling_count());

    let mut results = json!({
        "method": method,
        "which": which,
        "zz_count": circuit.entangling_count(),
        "gates": circuit.len(),
    });
    let mut failure = None;
    if a.verify {
        let d = circuit
            .unitary()
            .map_err(native_error)?
            .phase_distance(&target);
        println!("distance = {d:.3e} (tolerance {tol:.0e})");
        results["distance"] = json!(d);
        results["tolerance"] = json!(tol);
        if !(d <= tol) {
            failure = Some(format!("reconstruction distance {d:.3e} exceeds {tol:.0e}"));
        }
    }
    let echo = CliConfig {
        g: Some(GValue::from_c64(g)),
        gens: Some(gens),
        out: Some(out),
        run_id: Some(run_id),
        verbosity: Some(verbose),
        ..CliConfig::default()
    };
    let manifest = run.finish(&format!("{stem}_compile"), serde_json::to_value(&echo).expect("config serialises"), results)?;
    println!("{}", manifest.display());
    match failure {
        Some(m) => Err(CliError::Verify(m)),
        None => Ok(()),
    }
}

pub fn run_prepare(a: &PrepareArgs, cfg: &CliConfig, verbose: u8) -> CliResult<()> {
    let verbose = verbose.max(cfg.verbosity.unwrap_or(0));
    let n = a
        .n
        .or(cfg.n)
        .ok_or_else(|| CliError::Config("--n is required".into()))?;
    if n < 2 {
        return Err(CliError::Config(format!("n must be at least 2, got {n}")));
    }
    if !a.phi.is_finite() {
        return Err(CliError::Config("phi must be finite".into()));
    }
    let out: PathBuf = pick(a.output.out.clone(), &cfg.out, PathBuf::from("."));
    let run_id = pick(a.output.run_id.clone(), &cfg.run_id, "run".to_string());
    config::check_run_id(&run_id)?;
    let target = aqmbs_state(a.k, a.phi, n).map_err(|e| CliError::Config(e.to_string()))?;

    let (circuit, floor) = if a.fixture {
        if ![8, 12, 16, 20].contains(&n) {
            return Err(CliError::Config(format!("published protocols exist for N = 8, 12, 16, 20 only, got {n}")));
        }
        if a.k != 1 || a.phi != 0.0 {
            return Err(CliError::Config("published protocols prepare k = 1, phi = 0 only".into()));
        }
        (sm_prep_circuit(n, PrepConvention::RESOLVED).map_err(native_error)?, FIXTURE_FIDELITY)
    } else {
        (synthesize_state_prep(&target).map_err(native_error)?, 1.0 - PREP_TOL)
    };

    let mut run = Run::start("prepare", &out, verbose)?;
    let (text, ext) = emit(&circuit, a.emit);
    let stem = format!("{run_id}_prep_{n}_k{}", a.k);
    run.write(&format!("{stem}.{ext}"), text.as_bytes())?;
    println!("entangling_count = {}", circuit.entangling_count());
    println!("entangling_depth = {}", circuit.entangling_depth());
    let mut results = json!({
        "fixture": a.fixture,
        "entangling_count": circuit.entangling_count(),
        "entangling_depth": circuit.entangling_depth(),
    });
    let mut failure = None;
    if a.verify {
        let sector = single_excitation_output(&circuit).map_err(native_error)?;
        let mut fidelity = target.inner(&sector).norm_sqr();
        results["fidelity_sector"] = json!(fidelity);
        if n <= FULL_CHECK_MAX {
            let state: StateVector = circuit
                .lowered()
                .and_then(|c| c.run_from_zero())
                .map_err(native_error)?;
            let want = target.to_state_vector().map_err(|e| CliError::Config(e.to_string()))?;
            let full = want.fidelity(&state);
            results["fidelity_statevector"] = json!(full);
            fidelity = fidelity.min(full);
        }
        println!("fidelity = {fidelity:.15} (floor {floor})");
        results["fidelity"] = json!(fidelity);
        results["floor"] = json!(floor);
        if !(fidelity >= floor) {
            failure = Some(format!("preparation fidelity {fidelity} below {floor}"));
        }
    }
    let echo = CliConfig {
        n: Some(n),
        phi: Some(a.phi),
        out: Some(out),
        run_id: Some(run_id),
        verbosity: Some(verbose),
        ..CliConfig::default()
    };
    let manifest = run.finish(&format!("{stem}_prepare"), serde_json::to_value(&echo).expect("config serialises"), results)?;
    println!("{}", manifest.display());
    match failure {
        Some(m) => Err(CliError::Verify(m)),
        None => Ok(()),
    }
}
