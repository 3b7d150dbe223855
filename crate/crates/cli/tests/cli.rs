use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use scarlab_core::nativec::{parse_qasm, Circuit};
use scarlab_core::pvbs::{floquet_gate, GeneratorCoeffs};
use scarlab_core::scars::imbalance_expectation;
use scarlab_core::C64;
use serde_json::Value;

fn scarlab(dir: &Path, args: &[&str]) -> Output {
    scarlab_env(dir, args, &[])
}

fn scarlab_env(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_scarlab"));
    cmd.current_dir(dir).args(args).env_remove("SCARLAB_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// Value printed as `key = <number> ...` on stdout.
fn reported(stdout: &str, key: &str) -> f64 {
    let line = stdout
        .lines()
        .find(|l| l.starts_with(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("`{key}` missing from:\n{stdout}"));
    line[key.len() + 3..].split_whitespace().next().unwrap().parse().unwrap()
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn read(path: &Path) -> Self {
        let text = fs::read_to_string(path).unwrap();
        let mut lines = text.lines();
        let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_string).collect();
        let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
        Self { header, rows }
    }

    fn column(&self, name: &str) -> Vec<f64> {
        let k = self.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[k].parse().unwrap()).collect()
    }
}

/// Schema check for every file a command leaves in `dir`.
fn check_outputs(dir: &Path) {
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        seen += 1;
        match ext {
            "csv" => {
                let t = Table::read(&path);
                assert!(!t.rows.is_empty(), "{name}: no rows");
                for (i, row) in t.rows.iter().enumerate() {
                    assert_eq!(row.len(), t.header.len(), "{name} row {i}");
                    for (h, cell) in t.header.iter().zip(row) {
                        match h.as_str() {
                            "sector" => assert!(["even", "odd", "none"].contains(&cell.as_str()), "{name}: {cell}"),
                            "entanglement" if cell.is_empty() => {}
                            _ => {
                                cell.parse::<f64>().unwrap_or_else(|_| panic!("{name}: `{cell}` in {h}"));
                            }
                        }
                    }
                }
                if name.contains("_spectrum") {
                    assert_eq!(t.header, ["index", "value", "sector", "entanglement", "cluster"]);
                } else if name.contains("_sweep_") {
                    assert_eq!(t.header.len(), 2);
                    assert_eq!(t.header[0], "g");
                } else {
                    assert_eq!(t.header[0], "t");
                }
            }
            "json" => {
                let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
                if name.ends_with(".manifest.json") {
                    for key in ["command", "argv", "config", "version", "wall_time_s", "threads", "outputs", "results"] {
                        assert!(v.get(key).is_some(), "{name}: missing {key}");
                    }
                    for out in v["outputs"].as_array().unwrap() {
                        assert!(dir.join(out.as_str().unwrap()).is_file(), "{name}: {out} missing");
                    }
                } else if v.get("gates").is_some() {
                    Circuit::from_json(&v).unwrap();
                }
            }
            "qasm" => {
                parse_qasm(&fs::read_to_string(&path).unwrap()).unwrap();
            }
            other => panic!("unexpected output {name} ({other})"),
        }
    }
    assert!(seen > 0, "no outputs");
}

#[test]
fn evolve_row_count_and_schema() {
    let d = tempfile::tempdir().unwrap();
    ok(&scarlab(d.path(), &["evolve", "--n", "12", "--g", "1", "--steps", "10", "--init", "a1", "--gens", "paper"]));
    let t = Table::read(&d.path().join("run_12_1.csv"));
    assert_eq!(t.rows.len(), 11);
    assert_eq!(t.column("t"), (0..=10).map(f64::from).collect::<Vec<_>>());
    check_outputs(d.path());
}

#[test]
fn evolve_vacuum_constant() {
    let d = tempfile::tempdir().unwrap();
    ok(&scarlab(d.path(), &["evolve", "--n", "8", "--init", "vacuum", "--steps", "10"]));
    let m = Table::read(&d.path().join("run_8_1.csv")).column("m_total");
    assert_eq!(m.len(), 11);
    assert!(m.iter().all(|&x| (x - 8.0).abs() < 1e-12), "{m:?}");
    check_outputs(d.path());
}

#[test]
fn evolve_site_profile_shape() {
    let d = tempfile::tempdir().unwrap();
    ok(&scarlab(d.path(), &["evolve", "--n", "20", "--g", "2", "--init", "left", "--steps", "10", "--observables", "m_total"]));
    let t = Table::read(&d.path().join("run_20_2_sites.csv"));
    // one row per period t = 0..=10, one column per site after `t`
    assert_eq!(t.rows.len(), 11);
    assert_eq!(t.header.len(), 21);
    let z0 = t.column("z_0");
    assert_eq!(z0[0], -1.0);
    check_outputs(d.path());
}

#[test]
fn evolve_errors() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&scarlab(d.path(), &["evolve", "--n", "30"])), 3);
    assert_eq!(code(&scarlab(d.path(), &["evolve", "--n", "7"])), 2);
    assert_eq!(code(&scarlab(d.path(), &["evolve", "--n", "8", "--g", "0"])), 2);
    assert_eq!(code(&scarlab(d.path(), &["evolve", "--n", "8", "--init", "sideways"])), 2);
    assert_eq!(code(&scarlab(d.path(), &["evolve", "--n", "8", "--noise", "0.1,0.1,0.9"])), 2);
    assert_eq!(code(&scarlab(d.path(), &["evolve", "--n", "8", "--noise", "device", "--shots", "0"])), 2);
    assert_eq!(code(&scarlab(d.path(), &["evolve", "--n", "8", "--observables", "spin"])), 2);
    assert_eq!(code(&scarlab(d.path(), &["evolve", "--n", "8", "--run-id", "a/b"])), 2);
    assert_eq!(code(&scarlab_env(d.path(), &["evolve", "--n", "8"], &[("SCARLAB_THREADS", "zero")])), 2);
    let cfg = d.path().join("bad.json");
    fs::write(&cfg, r#"{"n": 8, "colour": "red"}"#).unwrap();
    let out = scarlab(d.path(), &["--config", cfg.to_str().unwrap(), "evolve"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
    // nothing is written by a rejected run
    assert!(fs::read_dir(d.path()).unwrap().all(|e| e.unwrap().path().extension().unwrap() == "json"));
}

#[test]
fn config_file_and_flag_precedence() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("c.json");
    fs::write(&cfg, r#"{"n": 8, "g": [1.0, 0.0], "steps": 3, "init": "ones", "run_id": "cfg", "gens": {"even": {"a": 0, "b": 0, "c": [1, -2]}, "odd": {"a": 0, "b": 0, "c": [3, -1.5707963267948966]}}}"#).unwrap();
    ok(&scarlab(d.path(), &["--config", cfg.to_str().unwrap(), "evolve", "--steps", "5"]));
    let t = Table::read(&d.path().join("cfg_8_1.csv"));
    assert_eq!(t.rows.len(), 6);
    // explicit generators equal to the paper preset give the same numbers
    ok(&scarlab(d.path(), &["evolve", "--n", "8", "--steps", "5", "--init", "ones", "--run-id", "flag"]));
    let a = fs::read_to_string(d.path().join("cfg_8_1.csv")).unwrap();
    let b = fs::read_to_string(d.path().join("flag_8_1.csv")).unwrap();
    assert_eq!(a, b);
}

fn rerun_from_manifest(manifest: &Path, dir: &Path, env: &[(&str, &str)]) {
    let v: Value = serde_json::from_str(&fs::read_to_string(manifest).unwrap()).unwrap();
    let mut config = v["config"].clone();
    config["out"] = Value::String(dir.to_str().unwrap().into());
    let path = dir.join("replay.json");
    fs::create_dir_all(dir).unwrap();
    fs::write(&path, config.to_string()).unwrap();
    ok(&scarlab_env(dir, &["--config", path.to_str().unwrap(), v["command"].as_str().unwrap()], env));
}

#[test]
fn manifest_replays_bit_identically_across_threads() {
    let d = tempfile::tempdir().unwrap();
    let args = [
        "evolve", "--n", "8", "--g", "1.5", "--init", "a1", "--steps", "4", "--shots", "64", "--noise", "device",
        "--seed", "17", "--observables", "m_total,fidelity,half_entropy,m_sites", "--run-id", "s",
    ];
    ok(&scarlab_env(d.path(), &args, &[("SCARLAB_THREADS", "1")]));
    let original = fs::read(d.path().join("s_8_1.5.csv")).unwrap();
    let original_json = fs::read(d.path().join("s_8_1.5.json")).unwrap();
    for threads in ["1", "8"] {
        let sub = d.path().join(format!("t{threads}"));
        rerun_from_manifest(&d.path().join("s_8_1.5.manifest.json"), &sub, &[("SCARLAB_THREADS", threads)]);
        assert_eq!(fs::read(sub.join("s_8_1.5.csv")).unwrap(), original, "threads {threads}");
        assert_eq!(fs::read(sub.join("s_8_1.5.json")).unwrap(), original_json);
        let m: Value = serde_json::from_str(&fs::read_to_string(sub.join("s_8_1.5.manifest.json")).unwrap()).unwrap();
        assert_eq!(m["threads"], threads.parse::<u64>().unwrap());
    }
    let t = Table::read(&d.path().join("s_8_1.5.csv"));
    assert!(t.header.contains(&"m_total_se".to_string()));
    fs::remove_dir_all(d.path().join("t1")).unwrap();
    fs::remove_dir_all(d.path().join("t8")).unwrap();
    check_outputs(d.path());
}

#[test]
fn spectrum_sector_stats() {
    let d = tempfile::tempdir().unwrap();
    let out = ok(&scarlab(d.path(), &["spectrum", "--n", "12", "--g", "1", "--gens", "smF-deg", "--stats"]));
    let stats: Value = serde_json::from_str(&fs::read_to_string(d.path().join("run_stats.json")).unwrap()).unwrap();
    assert_eq!(stats["sector_resolved"], true);
    let sectors = stats["sectors"].as_array().unwrap();
    assert_eq!(sectors.len(), 2);
    for s in sectors {
        let r = s["mean_r"].as_f64().unwrap();
        assert!((0.5..0.7).contains(&r), "{s}");
        assert_eq!(s["histogram"]["edges"].as_array().unwrap().len(), s["histogram"]["densities"].as_array().unwrap().len() + 1);
    }
    assert!(reported(&out, "mean_r[even]") > 0.0);
    let t = Table::read(&d.path().join("run_spectrum.csv"));
    assert_eq!(t.rows.len(), 4096);
    check_outputs(d.path());
}

#[test]
fn spectrum_zero_modes() {
    let d = tempfile::tempdir().unwrap();
    let out = ok(&scarlab(d.path(), &["spectrum", "--n", "12", "--g", "1", "--gens", "smH-zero", "--model", "hamiltonian", "--zero-modes"]));
    assert_eq!(reported(&out, "zero_modes"), 64.0);
    let stats: Value = serde_json::from_str(&fs::read_to_string(d.path().join("run_stats.json")).unwrap()).unwrap();
    assert_eq!(stats["zero_modes"], 64);
    check_outputs(d.path());
}

#[test]
fn spectrum_without_symmetry() {
    let d = tempfile::tempdir().unwrap();
    let out = scarlab(d.path(), &["spectrum", "--n", "8", "--g", "1.5", "--sector", "all", "--stats", "--entanglement"]);
    ok(&out);
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let stats: Value = serde_json::from_str(&fs::read_to_string(d.path().join("run_stats.json")).unwrap()).unwrap();
    assert_eq!(stats["sector_resolved"], false);
    assert_eq!(stats["sectors"][0]["sector"], "none");
    let t = Table::read(&d.path().join("run_spectrum.csv"));
    assert!(t.rows.iter().all(|r| r[2] == "none" && !r[3].is_empty()));
    check_outputs(d.path());

    let e = tempfile::tempdir().unwrap();
    let out = scarlab(e.path(), &["spectrum", "--n", "8", "--g", "1.5", "--sector", "even"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("symmetry"));
    assert_eq!(code(&scarlab(e.path(), &["spectrum", "--n", "14", "--g", "1"])), 3);
}

#[test]
fn compile_verifies() {
    let d = tempfile::tempdir().unwrap();
    let out = ok(&scarlab(d.path(), &["compile", "--g", "1.0", "--which", "even", "--verify"]));
    assert!(reported(&out, "distance") < 1e-9);
    assert_eq!(reported(&out, "zz_count"), 2.0);
    // independent replay of the emitted file
    let c = parse_qasm(&fs::read_to_string(d.path().join("run_even.qasm")).unwrap()).unwrap();
    let target = floquet_gate(C64::new(1.0, 0.0), &GeneratorCoeffs::paper_even()).matrix;
    assert!(c.unitary().unwrap().phase_distance(&target) < 1e-9);

    let out = ok(&scarlab(d.path(), &["compile", "--g", "2/3", "--which", "odd", "--emit", "json", "--verify", "--table1", "--run-id", "tab"]));
    assert!(reported(&out, "distance") < 5e-3);
    let v: Value = serde_json::from_str(&fs::read_to_string(d.path().join("tab_odd.json")).unwrap()).unwrap();
    let c = Circuit::from_json(&v).unwrap();
    let target = floquet_gate(C64::new(2.0 / 3.0, 0.0), &GeneratorCoeffs::paper_odd()).matrix;
    assert!(c.unitary().unwrap().phase_distance(&target) < 5e-3);

    let out = ok(&scarlab(d.path(), &["compile", "--g", "1.3", "--gens", "smF-nodeg", "--verify", "--run-id", "diag"]));
    assert!(reported(&out, "distance") < 1e-9);
    assert!(reported(&out, "zz_count") <= 3.0);
    check_outputs(d.path());

    assert_eq!(code(&scarlab(d.path(), &["compile", "--g", "1.2", "--table1"])), 2);
}

#[test]
fn prepare_verifies() {
    let d = tempfile::tempdir().unwrap();
    let out = ok(&scarlab(d.path(), &["prepare", "--n", "8", "--k", "1", "--verify"]));
    assert!(reported(&out, "fidelity") > 1.0 - 1e-10);
    assert!(reported(&out, "entangling_count") <= 7.0);
    assert!(reported(&out, "entangling_depth") <= 3.0);
    let out = ok(&scarlab(d.path(), &["prepare", "--n", "8", "--k", "1", "--fixture", "--verify", "--emit", "json", "--run-id", "fx"]));
    assert!(reported(&out, "fidelity") >= 0.999);
    check_outputs(d.path());
    assert_eq!(code(&scarlab(d.path(), &["prepare", "--n", "10", "--fixture"])), 2);
    assert_eq!(code(&scarlab(d.path(), &["prepare", "--n", "8", "--k", "8"])), 2);
}

#[test]
fn verify_suites() {
    let d = tempfile::tempdir().unwrap();
    for suite in ["scars", "closedforms", "symmetry", "east-west"] {
        let out = ok(&scarlab(d.path(), &["verify", "--suite", suite]));
        assert!(!out.contains("FAIL"), "{out}");
    }
    let out = ok(&scarlab(d.path(), &["verify", "--suite", "aqmbs", "--sizes", "8,12,16"]));
    assert!(out.contains("strictly decreasing"));
    // residuals grow when the sizes are listed backwards
    let out = scarlab(d.path(), &["verify", "--suite", "aqmbs", "--sizes", "16,12,8"]);
    assert_eq!(code(&out), 5);
    assert!(String::from_utf8_lossy(&out.stderr).contains("strictly decreasing"));
    assert_eq!(code(&scarlab(d.path(), &["verify", "--suite", "scars", "--sizes", "7"])), 2);
}

#[test]
fn sweeps() {
    let d = tempfile::tempdir().unwrap();
    ok(&scarlab(d.path(), &["sweep", "--param", "g", "--from", "0.25", "--to", "4", "--points", "64", "--n", "256", "--quantity", "gap"]));
    let t = Table::read(&d.path().join("run_sweep_gap.csv"));
    let (g, gap) = (t.column("g"), t.column("gap"));
    let argmin = (0..gap.len()).min_by(|&a, &b| gap[a].total_cmp(&gap[b])).unwrap();
    let nearest = (0..g.len()).min_by(|&a, &b| (g[a] - 1.0).abs().total_cmp(&(g[b] - 1.0).abs())).unwrap();
    assert_eq!(argmin, nearest);

    ok(&scarlab(d.path(), &["sweep", "--from", "0.3", "--to", "3", "--points", "40", "--n", "1024", "--quantity", "imbalance"]));
    let t = Table::read(&d.path().join("run_sweep_imbalance.csv"));
    for (g, v) in t.column("g").iter().zip(t.column("imbalance")) {
        let closed = imbalance_expectation(C64::new(*g, 0.0), 1024).unwrap();
        assert!((v - closed).abs() < 1e-12, "g = {g}: {v} vs {closed}");
    }

    ok(&scarlab(d.path(), &["sweep", "--from", "1.05", "--to", "3", "--points", "10", "--quantity", "xi"]));
    let xi = Table::read(&d.path().join("run_sweep_xi.csv")).column("xi");
    assert!(xi.iter().all(|x| x.is_finite() && *x > 0.0));
    ok(&scarlab(d.path(), &["sweep", "--from", "0.5", "--to", "2", "--points", "7", "--n", "64", "--quantity", "entropy"]));
    check_outputs(d.path());

    assert_eq!(code(&scarlab(d.path(), &["sweep", "--from", "2", "--to", "1", "--points", "5", "--quantity", "xi"])), 2);
    assert_eq!(code(&scarlab(d.path(), &["sweep", "--from", "0", "--to", "1", "--points", "1", "--quantity", "xi"])), 2);
}
