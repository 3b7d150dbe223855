//! Output directory handling, atomic writes and run manifests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};

use crate::{CliError, CliResult};

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Writes through a temporary file in the same directory and renames it into place,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(dir, e))?;
    tmp.write_all(contents).map_err(|e| io_err(path, e))?;
    tmp.as_file().sync_all().map_err(|e| io_err(path, e))?;
    tmp.persist(path).map_err(|e| io_err(path, e.error))?;
    Ok(())
}

/// Collects output files for one command and writes its manifest last.
pub struct Run {
    command: &'static str,
    dir: PathBuf,
    started: Instant,
    outputs: Vec<String>,
    verbose: u8,
}

impl Run {
    pub fn start(command: &'static str, dir: &Path, verbose: u8) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        Ok(Self {
            command,
            dir: dir.to_path_buf(),
            started: Instant::now(),
            outputs: Vec::new(),
            verbose,
        })
    }

    pub fn write(&mut self, name: &str, contents: &[u8]) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        write_atomic(&path, contents)?;
        if self.verbose > 0 {
            eprintln!("wrote {}", path.display());
        }
        self.outputs.push(name.to_string());
        Ok(path)
    }

    pub fn write_json(&mut self, name: &str, value: &Value) -> CliResult<PathBuf> {
        let mut text = serde_json::to_string_pretty(value).expect("JSON values serialise");
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// `<stem>.manifest.json` with the resolved configuration, which can be passed
    /// back through `--config` to repeat the run.
    pub fn finish(mut self, stem: &str, config: Value, extra: Value) -> CliResult<PathBuf> {
        let manifest = json!({
            "command": self.command,
            "argv": std::env::args().collect::<Vec<_>>(),
            "config": config,
            "version": env!("CARGO_PKG_VERSION"),
            "wall_time_s": self.started.elapsed().as_secs_f64(),
            "threads": rayon::current_num_threads(),
            "outputs": self.outputs,
            "results": extra,
        });
        let name = format!("{stem}.manifest.json");
        let path = self.write_json(&name, &manifest)?;
        Ok(path)
    }
}
