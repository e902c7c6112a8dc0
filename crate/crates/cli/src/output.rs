//! Output directory handling. Data files never contain timestamps; the
//! wall-clock time of a run lives only in the `run.json` sidecar.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::CliError;
use crate::scenario::Scenario;

pub const SIDECAR: &str = "run.json";
pub const SCENARIO_ECHO: &str = "scenario.json";

pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Sidecar<'a> {
    command: &'a str,
    scenario: &'a str,
    tool_version: &'a str,
    finished_unix_seconds: u64,
    files: &'a [String],
}

impl OutputDir {
    /// Create `root` if needed and make sure files can be written there.
    pub fn prepare(root: &Path) -> Result<Self, CliError> {
        let unwritable = |e: std::io::Error| CliError::Config(format!("output directory {}: {e}", root.display()));
        fs::create_dir_all(root).map_err(unwritable)?;
        let probe = root.join(".write-probe");
        File::create(&probe).map_err(unwritable)?;
        fs::remove_file(&probe).map_err(unwritable)?;
        Ok(OutputDir { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn create(&mut self, name: &str) -> Result<BufWriter<File>, CliError> {
        let file = File::create(self.root.join(name))?;
        self.written.push(name.to_string());
        Ok(BufWriter::new(file))
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    /// Echo the scenario (so re-running it reproduces the outputs) and
    /// write the sidecar.
    pub fn finish(mut self, command: &str, scenario: &Scenario) -> Result<Vec<String>, CliError> {
        self.json(SCENARIO_ECHO, scenario)?;
        let finished = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let sidecar = Sidecar {
            command,
            scenario: &scenario.name,
            tool_version: env!("CARGO_PKG_VERSION"),
            finished_unix_seconds: finished,
            files: &self.written,
        };
        let mut w = BufWriter::new(File::create(self.root.join(SIDECAR))?);
        serde_json::to_writer_pretty(&mut w, &sidecar)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(self.written)
    }
}
