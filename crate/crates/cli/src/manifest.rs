use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Record written next to every output; `replay` re-runs it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Full argument list after the program name.
    pub args: Vec<String>,
    pub inputs: Vec<PathBuf>,
    pub output: Option<PathBuf>,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub wall_time_seconds: f64,
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
    }

    /// `<output>.manifest.json`, an explicit path, or stderr.
    pub fn emit(&self, explicit: Option<&Path>) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes") + "\n";
        let target = explicit.map(Path::to_path_buf).or_else(|| {
            self.output.as_ref().map(|o| {
                let mut name = o.as_os_str().to_owned();
                name.push(".manifest.json");
                PathBuf::from(name)
            })
        });
        match target {
            Some(path) => std::fs::write(&path, text).map_err(CliError::io(&path)),
            None => {
                eprint!("{text}");
                Ok(())
            }
        }
    }
}
