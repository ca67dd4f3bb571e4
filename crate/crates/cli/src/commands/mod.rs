pub mod classify;
pub mod evaluate;
pub mod plot;
pub mod segment;
pub mod synth;
pub mod train;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use accelerograph::ingest::{normalize_trace, read_trace};
use accelerograph::{PipelineConfig, Trace};
use serde::Serialize;

use crate::error::CliError;

/// Reads a CSV recording and puts it on a uniform time grid.
pub fn load_trace(path: &Path, config: &PipelineConfig) -> Result<Trace, CliError> {
    let trace = read_trace(path, &config.io).map_err(|e| CliError::from(e).context(path.display()))?;
    normalize_trace(&trace).map_err(|e| CliError::from(e).context(path.display()))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::from(accelerograph::Error::from(e)))?;
    text.push('\n');
    Ok(text)
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Writes to `out`, or to standard output when no path is given.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

/// `dir/stem{suffix}` for the file name of `path` without its extension.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}
