use std::fs;
use std::path::PathBuf;

use accelerograph::ingest::Column;
use accelerograph::PipelineConfig;
use clap::Args;

use crate::error::{CliError, Code};

/// Flags shared by every subcommand. Precedence: built-in defaults, then
/// the `--config` file, then these flags.
#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON file with any subset of the pipeline configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Moving-variance window, in samples.
    #[arg(long, global = true)]
    pub window: Option<usize>,
    /// Smoothing parameter of the per-axis splines.
    #[arg(long, global = true)]
    pub spar: Option<f64>,
    /// PVE at or below which a curve counts as using both axes.
    #[arg(long, global = true)]
    pub pve_cutoff: Option<f64>,
    /// Also write an SVG plot next to the output.
    #[arg(long, global = true)]
    pub plot: bool,
    /// Per-item diagnostics on standard error.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    /// Output file, or directory for `synth --corpus`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// CSV time column, by header name or 0-based index.
    #[arg(long, global = true, value_name = "COLUMN")]
    pub time_col: Option<String>,
    #[arg(long, global = true, value_name = "COLUMN")]
    pub x_col: Option<String>,
    #[arg(long, global = true, value_name = "COLUMN")]
    pub y_col: Option<String>,
    #[arg(long, global = true, value_name = "COLUMN")]
    pub z_col: Option<String>,
}

impl GlobalArgs {
    pub fn pipeline_config(&self) -> Result<PipelineConfig, CliError> {
        let mut config = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::new(Code::Usage, format!("{}: {e}", path.display())))?
            }
            None => PipelineConfig::default(),
        };
        if let Some(seed) = self.seed {
            config.synth.seed = seed;
        }
        if let Some(w) = self.window {
            config.window = w;
        }
        if let Some(s) = self.spar {
            config.spar = s;
        }
        if let Some(p) = self.pve_cutoff {
            config.pve_cutoff = p;
        }
        for (flag, column) in [
            (&self.time_col, &mut config.io.time),
            (&self.x_col, &mut config.io.x),
            (&self.y_col, &mut config.io.y),
            (&self.z_col, &mut config.io.z),
        ] {
            if let Some(c) = flag {
                *column = Column::parse(c);
            }
        }
        config.validate()?;
        Ok(config)
    }
}
