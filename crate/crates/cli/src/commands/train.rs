use std::fs;
use std::path::{Path, PathBuf};

use accelerograph::ingest::save_training_set;
use accelerograph::pipeline::{assemble_training_set, template_from_trace};
use accelerograph::{Letter, PipelineConfig, TrainingTemplate};
use rayon::prelude::*;

use super::load_trace;
use crate::config::GlobalArgs;
use crate::error::{CliError, Code};

const DEFAULT_OUT: &str = "trainingset.json";

/// Splits `B_7.csv` into `('B', "7")`.
fn parse_name(path: &Path) -> Option<(Letter, String)> {
    if path.extension()? != "csv" {
        return None;
    }
    let stem = path.file_stem()?.to_str()?;
    let (letter, id) = stem.split_once('_')?;
    let mut chars = letter.chars();
    let c = chars.next()?;
    if chars.next().is_some() || id.is_empty() {
        return None;
    }
    Some((Letter::new(c).ok()?, id.to_string()))
}

pub fn labelled_files(dir: &Path) -> Result<Vec<(PathBuf, Letter, String)>, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        if let Some((letter, id)) = parse_name(&path) {
            files.push((path, letter, id));
        }
    }
    files.sort();
    Ok(files)
}

pub fn run(dir: &Path, config: &PipelineConfig, g: &GlobalArgs) -> Result<(), CliError> {
    let files = labelled_files(dir)?;
    let results: Vec<Result<TrainingTemplate, CliError>> = files
        .par_iter()
        .map(|(path, letter, id)| {
            let trace = load_trace(path, config)?;
            template_from_trace(*letter, id, &trace, config).map_err(|e| CliError::from(e).context(path.display()))
        })
        .collect();
    let mut templates = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(t) => templates.push(t),
            Err(e) => eprintln!("skipped {}", e.message),
        }
    }
    let usable = templates.len();
    let (set, conflicts) = assemble_training_set(templates, config)?;
    for c in &conflicts {
        eprintln!(
            "dropped {}_{}: routed to {} but letter {} is {}",
            c.letter, c.source_id, c.detected, c.letter, c.majority
        );
    }
    if set.is_empty() {
        return Err(CliError::new(
            Code::Training,
            format!("{}: no usable training files", dir.display()),
        ));
    }
    if g.verbose {
        eprintln!("{} templates from {} files ({usable} segmented)", set.len(), files.len());
    }
    let out = g.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    save_training_set(&set, &out)?;
    Ok(())
}
