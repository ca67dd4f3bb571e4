use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use accelerograph::ingest::FORMAT_VERSION;
use accelerograph::stats::{error_estimate, merge_confusion, run_evaluation, Confusion};
use accelerograph::{Error, ErrorEstimate, ErrorExperiment, Letter, PipelineConfig};
use rayon::prelude::*;
use serde::Serialize;

use super::classify::load_set;
use super::{emit, load_trace, to_json};
use crate::config::GlobalArgs;
use crate::error::{CliError, Code};

#[derive(Debug, Serialize)]
struct Report {
    format_version: u32,
    gamma: u64,
    n: u64,
    k: u64,
    alpha: f64,
    p_hat: f64,
    ci: [f64; 2],
    z: f64,
    degenerate: bool,
    confusion: Confusion,
    files: Vec<FileReport>,
    segmentation_failures: Vec<Failure>,
}

#[derive(Debug, Serialize)]
struct FileReport {
    file: String,
    truth: String,
    predicted: String,
    gamma: u64,
}

#[derive(Debug, Serialize)]
struct Failure {
    file: String,
    error: String,
}

impl Report {
    fn new(experiment: ErrorExperiment, estimate: ErrorEstimate) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            gamma: experiment.gamma,
            n: experiment.n,
            k: experiment.k,
            alpha: experiment.alpha,
            p_hat: estimate.p_hat,
            ci: [estimate.ci_low, estimate.ci_high],
            z: estimate.z,
            degenerate: estimate.is_degenerate(),
            confusion: Confusion::new(),
            files: Vec::new(),
            segmentation_failures: Vec::new(),
        }
    }
}

/// `gamma,n,k` as given on the command line.
fn parse_counts(s: &str) -> Result<(u64, u64, u64), CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::usage(format!("--counts expects gamma,n,k, got {s:?}"));
    match parts.as_slice() {
        [g, n, k] => Ok((
            g.parse().map_err(|_| bad())?,
            n.parse().map_err(|_| bad())?,
            k.parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

pub fn run_counts(counts: &str, config: &PipelineConfig, g: &GlobalArgs) -> Result<(), CliError> {
    let (gamma, n, k) = parse_counts(counts)?;
    let experiment = ErrorExperiment {
        k,
        n,
        gamma,
        alpha: config.alpha,
    };
    let estimate = error_estimate(&experiment)?;
    emit(g.out.as_deref(), &to_json(&Report::new(experiment, estimate))?)
}

/// Reads `file,LETTERS` lines; blank lines, `#` comments and a
/// `file,letters` header are skipped.
fn read_truth(path: &Path) -> Result<Vec<(String, Vec<Letter>)>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.eq_ignore_ascii_case("file,letters") {
            continue;
        }
        let bad = |what: &str| CliError::usage(format!("{}:{}: {what}", path.display(), lineno + 1));
        let (file, letters) = line.split_once(',').ok_or_else(|| bad("expected file,LETTERS"))?;
        let letters = Letter::parse_sequence(letters).map_err(|e| bad(&e.to_string()))?;
        if letters.is_empty() {
            return Err(bad("no letters"));
        }
        rows.push((file.trim().to_string(), letters));
    }
    if rows.is_empty() {
        return Err(CliError::usage(format!("{}: no entries", path.display())));
    }
    Ok(rows)
}

pub fn run(dir: &Path, truth: &Path, set_path: &Path, config: &PipelineConfig, g: &GlobalArgs) -> Result<(), CliError> {
    let set = load_set(set_path, config)?;
    let rows = read_truth(truth)?;
    let results: Vec<Result<_, CliError>> = rows
        .par_iter()
        .map(|(file, letters)| {
            let trace = load_trace(&dir.join(file), config)?;
            Ok(run_evaluation(&trace, letters, &set, config))
        })
        .collect();

    let mut parts = Vec::new();
    let mut confusion = Confusion::new();
    let mut files = Vec::new();
    let mut failures = Vec::new();
    for ((file, letters), result) in rows.iter().zip(results) {
        match result? {
            Ok(ev) => {
                if g.verbose && ev.experiment.gamma > 0 {
                    eprintln!("{file}: {} misread", ev.experiment.gamma);
                }
                merge_confusion(&mut confusion, &ev.confusion);
                files.push(FileReport {
                    file: file.clone(),
                    truth: letters.iter().map(|l| l.as_char()).collect(),
                    predicted: ev.predicted.iter().collect(),
                    gamma: ev.experiment.gamma,
                });
                parts.push(ev.experiment);
            }
            Err(e @ (Error::SegmentationMismatch { .. } | Error::NoJerksDetected | Error::TooShort { .. })) => {
                eprintln!("excluded {file}: {e}");
                failures.push(Failure {
                    file: file.clone(),
                    error: e.to_string(),
                });
            }
            Err(e) => return Err(CliError::from(e).context(file)),
        }
    }
    if parts.is_empty() {
        return Err(CliError::new(Code::Segmentation, "no test file segmented into its expected letters"));
    }
    let experiment = ErrorExperiment::pool(&parts, config.alpha);
    let estimate = error_estimate(&experiment)?;
    let mut report = Report::new(experiment, estimate);
    report.confusion = confusion;
    report.files = files;
    report.segmentation_failures = failures;
    if g.verbose {
        let per_letter: BTreeMap<char, u64> = report
            .confusion
            .iter()
            .map(|(t, row)| (*t, row.iter().filter(|(p, _)| *p != t).map(|(_, c)| c).sum()))
            .filter(|(_, c)| *c > 0)
            .collect();
        eprintln!("misreads by letter: {per_letter:?}");
    }
    emit(g.out.as_deref(), &to_json(&report)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_parse() {
        assert_eq!(parse_counts("4,5,30").unwrap(), (4, 5, 30));
        assert_eq!(parse_counts(" 4, 5 ,30").unwrap(), (4, 5, 30));
        assert!(parse_counts("4,5").is_err());
        assert!(parse_counts("a,5,30").is_err());
    }
}
