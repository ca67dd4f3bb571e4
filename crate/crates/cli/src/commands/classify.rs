use std::path::Path;

use accelerograph::ingest::load_training_set;
use accelerograph::pipeline::recognize;
use accelerograph::stats::UNKNOWN;
use accelerograph::{PipelineConfig, TrainingSet};

use super::{emit, load_trace};
use crate::config::GlobalArgs;
use crate::error::{CliError, Code};

/// Loads a training set usable with `config`; every failure is a training error.
pub fn load_set(path: &Path, config: &PipelineConfig) -> Result<TrainingSet, CliError> {
    let training = |e: accelerograph::Error| CliError::new(Code::Training, format!("{}: {e}", path.display()));
    let set = load_training_set(path).map_err(|e| match e {
        accelerograph::Error::Io { .. } => CliError::from(e),
        e => training(e),
    })?;
    if set.is_empty() {
        return Err(CliError::new(Code::Training, format!("{}: training set is empty", path.display())));
    }
    config.check_compatible(set.meta()).map_err(training)?;
    Ok(set)
}

pub fn run(input: &Path, set_path: &Path, config: &PipelineConfig, g: &GlobalArgs) -> Result<(), CliError> {
    let set = load_set(set_path, config)?;
    let trace = load_trace(input, config)?;
    let rec = recognize(&trace, &set, config).map_err(|e| CliError::from(e).context(input.display()))?;
    if g.verbose {
        for (i, (seg, outcome)) in rec.segmentation.segments.iter().zip(&rec.outcomes).enumerate() {
            let head = format!("segment {i} [{}..={}]", seg.start, seg.end);
            match (&outcome.curve, &outcome.classification) {
                (Err(e), _) => eprintln!("{head}: {e}"),
                (Ok(c), Some(Err(e))) => eprintln!("{head}: pve {:.4} axis {}: {e}", c.pve, c.axis_class),
                (Ok(c), Some(Ok(r))) => {
                    let runner = r
                        .runner_up
                        .map(|(l, d)| format!("{l} {:.4}", d.value()))
                        .unwrap_or_else(|| "none".into());
                    eprintln!(
                        "{head}: pve {:.4} axis {} letter {} distance {:.4} runner-up {runner}",
                        c.pve,
                        c.axis_class,
                        r.letter,
                        r.distance.value()
                    );
                }
                (Ok(_), None) => unreachable!("curves are always classified"),
            }
        }
    }
    let text = rec.text();
    emit(g.out.as_deref(), &format!("{text}\n"))?;
    let unknown = text.chars().filter(|&c| c == UNKNOWN).count();
    if unknown > 0 {
        return Err(CliError::new(
            Code::Classification,
            format!("{unknown} of {} segments could not be classified", text.chars().count()),
        ));
    }
    Ok(())
}
