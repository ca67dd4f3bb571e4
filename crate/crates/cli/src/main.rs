//! `accelerograph`: segment, train, classify and evaluate accelerometer
//! gesture recordings, generate synthetic ones, and plot the artifacts.

mod commands;
mod config;
mod error;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::GlobalArgs;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "accelerograph", version, about = "Gesture typing from 3-axis accelerometer recordings")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split a recording into letter segments at the jerks.
    Segment(SegmentArgs),
    /// Build a training set from a directory of `<LETTER>_<id>.csv` recordings.
    Train(TrainArgs),
    /// Read the letters of a recording.
    Classify(ClassifyArgs),
    /// Estimate the misclassification rate and its confidence interval.
    Evaluate(EvaluateArgs),
    /// Generate a synthetic recording with its ground truth.
    Synth(SynthArgs),
    /// Draw SVG plots of a segments or training-set file.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
struct SegmentArgs {
    /// Recording in CSV form.
    input: PathBuf,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Directory of single-letter recordings.
    dir: PathBuf,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    input: PathBuf,
    training_set: PathBuf,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Directory holding the test recordings.
    test_dir: Option<PathBuf>,
    /// Lines of `file,LETTERS`; relative names resolve against the test directory.
    #[arg(long, requires = "test_dir")]
    truth: Option<PathBuf>,
    #[arg(long, requires = "test_dir")]
    training_set: Option<PathBuf>,
    /// Skip the recordings and report on given counts `gamma,n,k`.
    #[arg(long, conflicts_with_all = ["test_dir", "truth", "training_set"])]
    counts: Option<String>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Letters to write, e.g. `CAB`.
    letters: Option<String>,
    /// Draw this many letters from the English letter frequencies.
    #[arg(long, conflicts_with = "letters")]
    random: Option<usize>,
    /// Write a training corpus of this many recordings per letter into the `--out` directory.
    #[arg(long, conflicts_with_all = ["letters", "random"])]
    corpus: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    /// Moving variance with the three cutoffs.
    Variance,
    /// Scaled (x, y) trajectories.
    Xy,
    /// Per-axis acceleration against time.
    Axes,
    /// Template distance matrices, one per axis class.
    Heatmap,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// A segments file from `segment` or a training set from `train`.
    input: PathBuf,
    #[arg(long, value_enum)]
    kind: PlotKind,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = cli.global.pipeline_config()?;
    let g = &cli.global;
    match cli.command {
        Command::Segment(a) => commands::segment::run(&a.input, &config, g),
        Command::Train(a) => commands::train::run(&a.dir, &config, g),
        Command::Classify(a) => commands::classify::run(&a.input, &a.training_set, &config, g),
        Command::Evaluate(a) => match (a.counts, a.test_dir, a.truth, a.training_set) {
            (Some(counts), ..) => commands::evaluate::run_counts(&counts, &config, g),
            (None, Some(dir), Some(truth), Some(set)) => commands::evaluate::run(&dir, &truth, &set, &config, g),
            _ => Err(CliError::usage("evaluate needs either --counts or TEST_DIR --truth FILE --training-set FILE")),
        },
        Command::Synth(a) => match (a.letters, a.random, a.corpus) {
            (_, _, Some(n)) => commands::synth::run_corpus(n, &config, g),
            (Some(letters), None, None) => commands::synth::run_letters(&letters, &config, g),
            (None, Some(k), None) => commands::synth::run_random(k, &config, g),
            _ => Err(CliError::usage("synth needs LETTERS, --random K or --corpus N")),
        },
        Command::Plot(a) => commands::plot::run(&a.input, a.kind, g),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("accelerograph: {}", e.message);
            ExitCode::from(e.code.as_u8())
        }
    }
}
