use std::path::{Path, PathBuf};

use accelerograph::ingest::write_csv;
use accelerograph::synth::Generator;
use accelerograph::{Letter, PipelineConfig};
use rayon::prelude::*;

use super::{sibling, write_file};
use crate::config::GlobalArgs;
use crate::error::CliError;

const DEFAULT_OUT: &str = "synth.csv";
const DEFAULT_CORPUS_DIR: &str = "corpus";

fn write_stream(letters: &[Letter], gen: &mut Generator, g: &GlobalArgs) -> Result<(), CliError> {
    let (trace, truth) = gen.stream(letters)?;
    let out = g.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    write_file(&out, &write_csv(&trace))?;
    let name = out.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let text: String = truth.letters.iter().map(|l| l.as_char()).collect();
    write_file(&sibling(&out, ".truth.csv"), &format!("{name},{text}\n"))?;
    if g.verbose {
        for (l, (a, b)) in truth.letters.iter().zip(&truth.spans) {
            eprintln!("{l}: samples {a}..={b}");
        }
    }
    Ok(())
}

pub fn run_letters(letters: &str, config: &PipelineConfig, g: &GlobalArgs) -> Result<(), CliError> {
    let letters = Letter::parse_sequence(&letters.to_ascii_uppercase())?;
    if letters.is_empty() {
        return Err(CliError::usage("no letters given"));
    }
    write_stream(&letters, &mut Generator::new(config.synth.clone()), g)
}

pub fn run_random(k: usize, config: &PipelineConfig, g: &GlobalArgs) -> Result<(), CliError> {
    if k == 0 {
        return Err(CliError::usage("--random needs at least one letter"));
    }
    let mut gen = Generator::new(config.synth.clone());
    let letters = gen.random_letters(k);
    write_stream(&letters, &mut gen, g)
}

/// Seed of the `r`-th recording of `letter` in a corpus.
pub fn corpus_seed(base: u64, letter: Letter, r: usize) -> u64 {
    base.wrapping_add((r * 26 + letter.index()) as u64)
}

/// `n` single-letter recordings per letter, named `<LETTER>_<r>.csv`.
pub fn run_corpus(n: usize, config: &PipelineConfig, g: &GlobalArgs) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::usage("--corpus needs at least one recording per letter"));
    }
    let dir = g.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_CORPUS_DIR));
    let jobs: Vec<(Letter, usize)> = Letter::all().flat_map(|l| (0..n).map(move |r| (l, r))).collect();
    jobs.par_iter().try_for_each(|&(letter, r)| {
        let cfg = config.synth.clone().with_seed(corpus_seed(config.synth.seed, letter, r));
        let (trace, _) = Generator::new(cfg).stream(&[letter])?;
        write_file(&file_in(&dir, letter, r), &write_csv(&trace))
    })?;
    if g.verbose {
        eprintln!("wrote {} recordings to {}", jobs.len(), dir.display());
    }
    Ok(())
}

fn file_in(dir: &Path, letter: Letter, r: usize) -> PathBuf {
    dir.join(format!("{letter}_{r}.csv"))
}
