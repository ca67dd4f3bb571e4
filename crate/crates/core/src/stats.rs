//! Expected gesture count and the misclassification-rate interval.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::TrainingSet;
use crate::model::{mean_gesture_length, Letter, Trace};
use crate::pipeline::{recognize, PipelineConfig};

/// Expected number of gestures (primitives plus jerks) to type `text_length`
/// letters: one jerk after every letter and one before the first.
pub fn expected_gestures(text_length: f64) -> f64 {
    (mean_gesture_length() + 1.0) * text_length + 1.0
}

/// Standard normal quantile, Acklam's rational approximation (relative error
/// below 1.2e-9 over (0, 1)).
pub fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let tail = |q: f64| {
        let q = (-2.0 * q.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < P_LOW {
        tail(p)
    } else if p > 1.0 - P_LOW {
        -tail(1.0 - p)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// `k` letters each produced `n` times, with `gamma` misclassifications in total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorExperiment {
    pub k: u64,
    pub n: u64,
    pub gamma: u64,
    pub alpha: f64,
}

impl ErrorExperiment {
    pub fn trials(&self) -> u64 {
        self.n * self.k
    }

    /// Pools several experiments: when all share the same `n` the letter
    /// counts add up, otherwise every letter counts as its own draw (`n = 1`).
    pub fn pool(parts: &[ErrorExperiment], alpha: f64) -> ErrorExperiment {
        let gamma = parts.iter().map(|p| p.gamma).sum();
        let same_n = parts.windows(2).all(|w| w[0].n == w[1].n);
        match parts.first() {
            Some(first) if same_n => ErrorExperiment {
                k: parts.iter().map(|p| p.k).sum(),
                n: first.n,
                gamma,
                alpha,
            },
            _ => ErrorExperiment {
                k: parts.iter().map(ErrorExperiment::trials).sum(),
                n: 1,
                gamma,
                alpha,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub z: f64,
}

impl ErrorEstimate {
    /// Zero-width interval, which the Wald form gives at `p̂ ∈ {0, 1}`.
    pub fn is_degenerate(&self) -> bool {
        self.ci_low == self.ci_high
    }
}

/// Point estimate `γ / nk` and the Wald interval, clamped to `[0, 1]`.
pub fn error_estimate(experiment: &ErrorExperiment) -> Result<ErrorEstimate> {
    let trials = experiment.trials();
    if trials == 0 {
        return Err(Error::EmptyExperiment);
    }
    if experiment.gamma > trials {
        return Err(Error::Config(format!(
            "gamma {} exceeds n * k = {trials}",
            experiment.gamma
        )));
    }
    if !(experiment.alpha > 0.0 && experiment.alpha < 1.0) {
        return Err(Error::Config(format!(
            "alpha {} outside (0, 1)",
            experiment.alpha
        )));
    }
    let nk = trials as f64;
    let p_hat = experiment.gamma as f64 / nk;
    let z = normal_quantile(1.0 - experiment.alpha / 2.0);
    let half = z * (p_hat * (1.0 - p_hat) / nk).sqrt();
    Ok(ErrorEstimate {
        p_hat,
        ci_low: (p_hat - half).clamp(0.0, 1.0),
        ci_high: (p_hat + half).clamp(0.0, 1.0),
        z,
    })
}

/// Predicted symbol for a segment; `'?'` when no letter could be assigned.
pub const UNKNOWN: char = '?';

/// `confusion[truth][predicted]` counts.
pub type Confusion = BTreeMap<char, BTreeMap<char, u64>>;

pub fn merge_confusion(into: &mut Confusion, from: &Confusion) {
    for (truth, row) in from {
        let dst = into.entry(*truth).or_default();
        for (pred, c) in row {
            *dst.entry(*pred).or_default() += c;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamEvaluation {
    pub experiment: ErrorExperiment,
    pub predicted: Vec<char>,
    pub confusion: Confusion,
}

/// Scores one recording against its ground truth. The stream counts as
/// `k = 1` letter repeated `n = |truth|` times.
pub fn run_evaluation(
    test_stream: &Trace,
    ground_truth: &[Letter],
    training_set: &TrainingSet,
    config: &PipelineConfig,
) -> Result<StreamEvaluation> {
    let recognition = recognize(test_stream, training_set, config)?;
    let predicted = recognition.letters();
    if predicted.len() != ground_truth.len() {
        return Err(Error::SegmentationMismatch {
            expected: ground_truth.len(),
            found: predicted.len(),
        });
    }
    Ok(score(ground_truth, &predicted, config.alpha))
}

/// Compares aligned truth and predictions.
pub fn score(ground_truth: &[Letter], predicted: &[char], alpha: f64) -> StreamEvaluation {
    let mut confusion = Confusion::new();
    let mut gamma = 0;
    for (t, &p) in ground_truth.iter().zip(predicted) {
        if t.as_char() != p {
            gamma += 1;
        }
        *confusion.entry(t.as_char()).or_default().entry(p).or_default() += 1;
    }
    StreamEvaluation {
        experiment: ErrorExperiment {
            k: 1,
            n: ground_truth.len() as u64,
            gamma,
            alpha,
        },
        predicted: predicted.to_vec(),
        confusion,
    }
}
