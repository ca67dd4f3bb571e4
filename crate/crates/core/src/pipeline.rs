//! End-to-end composition: trace → segments → curves → letters.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classify::{classify, ClassificationResult};
use crate::curve::{gesture_curve, GestureCurve, SmoothingConfig, DEFAULT_PVE_CUTOFF, DEFAULT_SPAR};
use crate::error::{Error, Result};
use crate::ingest::{ColumnMap, TrainingSet, TrainingSetMeta, TrainingTemplate, FORMAT_VERSION};
use crate::model::{AxisClass, Letter, Trace};
use crate::segment::{segment_trace, Segmentation, DEFAULT_WINDOW};
use crate::stats::UNKNOWN;
use crate::synth::SynthConfig;

/// Every tunable of the pipeline. Missing fields in a config file fall back
/// to the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub window: usize,
    pub spar: f64,
    /// Explicit smoothing penalty; overrides `spar` when set.
    pub lambda: Option<f64>,
    pub pve_cutoff: f64,
    pub alpha: f64,
    pub synth: SynthConfig,
    pub io: ColumnMap,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            window: DEFAULT_WINDOW,
            spar: DEFAULT_SPAR,
            lambda: None,
            pve_cutoff: DEFAULT_PVE_CUTOFF,
            alpha: 0.05,
            synth: SynthConfig::default(),
            io: ColumnMap::default(),
        }
    }
}

impl PipelineConfig {
    pub fn smoothing(&self) -> SmoothingConfig {
        SmoothingConfig {
            spar: self.spar,
            lambda: self.lambda,
            pve_cutoff: self.pve_cutoff,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::Config(format!("window {} must be at least 2", self.window)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha {} outside (0, 1)", self.alpha)));
        }
        self.smoothing().validate()?;
        self.synth.validate(self.window)
    }

    pub fn training_meta(&self) -> TrainingSetMeta {
        TrainingSetMeta {
            window_length: self.window,
            spar: self.spar,
            pve_cutoff: self.pve_cutoff,
            format_version: FORMAT_VERSION,
        }
    }

    /// Fails when a training set was built with different pipeline parameters.
    pub fn check_compatible(&self, meta: &TrainingSetMeta) -> Result<()> {
        if meta.window_length != self.window || meta.spar != self.spar || meta.pve_cutoff != self.pve_cutoff {
            return Err(Error::Config(format!(
                "training set built with window {}, spar {}, pve cutoff {} but pipeline uses window {}, spar {}, pve cutoff {}",
                meta.window_length, meta.spar, meta.pve_cutoff, self.window, self.spar, self.pve_cutoff
            )));
        }
        Ok(())
    }
}

/// Segments a trace and normalizes every segment. Per-segment curve failures
/// are kept in place so positions stay aligned with the segments.
pub fn segment_curves(
    trace: &Trace,
    config: &PipelineConfig,
) -> Result<(Segmentation, Vec<Result<GestureCurve>>)> {
    let seg = segment_trace(trace, config.window)?;
    let smoothing = config.smoothing();
    let curves = seg
        .segments
        .iter()
        .map(|s| gesture_curve(s, &smoothing))
        .collect();
    Ok((seg, curves))
}

/// Result for one segment.
#[derive(Debug)]
pub struct SegmentOutcome {
    pub curve: Result<GestureCurve>,
    pub classification: Option<Result<ClassificationResult>>,
}

impl SegmentOutcome {
    pub fn letter(&self) -> char {
        match &self.classification {
            Some(Ok(c)) => c.letter.as_char(),
            _ => UNKNOWN,
        }
    }
}

#[derive(Debug)]
pub struct Recognition {
    pub segmentation: Segmentation,
    pub outcomes: Vec<SegmentOutcome>,
}

impl Recognition {
    /// One symbol per segment, `'?'` where classification failed.
    pub fn letters(&self) -> Vec<char> {
        self.outcomes.iter().map(SegmentOutcome::letter).collect()
    }

    pub fn text(&self) -> String {
        self.letters().into_iter().collect()
    }
}

/// Classifies every letter in a recording.
pub fn recognize(trace: &Trace, training_set: &TrainingSet, config: &PipelineConfig) -> Result<Recognition> {
    config.check_compatible(training_set.meta())?;
    let (segmentation, curves) = segment_curves(trace, config)?;
    let outcomes = curves
        .into_iter()
        .map(|curve| {
            let classification = curve.as_ref().ok().map(|c| classify(c, training_set));
            SegmentOutcome {
                curve,
                classification,
            }
        })
        .collect();
    Ok(Recognition {
        segmentation,
        outcomes,
    })
}

/// Builds a template from a recording holding exactly one letter.
pub fn template_from_trace(
    letter: Letter,
    source_id: &str,
    trace: &Trace,
    config: &PipelineConfig,
) -> Result<TrainingTemplate> {
    let (_, mut curves) = segment_curves(trace, config)?;
    if curves.len() != 1 {
        return Err(Error::SegmentationMismatch {
            expected: 1,
            found: curves.len(),
        });
    }
    let curve = curves.pop().expect("one curve")?;
    Ok(TrainingTemplate::from_curve(letter, source_id, &curve))
}

/// A template whose detected axis class disagrees with its letter's majority.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisConflict {
    pub letter: Letter,
    pub source_id: String,
    pub detected: AxisClass,
    pub majority: AxisClass,
}

/// Fixes each letter's axis class to the majority over its templates and
/// drops (and reports) the templates that disagree. Ties resolve in
/// X, Y, both order.
pub fn assemble_training_set(
    templates: Vec<TrainingTemplate>,
    config: &PipelineConfig,
) -> Result<(TrainingSet, Vec<AxisConflict>)> {
    let mut votes: BTreeMap<Letter, [usize; 3]> = BTreeMap::new();
    for t in &templates {
        let idx = AxisClass::ALL.iter().position(|&a| a == t.axis_class).expect("known class");
        votes.entry(t.letter).or_default()[idx] += 1;
    }
    let majority = |l: Letter| {
        let v = votes[&l];
        let best = (0..3).fold(0, |b, i| if v[i] > v[b] { i } else { b });
        AxisClass::ALL[best]
    };
    let mut conflicts = Vec::new();
    let mut kept = Vec::with_capacity(templates.len());
    for t in templates {
        let m = majority(t.letter);
        if t.axis_class == m {
            kept.push(t);
        } else {
            conflicts.push(AxisConflict {
                letter: t.letter,
                source_id: t.source_id,
                detected: t.axis_class,
                majority: m,
            });
        }
    }
    Ok((TrainingSet::new(config.training_meta(), kept)?, conflicts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn template(letter: char, id: &str, axis: AxisClass) -> TrainingTemplate {
        let points: Vec<[f64; 2]> = (0..100)
            .map(|i| {
                let s = i as f64 / 99.0;
                match axis {
                    AxisClass::XAxis => [s, 0.0],
                    AxisClass::YAxis => [0.0, s],
                    AxisClass::BothAxes => {
                        if s < 0.5 {
                            [1.0 - 2.0 * s, 0.0]
                        } else {
                            [0.0, 2.0 * s - 1.0]
                        }
                    }
                }
            })
            .collect();
        TrainingTemplate {
            letter: Letter::new(letter).unwrap(),
            axis_class: axis,
            source_id: id.into(),
            points,
        }
    }

    #[test]
    fn majority_axis_drops_conflicts() {
        let cfg = PipelineConfig::default();
        let ts = vec![
            template('B', "1", AxisClass::XAxis),
            template('B', "2", AxisClass::XAxis),
            template('B', "3", AxisClass::BothAxes),
            template('L', "1", AxisClass::BothAxes),
        ];
        let (set, conflicts) = assemble_training_set(ts, &cfg).unwrap();
        assert_eq!(set.len(), 3);
        assert_eq!(conflicts.len(), 1);
        assert_eq!(conflicts[0].source_id, "3");
        assert_eq!(conflicts[0].majority, AxisClass::XAxis);
    }

    #[test]
    fn incompatible_meta_is_rejected() {
        let cfg = PipelineConfig::default();
        let mut meta = cfg.training_meta();
        assert!(cfg.check_compatible(&meta).is_ok());
        meta.spar = 0.7;
        assert!(matches!(cfg.check_compatible(&meta), Err(Error::Config(_))));
    }

    #[test]
    fn defaults() {
        let cfg = PipelineConfig::default();
        assert_eq!(cfg.window, 10);
        assert_eq!(cfg.spar, 0.5);
        assert_eq!(cfg.pve_cutoff, 0.92);
        assert_eq!(cfg.alpha, 0.05);
        cfg.validate().unwrap();
        let partial: PipelineConfig = serde_json::from_str(r#"{"spar": 0.6}"#).unwrap();
        assert_eq!(partial.spar, 0.6);
        assert_eq!(partial.window, 10);
    }
}
