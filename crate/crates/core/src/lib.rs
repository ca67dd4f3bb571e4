//! Gesture typing from 3-axis accelerometer recordings.
//!
//! A recording is a stream of letter gestures separated by deliberate jerks.
//! The pipeline is:
//!
//! 1. [`segment`]: moving variance of the squared resultant acceleration,
//!    a bagged k-means / EM-GMM cutoff and a two-neighbour hysteresis pass
//!    split the stream into letter spans.
//! 2. [`curve`]: each span is smoothed per axis with a cubic smoothing
//!    spline, resampled at 100 points, scaled into the unit square and routed
//!    to the X, Y or both-axes family by PCA.
//! 3. [`classify`]: nearest neighbour under the soap-bubble metric against a
//!    labelled [`TrainingSet`] restricted to the same axis family.
//!
//! [`stats`] holds the expected gesture count and the Wald interval for the
//! misclassification rate, [`synth`] generates seeded synthetic recordings
//! with known ground truth.

pub mod classify;
pub mod curve;
pub mod error;
pub mod ingest;
pub mod model;
pub mod pipeline;
pub mod segment;
pub mod stats;
pub mod synth;

pub use classify::{classify, distance_matrix, soap_distance, ClassificationResult, Distance};
pub use curve::{GestureCurve, SmoothingConfig};
pub use error::{Error, Result};
pub use ingest::{ColumnMap, TrainingSet, TrainingSetMeta, TrainingTemplate};
pub use model::{AccelSample, AlphabetEntry, AxisClass, GesturePrimitive, Letter, Trace};
pub use pipeline::PipelineConfig;
pub use segment::{CutoffReport, Label, LetterSegment, VarSeries};
pub use stats::{ErrorEstimate, ErrorExperiment};
pub use synth::SynthConfig;

/// Number of points every gesture curve is resampled to.
pub const CURVE_POINTS: usize = 100;
