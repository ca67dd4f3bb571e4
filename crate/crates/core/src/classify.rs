//! Soap-bubble distance and nearest-neighbour classification.
//!
//! The distance between two curves sampled at the same 100 instants is the
//! sum of pointwise Euclidean gaps, a discrete area of the film spanned
//! between them. Single-axis curves are compared on their principal series
//! only; both-axes curves on the full `(x, y)` points.

use serde::{Deserialize, Serialize};

use crate::curve::GestureCurve;
use crate::error::{Error, Result};
use crate::ingest::TrainingSet;
use crate::model::{AxisClass, Letter};

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Distance(pub f64);

impl Distance {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Sum of pointwise Euclidean distances between two 2-D polylines.
pub fn planar_distance(a: &[[f64; 2]], b: &[[f64; 2]]) -> Result<Distance> {
    if a.len() != b.len() {
        return Err(Error::Shape(a.len(), b.len()));
    }
    Ok(Distance(
        a.iter()
            .zip(b)
            .map(|(p, q)| (p[0] - q[0]).hypot(p[1] - q[1]))
            .sum(),
    ))
}

/// Sum of absolute differences between two 1-D series.
pub fn series_distance(a: &[f64], b: &[f64]) -> Result<Distance> {
    if a.len() != b.len() {
        return Err(Error::Shape(a.len(), b.len()));
    }
    Ok(Distance(a.iter().zip(b).map(|(p, q)| (p - q).abs()).sum()))
}

pub fn soap_distance(a: &GestureCurve, b: &GestureCurve, mode: AxisClass) -> Result<Distance> {
    match mode {
        AxisClass::BothAxes => planar_distance(&a.points, &b.points),
        AxisClass::XAxis | AxisClass::YAxis => {
            let missing = || Error::DegenerateSegment("single-axis comparison needs a principal series");
            let pa = a.principal_series.as_deref().ok_or_else(missing)?;
            let pb = b.principal_series.as_deref().ok_or_else(missing)?;
            series_distance(pa, pb)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub letter: Letter,
    pub distance: Distance,
    pub axis_class: AxisClass,
    /// Nearest template of a different letter, if the pool has one.
    pub runner_up: Option<(Letter, Distance)>,
}

/// Nearest neighbour among the templates sharing the curve's axis class.
/// Equal distances resolve to the alphabetically first letter.
pub fn classify(curve: &GestureCurve, training_set: &TrainingSet) -> Result<ClassificationResult> {
    let mode = curve.axis_class;
    // best distance per letter within the pool
    let mut best: [Option<Distance>; 26] = [None; 26];
    for (template, tcurve) in training_set.pool(mode) {
        let d = soap_distance(curve, tcurve, mode)?;
        let slot = &mut best[template.letter.index()];
        if slot.is_none_or(|cur| d.0 < cur.0) {
            *slot = Some(d);
        }
    }
    let mut ranked: Vec<(Letter, Distance)> = Letter::all()
        .zip(best)
        .filter_map(|(l, d)| d.map(|d| (l, d)))
        .collect();
    if ranked.is_empty() {
        return Err(Error::NoTemplatesForAxis(mode));
    }
    // stable sort keeps alphabetical order among ties
    ranked.sort_by(|a, b| a.1 .0.total_cmp(&b.1 .0));
    Ok(ClassificationResult {
        letter: ranked[0].0,
        distance: ranked[0].1,
        axis_class: mode,
        runner_up: ranked.get(1).copied(),
    })
}

/// Pairwise distances between the templates of one axis class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    pub axis_class: AxisClass,
    /// Row/column labels as `(letter, source_id)`.
    pub labels: Vec<(Letter, String)>,
    pub values: Vec<Vec<f64>>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// CSV with a header row of labels (`letter:source_id`) and one labelled row per template.
    pub fn to_csv(&self) -> String {
        let name = |(l, s): &(Letter, String)| format!("{l}:{s}");
        let mut out = String::from("template");
        for lbl in &self.labels {
            out.push(',');
            out.push_str(&name(lbl));
        }
        out.push('\n');
        for (lbl, row) in self.labels.iter().zip(&self.values) {
            out.push_str(&name(lbl));
            for v in row {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}

pub fn distance_matrix(training_set: &TrainingSet, axis_class: AxisClass) -> Result<DistanceMatrix> {
    let mut pool: Vec<_> = training_set.pool(axis_class).collect();
    pool.sort_by(|a, b| (a.0.letter, &a.0.source_id).cmp(&(b.0.letter, &b.0.source_id)));
    let n = pool.len();
    let mut values = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = soap_distance(pool[i].1, pool[j].1, axis_class)?.0;
            values[i][j] = d;
            values[j][i] = d;
        }
    }
    Ok(DistanceMatrix {
        axis_class,
        labels: pool
            .iter()
            .map(|(t, _)| (t.letter, t.source_id.clone()))
            .collect(),
        values,
    })
}
