use std::fs;
use std::path::{Path, PathBuf};

use accelerograph::ingest::FORMAT_VERSION;
use accelerograph::{distance_matrix, AxisClass, Letter, TrainingSet};

use super::segment::SegmentsDoc;
use super::{emit, sibling, write_file};
use crate::config::GlobalArgs;
use crate::error::{CliError, Code};
use crate::svg::{extent, heatmap, palette, Chart};
use crate::PlotKind;

const UNIT: (f64, f64) = (-0.05, 1.05);

/// Moving variance against sample index with the three cutoffs and the
/// recovered segments shaded.
pub fn variance(doc: &SegmentsDoc) -> String {
    let offset = doc.window / 2;
    let points: Vec<[f64; 2]> = doc
        .variance
        .iter()
        .enumerate()
        .map(|(i, &v)| [(i + offset) as f64, v])
        .collect();
    let r = &doc.cutoffs;
    let cuts = [
        (r.kmeans_cut, "kmeans", palette(1)),
        (r.gmm_cut, "gmm", palette(2)),
        (r.bagged_cut, "bagged", palette(3)),
    ];
    let x = extent(points.iter().map(|p| p[0]));
    let y = extent(doc.variance.iter().copied().chain(cuts.iter().map(|c| c.0)));
    let mut chart = Chart::new(900.0, 420.0, x, y);
    for s in &doc.segments {
        chart.band(s.start as f64, s.end as f64, "segment");
    }
    chart.frame("Moving variance", "sample", "variance of squared resultant");
    chart.path(&points, "variance", palette(0), None);
    for (value, name, color) in cuts {
        chart.hline(value, "cutoff", color, &format!("{name} {value:.4}"));
    }
    chart.finish()
}

/// One or more curves in the unit square at equal aspect.
fn xy(title: &str, curves: &[&[[f64; 2]]]) -> String {
    let mut chart = Chart::new(424.0, 420.0, UNIT, UNIT);
    chart.frame(title, "x", "y");
    for (i, points) in curves.iter().enumerate() {
        chart.path(points, "trajectory", palette(i), None);
    }
    chart.finish()
}

/// Both coordinates of a curve against normalised time.
fn axes(title: &str, points: &[[f64; 2]]) -> String {
    let t = |i: usize| i as f64 / (points.len().max(2) - 1) as f64;
    let series = |k: usize| -> Vec<[f64; 2]> { points.iter().enumerate().map(|(i, p)| [t(i), p[k]]).collect() };
    let mut chart = Chart::new(640.0, 360.0, UNIT, UNIT);
    chart.frame(title, "normalised time", "scaled acceleration");
    chart.path(&series(0), "axis-x", palette(0), Some("x"));
    chart.path(&series(1), "axis-y", palette(1), Some("y"));
    chart.legend(&[("x", palette(0)), ("y", palette(1))]);
    chart.finish()
}

fn segment_plots(doc: &SegmentsDoc, kind: PlotKind) -> Result<Vec<(String, String)>, CliError> {
    if kind == PlotKind::Heatmap {
        return Err(CliError::usage("heatmaps are drawn from a training set"));
    }
    if kind == PlotKind::Variance {
        return Ok(vec![("variance".into(), variance(doc))]);
    }
    let mut out = Vec::new();
    for (i, s) in doc.segments.iter().enumerate() {
        let Some(c) = &s.curve else { continue };
        let title = format!("segment {i} ({}, pve {:.3})", c.axis_class, c.pve);
        let svg = match kind {
            PlotKind::Xy => xy(&title, &[&c.points]),
            _ => axes(&title, &c.points),
        };
        let name = if kind == PlotKind::Xy { "xy" } else { "axes" };
        out.push((format!("{name}-{i}"), svg));
    }
    Ok(out)
}

fn training_plots(set: &TrainingSet, kind: PlotKind) -> Result<Vec<(String, String)>, CliError> {
    match kind {
        PlotKind::Variance | PlotKind::Axes => Err(CliError::usage(
            "variance and axes plots are drawn from a segments file",
        )),
        PlotKind::Xy => Ok(Letter::all()
            .filter_map(|l| {
                let curves: Vec<&[[f64; 2]]> = set
                    .templates()
                    .iter()
                    .filter(|t| t.letter == l)
                    .map(|t| t.points.as_slice())
                    .collect();
                (!curves.is_empty()).then(|| (format!("xy-{l}"), xy(&format!("letter {l}"), &curves)))
            })
            .collect()),
        PlotKind::Heatmap => {
            let mut out = Vec::new();
            for axis in AxisClass::ALL {
                let m = distance_matrix(set, axis)?;
                if m.is_empty() {
                    continue;
                }
                let labels: Vec<String> = m.labels.iter().map(|(l, id)| format!("{l}:{id}")).collect();
                let title = format!("{axis} templates, blue near, red far");
                out.push((format!("heatmap-{}", axis.as_str()), heatmap(&title, &labels, &m.values)));
            }
            Ok(out)
        }
    }
}

pub fn run(input: &Path, kind: PlotKind, g: &GlobalArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(input).map_err(|e| CliError::io(input, e))?;
    let bad = |e: &dyn std::fmt::Display| CliError::new(Code::Io, format!("{}: {e}", input.display()));
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| bad(&e))?;
    let plots = if value.get("templates").is_some() {
        let set = TrainingSet::from_json(&text).map_err(|e| CliError::from(e).context(input.display()))?;
        training_plots(&set, kind)?
    } else if value.get("segments").is_some() {
        let doc: SegmentsDoc = serde_json::from_value(value).map_err(|e| bad(&e))?;
        if doc.format_version != FORMAT_VERSION {
            return Err(bad(&format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                doc.format_version
            )));
        }
        segment_plots(&doc, kind)?
    } else {
        return Err(bad(&"neither a segments file nor a training set"));
    };
    if plots.is_empty() {
        return Err(CliError::usage(format!("{}: nothing to plot", input.display())));
    }

    let single = plots.len() == 1;
    let mut written = String::new();
    for (suffix, svg) in plots {
        let path: PathBuf = match &g.out {
            Some(out) if single => out.clone(),
            Some(out) => sibling(out, &format!(".{suffix}.svg")),
            None => sibling(input, &format!(".{suffix}.svg")),
        };
        write_file(&path, &svg)?;
        written.push_str(&format!("{}\n", path.display()));
    }
    emit(None, &written)
}
