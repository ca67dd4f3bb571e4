use std::path::{Path, PathBuf};

use accelerograph::ingest::FORMAT_VERSION;
use accelerograph::pipeline::segment_curves;
use accelerograph::{AxisClass, CutoffReport, PipelineConfig};
use serde::{Deserialize, Serialize};

use super::{emit, load_trace, plot, sibling, to_json, write_file};
use crate::config::GlobalArgs;
use crate::error::CliError;

/// The `segment` output, also read back by `plot`.
#[derive(Debug, Serialize, Deserialize)]
pub struct SegmentsDoc {
    pub format_version: u32,
    pub source: String,
    pub window: usize,
    pub sample_period: f64,
    pub cutoffs: CutoffReport,
    /// Moving variance; entry `i` belongs to sample `i + window / 2`.
    pub variance: Vec<f64>,
    pub segments: Vec<SegmentEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SegmentEntry {
    pub start: usize,
    pub end: usize,
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CurveEntry {
    pub axis_class: AxisClass,
    pub pve: f64,
    pub points: Vec<[f64; 2]>,
}

pub fn run(input: &Path, config: &PipelineConfig, g: &GlobalArgs) -> Result<(), CliError> {
    let trace = load_trace(input, config)?;
    let (seg, curves) = segment_curves(&trace, config).map_err(|e| CliError::from(e).context(input.display()))?;
    let segments = seg
        .segments
        .iter()
        .zip(curves)
        .map(|(s, curve)| {
            let (curve, error) = match curve {
                Ok(c) => (
                    Some(CurveEntry {
                        axis_class: c.axis_class,
                        pve: c.pve,
                        points: c.points,
                    }),
                    None,
                ),
                Err(e) => (None, Some(e.to_string())),
            };
            SegmentEntry {
                start: s.start,
                end: s.end,
                samples: s.len(),
                curve,
                error,
            }
        })
        .collect::<Vec<_>>();
    if g.verbose {
        let r = &seg.report;
        eprintln!(
            "cutoffs: kmeans {:.6} gmm {:.6} bagged {:.6} ({} EM iterations{})",
            r.kmeans_cut,
            r.gmm_cut,
            r.bagged_cut,
            r.em_iterations,
            if r.gmm_fallback { ", fell back to k-means" } else { "" }
        );
        for (i, s) in segments.iter().enumerate() {
            eprintln!("segment {i}: samples {}..={}", s.start, s.end);
        }
    }
    let doc = SegmentsDoc {
        format_version: FORMAT_VERSION,
        source: input.display().to_string(),
        window: seg.variance.window,
        sample_period: trace.sample_period(),
        cutoffs: seg.report,
        variance: seg.variance.values,
        segments,
    };
    emit(g.out.as_deref(), &to_json(&doc)?)?;
    if g.plot {
        let path: PathBuf = sibling(g.out.as_deref().unwrap_or(input), ".variance.svg");
        write_file(&path, &plot::variance(&doc))?;
    }
    Ok(())
}
