//! CSV recordings in, training sets in and out.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::curve::{detect_axis, GestureCurve};
use crate::error::{Error, Result};
use crate::model::{median, AccelSample, AxisClass, Letter, Trace};
use crate::CURVE_POINTS;

/// A CSV column chosen by header name or 0-based index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Column {
    Index(usize),
    Name(String),
}

impl Column {
    /// Numeric strings select by index, anything else by name.
    pub fn parse(s: &str) -> Column {
        s.parse()
            .map(Column::Index)
            .unwrap_or_else(|_| Column::Name(s.to_string()))
    }

    fn resolve(&self, header: &csv::StringRecord) -> Result<usize> {
        match self {
            Column::Index(i) if *i < header.len() => Ok(*i),
            Column::Index(i) => Err(Error::Config(format!(
                "column index {i} out of range ({} columns)",
                header.len()
            ))),
            Column::Name(name) => header
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| Error::Config(format!("missing column {name:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMap {
    pub time: Column,
    pub x: Column,
    pub y: Column,
    pub z: Column,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            time: Column::Name("time".into()),
            x: Column::Name("x".into()),
            y: Column::Name("y".into()),
            z: Column::Name("z".into()),
        }
    }
}

/// Parses a headed CSV recording. Any unparseable field rejects the file.
pub fn parse_csv(bytes: &[u8], columns: &ColumnMap) -> Result<Trace> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Format(format!("not UTF-8: {e}")))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::Format(format!("header: {e}")))?
        .clone();
    let idx = [
        columns.time.resolve(&header)?,
        columns.x.resolve(&header)?,
        columns.y.resolve(&header)?,
        columns.z.resolve(&header)?,
    ];
    let mut samples = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Format(format!("row {}: {e}", row + 2)))?;
        let mut vals = [0.0; 4];
        for (v, &i) in vals.iter_mut().zip(&idx) {
            let field = record.get(i).unwrap_or("");
            *v = field.parse().map_err(|_| {
                Error::Format(format!("row {}: cannot parse {field:?} as a number", row + 2))
            })?;
        }
        samples.push(AccelSample::new(vals[0], vals[1], vals[2], vals[3]));
    }
    Trace::new(samples)
}

/// Writes a trace as `time,x,y,z` with shortest round-trip float formatting.
pub fn write_csv(trace: &Trace) -> String {
    let mut out = String::with_capacity(trace.len() * 48);
    out.push_str("time,x,y,z\n");
    for s in trace.samples() {
        out.push_str(&format!("{},{},{},{}\n", s.t, s.ax, s.ay, s.az));
    }
    out
}

pub fn read_trace(path: &Path, columns: &ColumnMap) -> Result<Trace> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&bytes, columns)
}

/// Maximum relative deviation of a gap from the median before resampling.
pub const GAP_TOLERANCE: f64 = 0.2;

/// Resamples onto a uniform grid at the median gap when any gap deviates
/// from it by more than 20%; returns the trace unchanged otherwise.
pub fn normalize_trace(trace: &Trace) -> Result<Trace> {
    let s = trace.samples();
    if s.len() < 2 {
        return Err(Error::TooShort {
            what: "trace samples",
            needed: 2,
            got: s.len(),
        });
    }
    let gaps: Vec<f64> = s.windows(2).map(|w| w[1].t - w[0].t).collect();
    let step = median(gaps.clone());
    if gaps
        .iter()
        .all(|g| (g - step).abs() <= GAP_TOLERANCE * step)
    {
        return Ok(trace.clone());
    }
    let (t0, t_end) = (s[0].t, s[s.len() - 1].t);
    let count = ((t_end - t0) / step + 1e-9).floor() as usize + 1;
    let mut out = Vec::with_capacity(count);
    let mut j = 0;
    for k in 0..count {
        let t = t0 + step * k as f64;
        while j + 2 < s.len() && s[j + 1].t < t {
            j += 1;
        }
        let (a, b) = (&s[j], &s[j + 1]);
        let f = ((t - a.t) / (b.t - a.t)).clamp(0.0, 1.0);
        let lerp = |u: f64, v: f64| u + f * (v - u);
        out.push(AccelSample::new(
            t,
            lerp(a.ax, b.ax),
            lerp(a.ay, b.ay),
            lerp(a.az, b.az),
        ));
    }
    Trace::new(out)
}

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSetMeta {
    pub window_length: usize,
    pub spar: f64,
    pub pve_cutoff: f64,
    pub format_version: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingTemplate {
    pub letter: Letter,
    pub axis_class: AxisClass,
    pub source_id: String,
    pub points: Vec<[f64; 2]>,
}

impl TrainingTemplate {
    pub fn from_curve(letter: Letter, source_id: impl Into<String>, curve: &GestureCurve) -> Self {
        Self {
            letter,
            axis_class: curve.axis_class,
            source_id: source_id.into(),
            points: curve.points.clone(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TrainingSetFile {
    meta: TrainingSetMeta,
    templates: Vec<TrainingTemplate>,
}

/// Labelled template curves. Construction validates every template and
/// derives its comparison curve once.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "TrainingSetFile", into = "TrainingSetFile")]
pub struct TrainingSet {
    meta: TrainingSetMeta,
    templates: Vec<TrainingTemplate>,
    curves: Vec<GestureCurve>,
}

impl PartialEq for TrainingSet {
    fn eq(&self, other: &Self) -> bool {
        self.meta == other.meta && self.templates == other.templates
    }
}

impl TryFrom<TrainingSetFile> for TrainingSet {
    type Error = Error;

    fn try_from(f: TrainingSetFile) -> Result<Self> {
        TrainingSet::new(f.meta, f.templates)
    }
}

impl From<TrainingSet> for TrainingSetFile {
    fn from(s: TrainingSet) -> Self {
        TrainingSetFile {
            meta: s.meta,
            templates: s.templates,
        }
    }
}

impl TrainingSet {
    pub fn new(meta: TrainingSetMeta, templates: Vec<TrainingTemplate>) -> Result<Self> {
        if meta.format_version != FORMAT_VERSION {
            return Err(Error::Version {
                found: meta.format_version,
                expected: FORMAT_VERSION,
            });
        }
        let curves = templates
            .iter()
            .map(|t| validate_template(t, meta.pve_cutoff))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            meta,
            templates,
            curves,
        })
    }

    pub fn meta(&self) -> &TrainingSetMeta {
        &self.meta
    }

    pub fn templates(&self) -> &[TrainingTemplate] {
        &self.templates
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    /// Templates (with their comparison curves) of one axis class.
    pub fn pool(
        &self,
        axis_class: AxisClass,
    ) -> impl Iterator<Item = (&TrainingTemplate, &GestureCurve)> + '_ {
        self.templates
            .iter()
            .zip(&self.curves)
            .filter(move |(t, _)| t.axis_class == axis_class)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let version = value
            .get("meta")
            .and_then(|m| m.get("format_version"))
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::CorruptSet("missing meta.format_version".into()))?;
        if version != FORMAT_VERSION as u64 {
            return Err(Error::Version {
                found: version.try_into().unwrap_or(u32::MAX),
                expected: FORMAT_VERSION,
            });
        }
        let file: TrainingSetFile =
            serde_json::from_value(value).map_err(|e| Error::CorruptSet(e.to_string()))?;
        TrainingSet::new(file.meta, file.templates)
    }
}

fn validate_template(t: &TrainingTemplate, pve_cutoff: f64) -> Result<GestureCurve> {
    let ctx = |msg: String| Error::CorruptSet(format!("template {}:{}: {msg}", t.letter, t.source_id));
    if t.points.len() != CURVE_POINTS {
        return Err(ctx(format!(
            "{} points, expected {CURVE_POINTS}",
            t.points.len()
        )));
    }
    if t
        .points
        .iter()
        .flatten()
        .any(|v| !(0.0..=1.0).contains(v))
    {
        return Err(ctx("coordinate outside [0, 1]".into()));
    }
    let curve = detect_axis(&t.points, pve_cutoff).map_err(|e| ctx(e.to_string()))?;
    if curve.axis_class != t.axis_class {
        return Err(ctx(format!(
            "stored axis class {} but points give {}",
            t.axis_class, curve.axis_class
        )));
    }
    Ok(curve)
}

pub fn save_training_set(set: &TrainingSet, path: &Path) -> Result<()> {
    fs::write(path, set.to_json()? + "\n").map_err(|e| Error::io(path, e))
}

pub fn load_training_set(path: &Path) -> Result<TrainingSet> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    TrainingSet::from_json(&text)
}
