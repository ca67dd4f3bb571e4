//! Jerk detection and letter extraction.
//!
//! The squared resultant acceleration is turned into a moving-variance
//! series. Two 1-D two-cluster fits (Lloyd k-means and an EM Gaussian
//! mixture) each propose a cutoff between the quiet letter windows and the
//! jerk windows; the two cutoffs are averaged ("bagged"). A hysteresis pass
//! then only lets the state flip when a point and its next two neighbours
//! agree, and the quiet runs enclosed by jerks become letters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AccelSample, Trace};

pub const DEFAULT_WINDOW: usize = 10;

const KMEANS_MAX_ITER: usize = 100;
const EM_MAX_ITER: usize = 100;
const EM_TOL: f64 = 1e-6;
const VARIANCE_FLOOR: f64 = 1e-12;

/// `a_j = ax² + ay² + az²` for every sample.
pub fn squared_resultant(trace: &Trace) -> Vec<f64> {
    trace
        .samples()
        .iter()
        .map(|s| s.ax * s.ax + s.ay * s.ay + s.az * s.az)
        .collect()
}

/// Sliding-window sample variance; `values[i]` covers inputs `i..i + window`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarSeries {
    pub values: Vec<f64>,
    pub window: usize,
    pub base_len: usize,
}

pub fn moving_variance(series: &[f64], window: usize) -> Result<VarSeries> {
    if window < 2 {
        return Err(Error::Config(format!("window {window} must be at least 2")));
    }
    if series.len() < window {
        return Err(Error::TooShort {
            what: "moving variance input",
            needed: window,
            got: series.len(),
        });
    }
    let w = window as f64;
    let values = series
        .windows(window)
        .map(|win| {
            let mean = win.iter().sum::<f64>() / w;
            win.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / (w - 1.0)
        })
        .collect();
    Ok(VarSeries {
        values,
        window,
        base_len: series.len(),
    })
}

/// Two-cluster split of 1-D values.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSplit {
    pub cutoff: f64,
    /// `true` where the value belongs to the upper cluster.
    pub upper: Vec<bool>,
}

fn midpoint_cutoff(values: &[f64], upper: &[bool]) -> Option<f64> {
    let mut min_hi = f64::INFINITY;
    let mut max_lo = f64::NEG_INFINITY;
    for (&v, &u) in values.iter().zip(upper) {
        if u {
            min_hi = min_hi.min(v);
        } else {
            max_lo = max_lo.max(v);
        }
    }
    (min_hi.is_finite() && max_lo.is_finite()).then(|| 0.5 * (min_hi + max_lo))
}

/// Lloyd's algorithm with k = 2, centres started at the extremes. The cutoff
/// is the midpoint between the lowest upper value and the highest lower value.
pub fn kmeans_cutoff(values: &[f64]) -> Result<ClusterSplit> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.len() < 2 || !(hi > lo) {
        return Err(Error::DegenerateInput("fewer than two distinct values"));
    }
    let (mut c_lo, mut c_hi) = (lo, hi);
    let mut upper = vec![false; values.len()];
    for iter in 0..KMEANS_MAX_ITER {
        let mid = 0.5 * (c_lo + c_hi);
        let mut changed = false;
        for (u, &v) in upper.iter_mut().zip(values) {
            let next = v > mid;
            changed |= next != *u;
            *u = next;
        }
        if !changed && iter > 0 {
            break;
        }
        let (mut s_lo, mut n_lo, mut s_hi, mut n_hi) = (0.0, 0usize, 0.0, 0usize);
        for (&u, &v) in upper.iter().zip(values) {
            if u {
                s_hi += v;
                n_hi += 1;
            } else {
                s_lo += v;
                n_lo += 1;
            }
        }
        c_lo = s_lo / n_lo as f64;
        c_hi = s_hi / n_hi as f64;
    }
    let cutoff = midpoint_cutoff(values, &upper).expect("both clusters hold the extremes");
    Ok(ClusterSplit { cutoff, upper })
}

/// Two-component 1-D Gaussian mixture fitted by EM.
#[derive(Debug, Clone, PartialEq)]
pub struct GmmFit {
    pub cutoff: f64,
    pub upper: Vec<bool>,
    pub iterations: usize,
    /// `(weight, mean, variance)` of the lower and upper component.
    pub components: [(f64, f64, f64); 2],
    pub log_likelihood: f64,
}

/// EM fit initialised from the k-means split; points are hard-assigned to the
/// component with the larger posterior and the cutoff uses the same midpoint
/// rule as [`kmeans_cutoff`].
pub fn gmm_cutoff(values: &[f64]) -> Result<GmmFit> {
    if values.len() < 4 {
        return Err(Error::TooShort {
            what: "mixture input",
            needed: 4,
            got: values.len(),
        });
    }
    let init = kmeans_cutoff(values)?;
    let n = values.len() as f64;
    let mut comps = [(0.0, 0.0, 0.0); 2];
    for (k, comp) in comps.iter_mut().enumerate() {
        let members: Vec<f64> = values
            .iter()
            .zip(&init.upper)
            .filter(|(_, &u)| u == (k == 1))
            .map(|(&v, _)| v)
            .collect();
        let m = members.len() as f64;
        let mean = members.iter().sum::<f64>() / m;
        let var = members.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m;
        *comp = (m / n, mean, var.max(VARIANCE_FLOOR));
    }

    let mut resp = vec![0.0; values.len()];
    let mut iterations = 0;
    let mut ll = e_step(values, &comps, &mut resp);
    while iterations < EM_MAX_ITER {
        iterations += 1;
        comps = m_step(values, &resp)?;
        let prev_ll = ll;
        ll = e_step(values, &comps, &mut resp);
        if ll - prev_ll < EM_TOL {
            break;
        }
    }

    let (lower, upper_k) = if comps[0].1 <= comps[1].1 { (0, 1) } else { (1, 0) };
    let upper: Vec<bool> = resp.iter().map(|&r| (r > 0.5) == (upper_k == 1)).collect();
    let cutoff =
        midpoint_cutoff(values, &upper).ok_or(Error::DegenerateFit("a component owns no points"))?;
    Ok(GmmFit {
        cutoff,
        upper,
        iterations,
        components: [comps[lower], comps[upper_k]],
        log_likelihood: ll,
    })
}

/// Fills `resp` with the posterior of component 1 and returns the log-likelihood.
fn e_step(values: &[f64], comps: &[(f64, f64, f64); 2], resp: &mut [f64]) -> f64 {
    let ln_2pi = (2.0 * std::f64::consts::PI).ln();
    let log_dens = |(w, m, v): (f64, f64, f64), x: f64| {
        w.ln() - 0.5 * (ln_2pi + v.ln()) - (x - m) * (x - m) / (2.0 * v)
    };
    let mut ll = 0.0;
    for (r, &x) in resp.iter_mut().zip(values) {
        let l0 = log_dens(comps[0], x);
        let l1 = log_dens(comps[1], x);
        let top = l0.max(l1);
        let lse = top + ((l0 - top).exp() + (l1 - top).exp()).ln();
        *r = (l1 - lse).exp();
        ll += lse;
    }
    ll
}

fn m_step(values: &[f64], resp: &[f64]) -> Result<[(f64, f64, f64); 2]> {
    let n = values.len() as f64;
    let mut out = [(0.0, 0.0, 0.0); 2];
    for (k, comp) in out.iter_mut().enumerate() {
        let w = |r: f64| if k == 1 { r } else { 1.0 - r };
        let nk: f64 = resp.iter().map(|&r| w(r)).sum();
        if !(nk > 1e-9) {
            return Err(Error::DegenerateFit("component lost all responsibility"));
        }
        let mean = values.iter().zip(resp).map(|(&x, &r)| w(r) * x).sum::<f64>() / nk;
        let var = values
            .iter()
            .zip(resp)
            .map(|(&x, &r)| w(r) * (x - mean) * (x - mean))
            .sum::<f64>()
            / nk;
        if !(var >= VARIANCE_FLOOR) {
            return Err(Error::DegenerateFit("component variance collapsed"));
        }
        *comp = (nk / n, mean, var);
    }
    Ok(out)
}

pub fn bagged_cutoff(kmeans_cut: f64, gmm_cut: f64) -> f64 {
    0.5 * (kmeans_cut + gmm_cut)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Low,
    High,
}

/// Hysteresis labelling: the state flips at point `i` only when `v_i` and its
/// next two neighbours all lie on the other side of `cutoff` (strictly above
/// to rise, at or below to fall). Near the end of the series only the
/// neighbours that exist are consulted.
pub fn neighbours_together(values: &[f64], cutoff: f64) -> Result<Vec<Label>> {
    let n = values.len();
    if n < 3 {
        return Err(Error::TooShort {
            what: "variance series for hysteresis",
            needed: 3,
            got: n,
        });
    }
    let mut state = Label::Low;
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let ahead = &values[i..(i + 3).min(n)];
        state = match state {
            Label::Low if ahead.iter().all(|&v| v > cutoff) => Label::High,
            Label::High if ahead.iter().all(|&v| v <= cutoff) => Label::Low,
            s => s,
        };
        labels.push(state);
    }
    Ok(labels)
}

/// Samples lying between two jerks, as an inclusive index span into the trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LetterSegment {
    pub start: usize,
    pub end: usize,
    pub samples: Vec<AccelSample>,
}

impl LetterSegment {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Maximal runs of `label`, as inclusive `(start, end)` index pairs.
pub fn runs(labels: &[Label], label: Label) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < labels.len() {
        if labels[i] == label {
            let s = i;
            while i + 1 < labels.len() && labels[i + 1] == label {
                i += 1;
            }
            out.push((s, i));
        }
        i += 1;
    }
    out
}

/// Turns Low runs enclosed by High runs into letters. A variance index `i`
/// maps to sample `i + window / 2`; runs shorter than one window are dropped.
pub fn extract_segments(
    labels: &[Label],
    window: usize,
    trace: &Trace,
) -> Result<Vec<LetterSegment>> {
    let high = runs(labels, Label::High);
    if high.len() < 2 {
        return Err(Error::NoJerksDetected);
    }
    let (first_high_end, last_high_start) = (high[0].1, high[high.len() - 1].0);
    let shift = window / 2;
    let samples = trace.samples();
    Ok(runs(labels, Label::Low)
        .into_iter()
        .filter(|&(s, e)| s > first_high_end && e < last_high_start)
        .filter(|&(s, e)| e - s + 1 >= window)
        .map(|(s, e)| {
            let (start, end) = (s + shift, (e + shift).min(samples.len() - 1));
            LetterSegment {
                start,
                end,
                samples: samples[start..=end].to_vec(),
            }
        })
        .collect())
}

/// Cutoffs found on one trace plus the hysteresis labels they produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffReport {
    pub kmeans_cut: f64,
    pub gmm_cut: f64,
    pub bagged_cut: f64,
    pub em_iterations: usize,
    /// Set when EM degenerated and the k-means cutoff stood in for it.
    pub gmm_fallback: bool,
    pub labels: Vec<Label>,
}

/// Everything produced by segmenting one trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub variance: VarSeries,
    pub report: CutoffReport,
    pub segments: Vec<LetterSegment>,
}

/// Computes the cutoffs and labels for a moving-variance series.
pub fn cutoffs(values: &[f64]) -> Result<CutoffReport> {
    let km = kmeans_cutoff(values)?;
    let (gmm_cut, em_iterations, gmm_fallback) = match gmm_cutoff(values) {
        Ok(fit) => (fit.cutoff, fit.iterations, false),
        Err(Error::DegenerateFit(_)) => (km.cutoff, 0, true),
        Err(e) => return Err(e),
    };
    let bagged_cut = bagged_cutoff(km.cutoff, gmm_cut);
    let labels = neighbours_together(values, bagged_cut)?;
    Ok(CutoffReport {
        kmeans_cut: km.cutoff,
        gmm_cut,
        bagged_cut,
        em_iterations,
        gmm_fallback,
        labels,
    })
}

/// Full jerk-based segmentation of a trace.
pub fn segment_trace(trace: &Trace, window: usize) -> Result<Segmentation> {
    if trace.len() < 2 * window {
        return Err(Error::TooShort {
            what: "trace samples for segmentation",
            needed: 2 * window,
            got: trace.len(),
        });
    }
    let variance = moving_variance(&squared_resultant(trace), window)?;
    let report = match cutoffs(&variance.values) {
        Err(Error::DegenerateInput(_)) => return Err(Error::NoJerksDetected),
        r => r?,
    };
    let segments = extract_segments(&report.labels, window, trace)?;
    Ok(Segmentation {
        variance,
        report,
        segments,
    })
}
