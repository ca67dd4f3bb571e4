//! From a letter segment to the canonical 100-point comparison curve.
//!
//! Each axis of the segment is smoothed against time, both splines are
//! evaluated at 100 equally spaced times, the resulting `(x, y)` cloud is
//! scaled isotropically into the unit square, and PCA decides whether the
//! letter lives on the X axis, the Y axis or both.

pub mod spline;

use serde::{Deserialize, Serialize};

pub use self::spline::{Penalty, SmoothingSpline};
use crate::error::{Error, Result};
use crate::model::AxisClass;
use crate::segment::LetterSegment;
use crate::CURVE_POINTS;

pub const DEFAULT_SPAR: f64 = 0.5;
pub const DEFAULT_PVE_CUTOFF: f64 = 0.92;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmoothingConfig {
    pub spar: f64,
    /// Overrides the `spar` mapping when set.
    pub lambda: Option<f64>,
    pub pve_cutoff: f64,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        Self {
            spar: DEFAULT_SPAR,
            lambda: None,
            pve_cutoff: DEFAULT_PVE_CUTOFF,
        }
    }
}

impl SmoothingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.5).contains(&self.spar) {
            return Err(Error::Config(format!("spar {} outside [0, 1.5]", self.spar)));
        }
        if !(self.pve_cutoff > 0.0 && self.pve_cutoff < 1.0) {
            return Err(Error::Config(format!(
                "pve_cutoff {} outside (0, 1)",
                self.pve_cutoff
            )));
        }
        if let Some(l) = self.lambda {
            if !(l.is_finite() && l >= 0.0) {
                return Err(Error::Config(format!("lambda {l} must be finite and >= 0")));
            }
        }
        Ok(())
    }

    pub fn penalty(&self) -> Penalty {
        match self.lambda {
            Some(l) => Penalty::Lambda(l),
            None => Penalty::Spar(self.spar),
        }
    }
}

/// Canonical form of one letter gesture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GestureCurve {
    /// 100 points scaled into the unit square.
    pub points: Vec<[f64; 2]>,
    pub axis_class: AxisClass,
    /// Share of variance on the first principal component.
    pub pve: f64,
    /// Points projected on the signed first principal direction and rescaled
    /// to `[0, 1]`; present only for single-axis curves.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub principal_series: Option<Vec<f64>>,
}

pub fn smooth_axis(times: &[f64], values: &[f64], penalty: Penalty) -> Result<SmoothingSpline> {
    SmoothingSpline::fit(times, values, penalty)
}

/// Evaluation times: `CURVE_POINTS` equally spaced values spanning `[t_min, t_max]`.
pub fn eval_times(t_min: f64, t_max: f64) -> Vec<f64> {
    let step = (t_max - t_min) / (CURVE_POINTS - 1) as f64;
    (0..CURVE_POINTS)
        .map(|i| {
            if i == CURVE_POINTS - 1 {
                t_max
            } else {
                t_min + step * i as f64
            }
        })
        .collect()
}

pub fn resample_100(
    spline_x: &SmoothingSpline,
    spline_y: &SmoothingSpline,
    t_range: (f64, f64),
) -> Vec<[f64; 2]> {
    eval_times(t_range.0, t_range.1)
        .into_iter()
        .map(|t| [spline_x.eval(t), spline_y.eval(t)])
        .collect()
}

/// Shifts both axes to start at zero and divides both by the larger range.
pub fn scale_unit_square(points: &[[f64; 2]]) -> Result<Vec<[f64; 2]>> {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let range = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    if !(range > 0.0 && range.is_finite()) {
        return Err(Error::DegenerateSegment("no motion on either axis"));
    }
    Ok(points
        .iter()
        .map(|p| [(p[0] - lo[0]) / range, (p[1] - lo[1]) / range])
        .collect())
}

/// Eigen-decomposition of the 2×2 covariance of `points`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalAxes {
    pub mean: [f64; 2],
    /// Eigenvalues, largest first.
    pub values: [f64; 2],
    /// Unit first eigenvector (sign not normalized).
    pub first: [f64; 2],
}

pub fn principal_axes(points: &[[f64; 2]]) -> Result<PrincipalAxes> {
    let n = points.len() as f64;
    let mean = points.iter().fold([0.0; 2], |m, p| [m[0] + p[0], m[1] + p[1]]);
    let mean = [mean[0] / n, mean[1] / n];
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in points {
        let (dx, dy) = (p[0] - mean[0], p[1] - mean[1]);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let denom = n - 1.0;
    let (a, d, b) = (sxx / denom, syy / denom, sxy / denom);
    let trace = a + d;
    if !(trace > 0.0) {
        return Err(Error::DegenerateSegment("zero covariance"));
    }
    let half_gap = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    let l1 = 0.5 * trace + half_gap;
    let l2 = (0.5 * trace - half_gap).max(0.0);
    // two algebraically equivalent eigenvector candidates; keep the better
    // conditioned one
    let c1 = [l1 - d, b];
    let c2 = [b, l1 - a];
    let n1 = c1[0].hypot(c1[1]);
    let n2 = c2[0].hypot(c2[1]);
    let first = if n1 == 0.0 && n2 == 0.0 {
        // isotropic: any direction; pick the x axis
        [1.0, 0.0]
    } else if n1 >= n2 {
        [c1[0] / n1, c1[1] / n1]
    } else {
        [c2[0] / n2, c2[1] / n2]
    };
    Ok(PrincipalAxes {
        mean,
        values: [l1, l2],
        first,
    })
}

/// Routes scaled points to an axis family and builds the comparison curve.
pub fn detect_axis(points: &[[f64; 2]], pve_cutoff: f64) -> Result<GestureCurve> {
    let pa = principal_axes(points)?;
    let pve = pa.values[0] / (pa.values[0] + pa.values[1]);
    if pve <= pve_cutoff {
        return Ok(GestureCurve {
            points: points.to_vec(),
            axis_class: AxisClass::BothAxes,
            pve,
            principal_series: None,
        });
    }
    let [ex, ey] = pa.first;
    let (axis_class, loading) = if ex.abs() >= ey.abs() {
        (AxisClass::XAxis, ex)
    } else {
        (AxisClass::YAxis, ey)
    };
    let dir = if loading < 0.0 { [-ex, -ey] } else { [ex, ey] };
    let proj: Vec<f64> = points
        .iter()
        .map(|p| (p[0] - pa.mean[0]) * dir[0] + (p[1] - pa.mean[1]) * dir[1])
        .collect();
    let lo = proj.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = proj.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    if !(range > 0.0) {
        return Err(Error::DegenerateSegment("flat principal series"));
    }
    Ok(GestureCurve {
        points: points.to_vec(),
        axis_class,
        pve,
        principal_series: Some(proj.iter().map(|v| (v - lo) / range).collect()),
    })
}

/// Full normalization of one letter segment.
pub fn gesture_curve(segment: &LetterSegment, config: &SmoothingConfig) -> Result<GestureCurve> {
    let t: Vec<f64> = segment.samples.iter().map(|s| s.t).collect();
    let x: Vec<f64> = segment.samples.iter().map(|s| s.ax).collect();
    let y: Vec<f64> = segment.samples.iter().map(|s| s.ay).collect();
    let penalty = config.penalty();
    let sx = smooth_axis(&t, &x, penalty)?;
    let sy = smooth_axis(&t, &y, penalty)?;
    let raw = resample_100(&sx, &sy, sx.t_range());
    let scaled = scale_unit_square(&raw)?;
    detect_axis(&scaled, config.pve_cutoff)
}
