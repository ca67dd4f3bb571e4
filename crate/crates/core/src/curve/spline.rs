//! Cubic smoothing spline (Reinsch).
//!
//! Minimizes `Σ (y_i - f(t_i))² + λ ∫ f''(u)² du` over natural cubic splines
//! with knots at the distinct data times. With `h_i` the knot gaps, `Q` the
//! `n × (n-2)` second-difference matrix and `R` the `(n-2) × (n-2)`
//! tridiagonal Gram matrix, the second derivatives `γ` at the interior knots
//! solve the pentadiagonal system
//!
//! ```text
//! (R + λ QᵀQ) γ = Qᵀ y
//! ```
//!
//! and the fitted knot values are `g = y - λ Q γ`, solved in banded form.
//!
//! Times are mapped affinely onto `[0, 1]` before fitting, so `λ` (and
//! therefore `spar`) is independent of the time unit.

use crate::error::{Error, Result};

/// How the roughness penalty is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Penalty {
    /// `λ = r · 256^(3·spar − 1)` with `r` computed the way R's
    /// `smooth.spline` does (see [`spar_ratio`]).
    Spar(f64),
    /// Explicit `λ` on the unit-interval time scale.
    Lambda(f64),
}

/// A fitted natural cubic smoothing spline.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingSpline {
    t0: f64,
    span: f64,
    knots: Vec<f64>,
    fitted: Vec<f64>,
    second: Vec<f64>,
    lambda: f64,
}

impl SmoothingSpline {
    /// Fits a smoothing spline; repeated times are collapsed to their mean value.
    pub fn fit(times: &[f64], values: &[f64], penalty: Penalty) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Shape(times.len(), values.len()));
        }
        if times.iter().chain(values).any(|v| !v.is_finite()) {
            return Err(Error::Format("non-finite spline input".into()));
        }
        let (t, y) = collapse_duplicates(times, values);
        let n = t.len();
        if n < 4 {
            return Err(Error::TooFewPoints(n));
        }
        let t0 = t[0];
        let span = t[n - 1] - t0;
        let knots: Vec<f64> = t.iter().map(|&ti| (ti - t0) / span).collect();
        let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
        if h.iter().any(|&hi| hi <= 0.0) {
            return Err(Error::TooFewPoints(n));
        }

        let lambda = match penalty {
            Penalty::Lambda(l) => l,
            Penalty::Spar(spar) => {
                spar_ratio(&knots) * 256f64.powf(3.0 * spar - 1.0)
            }
        };
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::Config(format!("invalid smoothing penalty {lambda}")));
        }

        let m = n - 2;
        let qtq = qtq_band(&h);
        let r = r_band(&h);
        let mut a = BandedSpd::zeros(m, 2);
        for i in 0..m {
            for d in 0..=2 {
                a.set(i, d, r.get(i, d) + lambda * qtq.get(i, d));
            }
        }
        a.factor()?;
        let mut gamma = qt_mul(&h, &y);
        a.solve(&mut gamma);

        let mut second = vec![0.0; n];
        second[1..n - 1].copy_from_slice(&gamma);
        let qg = q_mul(&h, &second);
        let fitted = y.iter().zip(&qg).map(|(yi, qi)| yi - lambda * qi).collect();

        Ok(Self {
            t0,
            span,
            knots,
            fitted,
            second,
            lambda,
        })
    }

    /// Penalty actually used, on the unit-interval time scale.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Fitted values at the (deduplicated) knots.
    pub fn fitted(&self) -> &[f64] {
        &self.fitted
    }

    /// Knot times in the original unit.
    pub fn knot_times(&self) -> Vec<f64> {
        self.knots.iter().map(|u| self.t0 + u * self.span).collect()
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.t0, self.t0 + self.span)
    }

    /// `∫ f''(u)² du` on the unit-interval time scale, i.e. `γᵀ R γ`.
    pub fn roughness(&self) -> f64 {
        let n = self.knots.len();
        let mut acc = 0.0;
        for i in 0..n - 1 {
            let h = self.knots[i + 1] - self.knots[i];
            let (a, b) = (self.second[i], self.second[i + 1]);
            acc += h * (a * a + a * b + b * b) / 3.0;
        }
        acc
    }

    /// Evaluates the spline at time `t` (original unit); `t` is clamped to the
    /// knot range.
    pub fn eval(&self, t: f64) -> f64 {
        let u = ((t - self.t0) / self.span).clamp(0.0, 1.0);
        let n = self.knots.len();
        let i = self
            .knots
            .partition_point(|&k| k <= u)
            .saturating_sub(1)
            .min(n - 2);
        let (ul, ur) = (self.knots[i], self.knots[i + 1]);
        let h = ur - ul;
        let (a, b) = (u - ul, ur - u);
        let (gl, gr) = (self.fitted[i], self.fitted[i + 1]);
        let (cl, cr) = (self.second[i], self.second[i + 1]);
        (a * gr + b * gl) / h - a * b / 6.0 * ((1.0 + a / h) * cr + (1.0 + b / h) * cl)
    }
}

fn collapse_duplicates(times: &[f64], values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut pairs: Vec<(f64, f64)> = times.iter().copied().zip(values.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut t = Vec::with_capacity(pairs.len());
    let mut y = Vec::with_capacity(pairs.len());
    let mut i = 0;
    while i < pairs.len() {
        let mut j = i + 1;
        while j < pairs.len() && pairs[j].0 == pairs[i].0 {
            j += 1;
        }
        let sum: f64 = pairs[i..j].iter().map(|p| p.1).sum();
        t.push(pairs[i].0);
        y.push(sum / (j - i) as f64);
        i = j;
    }
    (t, y)
}

/// Column `j` (interior knot `j + 1`) of `Q` has entries at knots `j, j+1, j+2`.
fn q_column(h: &[f64], j: usize) -> [f64; 3] {
    let (hl, hr) = (h[j], h[j + 1]);
    [1.0 / hl, -1.0 / hl - 1.0 / hr, 1.0 / hr]
}

fn qt_mul(h: &[f64], y: &[f64]) -> Vec<f64> {
    (0..h.len() - 1)
        .map(|j| {
            let q = q_column(h, j);
            q[0] * y[j] + q[1] * y[j + 1] + q[2] * y[j + 2]
        })
        .collect()
}

/// `Q γ` where `gamma` has length `n` with zero end entries.
fn q_mul(h: &[f64], gamma: &[f64]) -> Vec<f64> {
    let n = gamma.len();
    let mut out = vec![0.0; n];
    for j in 0..n - 2 {
        let q = q_column(h, j);
        let g = gamma[j + 1];
        out[j] += q[0] * g;
        out[j + 1] += q[1] * g;
        out[j + 2] += q[2] * g;
    }
    out
}

fn r_band(h: &[f64]) -> BandedSpd {
    let m = h.len() - 1;
    let mut r = BandedSpd::zeros(m, 2);
    for j in 0..m {
        r.set(j, 0, (h[j] + h[j + 1]) / 3.0);
        if j + 1 < m {
            r.set(j, 1, h[j + 1] / 6.0);
        }
    }
    r
}

fn qtq_band(h: &[f64]) -> BandedSpd {
    let m = h.len() - 1;
    let mut b = BandedSpd::zeros(m, 2);
    for j in 0..m {
        let qj = q_column(h, j);
        for d in 0..=2 {
            if j + d >= m {
                break;
            }
            let qk = q_column(h, j + d);
            // column j covers knots j..j+2, column j+d covers j+d..j+d+2
            let dot: f64 = (d..3).map(|r| qj[r] * qk[r - d]).sum();
            b.set(j, d, dot);
        }
    }
    b
}

/// Number of inner knots R's `smooth.spline` keeps for `n` distinct points.
fn thinned_knot_count(n: usize) -> usize {
    if n < 50 {
        return n;
    }
    let (a1, a2, a3, a4) = (50f64.log2(), 100f64.log2(), 140f64.log2(), 200f64.log2());
    let nf = n as f64;
    let k = if n < 200 {
        2f64.powf(a1 + (a2 - a1) * (nf - 50.0) / 150.0)
    } else if n < 800 {
        2f64.powf(a2 + (a3 - a2) * (nf - 200.0) / 600.0)
    } else if n < 3200 {
        2f64.powf(a3 + (a4 - a3) * (nf - 800.0) / 2400.0)
    } else {
        200.0 + (nf - 3200.0).powf(0.2)
    };
    k.trunc() as usize
}

/// Values and second derivatives of the four cubic B-splines that are
/// nonzero on knot span `span` (basis `span - 3 ..= span`), at `u`.
fn cubic_basis(knots: &[f64], span: usize, u: f64) -> ([f64; 4], [f64; 4]) {
    const P: usize = 3;
    let mut ndu = [[0.0f64; P + 1]; P + 1];
    let mut left = [0.0; P + 1];
    let mut right = [0.0; P + 1];
    ndu[0][0] = 1.0;
    for j in 1..=P {
        left[j] = u - knots[span + 1 - j];
        right[j] = knots[span + j] - u;
        let mut saved = 0.0;
        for r in 0..j {
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    let mut values = [0.0; P + 1];
    let mut second = [0.0; P + 1];
    for j in 0..=P {
        values[j] = ndu[j][P];
    }
    // second derivative via two rounds of divided differences of the
    // degree-1 basis values stored in the upper triangle of `ndu`
    for (r, out) in second.iter_mut().enumerate() {
        let mut a = [[0.0f64; P + 1]; 2];
        let (mut s1, mut s2) = (0, 1);
        a[0][0] = 1.0;
        let mut d = 0.0;
        for k in 1..=2usize {
            d = 0.0;
            let rk = r as isize - k as isize;
            let pk = P - k;
            if rk >= 0 {
                let rk = rk as usize;
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                d = a[s2][0] * ndu[rk][pk];
            }
            let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
            let j2 = if r as isize - 1 <= pk as isize { k - 1 } else { P - r };
            for j in j1..=j2 {
                let col = (rk + j as isize) as usize;
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][col];
                d += a[s2][j] * ndu[col][pk];
            }
            if r <= pk {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            std::mem::swap(&mut s1, &mut s2);
        }
        *out = d * (P * (P - 1)) as f64;
    }
    (values, second)
}

/// R's `spar` scale factor for data at `knots` (distinct, spanning `[0, 1]`):
/// `tr(XᵀX) / tr(Σ)` summed over the interior basis functions, where `X`
/// is the cubic B-spline design matrix on R's thinned knot sequence and `Σ`
/// the Gram matrix of the basis second derivatives.
fn spar_ratio(knots: &[f64]) -> f64 {
    let n = knots.len();
    let inner_count = thinned_knot_count(n);
    let by = (n - 1) as f64 / (inner_count - 1) as f64;
    let inner: Vec<f64> = (0..inner_count)
        .map(|k| {
            if k + 1 == inner_count {
                knots[n - 1]
            } else {
                // R truncates the fractional 1-based index
                knots[(1.0 + k as f64 * by) as usize - 1]
            }
        })
        .collect();
    let mut t = vec![inner[0]; 3];
    t.extend_from_slice(&inner);
    t.extend(std::iter::repeat_n(inner[inner_count - 1], 3));
    let nb = inner_count + 2;
    let last_span = nb - 1;
    let span_of = |u: f64| {
        let upper = t[..=last_span].partition_point(|&k| k <= u);
        upper.saturating_sub(1).clamp(3, last_span)
    };

    let mut xtx = vec![0.0; nb];
    for &u in knots {
        let span = span_of(u);
        let (v, _) = cubic_basis(&t, span, u);
        for (r, b) in v.iter().enumerate() {
            xtx[span - 3 + r] += b * b;
        }
    }
    // B'' is linear on each span, so Simpson's rule is exact
    let mut sigma = vec![0.0; nb];
    for span in 3..=last_span {
        let (lo, hi) = (t[span], t[span + 1]);
        if hi <= lo {
            continue;
        }
        let (_, d_lo) = cubic_basis(&t, span, lo);
        let (_, d_hi) = cubic_basis(&t, span, hi);
        for r in 0..4 {
            let (a, b) = (d_lo[r], d_hi[r]);
            sigma[span - 3 + r] += (hi - lo) * (a * a + a * b + b * b) / 3.0;
        }
    }
    let interior = 2..nb - 3;
    let t1: f64 = xtx[interior.clone()].iter().sum();
    let t2: f64 = sigma[interior].iter().sum();
    t1 / t2
}

/// Symmetric positive definite band matrix; `data[i * (bw + 1) + d]` holds
/// `A[i][i + d]`. After [`BandedSpd::factor`] the same slots hold the
/// Cholesky factor `L[i + d][i]`.
#[derive(Debug, Clone)]
pub(crate) struct BandedSpd {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedSpd {
    pub(crate) fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    fn get(&self, i: usize, d: usize) -> f64 {
        self.data[i * (self.bw + 1) + d]
    }

    fn set(&mut self, i: usize, d: usize, v: f64) {
        self.data[i * (self.bw + 1) + d] = v;
    }

    pub(crate) fn factor(&mut self) -> Result<()> {
        let (n, bw) = (self.n, self.bw);
        for j in 0..n {
            let mut diag = self.get(j, 0);
            for k in j.saturating_sub(bw)..j {
                let l = self.get(k, j - k);
                diag -= l * l;
            }
            if !(diag > 0.0) {
                return Err(Error::DegenerateInput("spline system not positive definite"));
            }
            let diag = diag.sqrt();
            self.set(j, 0, diag);
            for d in 1..=bw.min(n - 1 - j) {
                let i = j + d;
                let mut v = self.get(j, d);
                for k in i.saturating_sub(bw)..j {
                    v -= self.get(k, i - k) * self.get(k, j - k);
                }
                self.set(j, d, v / diag);
            }
        }
        Ok(())
    }

    pub(crate) fn solve(&self, b: &mut [f64]) {
        let (n, bw) = (self.n, self.bw);
        for i in 0..n {
            let mut v = b[i];
            for k in i.saturating_sub(bw)..i {
                v -= self.get(k, i - k) * b[k];
            }
            b[i] = v / self.get(i, 0);
        }
        for i in (0..n).rev() {
            let mut v = b[i];
            for d in 1..=bw.min(n - 1 - i) {
                v -= self.get(i, d) * b[i + d];
            }
            b[i] = v / self.get(i, 0);
        }
    }
}
