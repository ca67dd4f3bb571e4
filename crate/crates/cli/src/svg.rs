//! Minimal SVG line charts and heatmaps.

use std::fmt::Write;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub fn palette(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Padded `(min, max)` of some values, never empty.
pub fn extent(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .into_iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.04 * (hi - lo);
    (lo - pad, hi + pad)
}

/// A single plot area with data coordinates mapped onto it.
pub struct Chart {
    width: f64,
    height: f64,
    left: f64,
    top: f64,
    plot_w: f64,
    plot_h: f64,
    x: (f64, f64),
    y: (f64, f64),
    body: String,
}

impl Chart {
    pub fn new(width: f64, height: f64, x: (f64, f64), y: (f64, f64)) -> Self {
        let (left, right, top, bottom) = (64.0, 24.0, 36.0, 48.0);
        Self {
            width,
            height,
            left,
            top,
            plot_w: width - left - right,
            plot_h: height - top - bottom,
            x,
            y,
            body: String::new(),
        }
    }

    fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x.0) / (self.x.1 - self.x.0) * self.plot_w
    }

    fn py(&self, y: f64) -> f64 {
        self.top + self.plot_h - (y - self.y.0) / (self.y.1 - self.y.0) * self.plot_h
    }

    pub fn frame(&mut self, title: &str, x_label: &str, y_label: &str) {
        let (l, t, w, h) = (self.left, self.top, self.plot_w, self.plot_h);
        let _ = writeln!(
            self.body,
            r##"<rect class="frame" x="{l:.2}" y="{t:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="#444"/>"##
        );
        let _ = writeln!(
            self.body,
            r#"<text class="title" x="{:.2}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            self.width / 2.0,
            escape(title)
        );
        let _ = writeln!(
            self.body,
            r#"<text class="xlabel" x="{:.2}" y="{:.2}" text-anchor="middle" font-size="12">{}</text>"#,
            l + w / 2.0,
            self.height - 10.0,
            escape(x_label)
        );
        let _ = writeln!(
            self.body,
            r#"<text class="ylabel" transform="translate(16,{:.2}) rotate(-90)" text-anchor="middle" font-size="12">{}</text>"#,
            t + h / 2.0,
            escape(y_label)
        );
        for (i, frac) in [0.0, 0.5, 1.0].into_iter().enumerate() {
            let xv = self.x.0 + frac * (self.x.1 - self.x.0);
            let yv = self.y.0 + frac * (self.y.1 - self.y.0);
            let anchor = ["start", "middle", "end"][i];
            let _ = writeln!(
                self.body,
                r#"<text class="tick" x="{:.2}" y="{:.2}" text-anchor="{anchor}" font-size="10">{}</text>"#,
                self.px(xv),
                t + h + 14.0,
                tick(xv)
            );
            let _ = writeln!(
                self.body,
                r#"<text class="tick" x="{:.2}" y="{:.2}" text-anchor="end" font-size="10">{}</text>"#,
                l - 4.0,
                self.py(yv) + 3.0,
                tick(yv)
            );
        }
    }

    /// A polyline through `points`, in data coordinates.
    pub fn path(&mut self, points: &[[f64; 2]], class: &str, color: &str, label: Option<&str>) {
        let mut d = String::with_capacity(points.len() * 16);
        for (i, p) in points.iter().filter(|p| p[0].is_finite() && p[1].is_finite()).enumerate() {
            let _ = write!(d, "{}{:.2} {:.2}", if i == 0 { "M" } else { " L" }, self.px(p[0]), self.py(p[1]));
        }
        let title = label.map(|l| format!("<title>{}</title>", escape(l))).unwrap_or_default();
        let _ = writeln!(
            self.body,
            r#"<path class="{class}" d="{d}" fill="none" stroke="{color}" stroke-width="1.5">{title}</path>"#
        );
    }

    /// Horizontal line across the plot at data height `y`, labelled at the right end.
    pub fn hline(&mut self, y: f64, class: &str, color: &str, label: &str) {
        let py = self.py(y);
        let (x0, x1) = (self.left, self.left + self.plot_w);
        let _ = writeln!(
            self.body,
            r#"<line class="{class}" x1="{x0:.2}" y1="{py:.2}" x2="{x1:.2}" y2="{py:.2}" stroke="{color}" stroke-dasharray="6 3"/>"#
        );
        let _ = writeln!(
            self.body,
            r#"<text class="{class}-label" x="{:.2}" y="{:.2}" text-anchor="end" font-size="11" fill="{color}">{}</text>"#,
            x1 - 4.0,
            py - 4.0,
            escape(label)
        );
    }

    /// Shaded vertical band between data x positions.
    pub fn band(&mut self, x0: f64, x1: f64, class: &str) {
        let (a, b) = (self.px(x0), self.px(x1));
        let _ = writeln!(
            self.body,
            r##"<rect class="{class}" x="{a:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#2ca02c" fill-opacity="0.12"/>"##,
            self.top,
            (b - a).max(0.0),
            self.plot_h
        );
    }

    pub fn legend(&mut self, entries: &[(&str, &str)]) {
        for (i, (label, color)) in entries.iter().enumerate() {
            let y = self.top + 14.0 + 14.0 * i as f64;
            let x = self.left + 8.0;
            let _ = writeln!(
                self.body,
                r#"<line class="legend" x1="{x:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
                y - 4.0,
                x + 18.0,
                y - 4.0,
                x + 22.0,
                y,
                escape(label)
            );
        }
    }

    pub fn finish(self) -> String {
        document(self.width, self.height, &self.body)
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.2}")
    }
}

fn document(width: f64, height: f64, body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\" font-family=\"sans-serif\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}

/// Blue at 0 through green and yellow to red at 1.
pub fn spectrum(t: f64) -> (u8, u8, u8) {
    let hue = 240.0 * (1.0 - t.clamp(0.0, 1.0));
    let x = 1.0 - ((hue / 60.0) % 2.0 - 1.0).abs();
    let (r, g, b) = match (hue / 60.0) as u32 {
        0 => (1.0, x, 0.0),
        1 => (x, 1.0, 0.0),
        2 => (0.0, 1.0, x),
        3 => (0.0, x, 1.0),
        _ => (x, 0.0, 1.0),
    };
    let c = |v: f64| (v * 255.0).round() as u8;
    (c(r), c(g), c(b))
}

/// Square matrix as coloured cells; `labels` name rows and columns.
pub fn heatmap(title: &str, labels: &[String], values: &[Vec<f64>]) -> String {
    let n = labels.len().max(1);
    let cell = (640.0 / n as f64).clamp(2.0, 24.0);
    let (left, top) = (80.0, 48.0);
    let side = cell * n as f64;
    let width = left + side + 90.0;
    let height = top + side + 40.0;
    let max = values.iter().flatten().copied().fold(0.0, f64::max);
    let mut body = String::new();
    let _ = writeln!(
        body,
        r#"<text class="title" x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        width / 2.0,
        escape(title)
    );
    for (i, row) in values.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let (r, g, b) = spectrum(if max > 0.0 { v / max } else { 0.0 });
            let _ = writeln!(
                body,
                r##"<rect class="cell" x="{:.1}" y="{:.1}" width="{cell:.2}" height="{cell:.2}" fill="#{r:02x}{g:02x}{b:02x}"/>"##,
                left + j as f64 * cell,
                top + i as f64 * cell,
            );
        }
    }
    // one row label per run of identical letters
    let mut i = 0;
    while i < labels.len() {
        let key = labels[i].split(':').next().unwrap_or("");
        let mut j = i;
        while j + 1 < labels.len() && labels[j + 1].split(':').next() == Some(key) {
            j += 1;
        }
        let mid = top + (i + j + 1) as f64 * cell / 2.0;
        let _ = writeln!(
            body,
            r#"<text class="row-label" x="{:.2}" y="{:.2}" text-anchor="end" font-size="11">{}</text>"#,
            left - 6.0,
            mid + 4.0,
            escape(key)
        );
        i = j + 1;
    }
    // colour bar
    let bar_x = left + side + 24.0;
    for k in 0..50 {
        let t = k as f64 / 49.0;
        let (r, g, b) = spectrum(1.0 - t);
        let _ = writeln!(
            body,
            r#"<rect class="scale" x="{bar_x:.2}" y="{:.2}" width="14" height="{:.2}" fill="rgb({r},{g},{b})"/>"#,
            top + t * side,
            side / 50.0 + 0.5
        );
    }
    let _ = writeln!(
        body,
        r#"<text x="{:.2}" y="{:.2}" font-size="10">{}</text><text x="{:.2}" y="{:.2}" font-size="10">0</text>"#,
        bar_x + 18.0,
        top + 8.0,
        tick(max),
        bar_x + 18.0,
        top + side
    );
    document(width, height, &body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_ends() {
        assert_eq!(spectrum(0.0), (0, 0, 255));
        assert_eq!(spectrum(1.0), (255, 0, 0));
        assert_eq!(spectrum(0.5), (0, 255, 0));
    }

    #[test]
    fn chart_maps_data_to_plot_area() {
        let mut c = Chart::new(400.0, 300.0, (0.0, 10.0), (0.0, 1.0));
        c.path(&[[0.0, 0.0], [10.0, 1.0]], "series", "#000", None);
        let svg = c.finish();
        assert!(svg.contains(r#"d="M64.00 252.00 L376.00 36.00""#), "{svg}");
    }

    #[test]
    fn text_is_escaped() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }
}
