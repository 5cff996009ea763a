use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 48.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
}

impl AxisRange {
    /// Smallest range covering `values`, widened by one unit when flat.
    /// `None` for an empty input.
    pub fn covering(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.into_iter().filter(|v| v.is_finite()) {
            min = min.min(v);
            max = max.max(v);
        }
        if min > max {
            return None;
        }
        if min == max {
            max = min + 1.0;
        }
        Some(Self { min, max })
    }

    pub fn contains(&self, v: f64) -> bool {
        self.min <= v && v <= self.max
    }

    fn project(&self, v: f64, lo: f64, hi: f64) -> f64 {
        lo + (v - self.min) / (self.max - self.min) * (hi - lo)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChartKind {
    Line,
    Bar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub kind: ChartKind,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
    /// Text for the first and last x tick; numeric values when unset.
    pub x_tick_labels: Option<(String, String)>,
}

impl Chart {
    pub fn new(kind: ChartKind, title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self {
            kind,
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            points: Vec::new(),
            x_tick_labels: None,
        }
    }

    pub fn with_points(mut self, points: Vec<(f64, f64)>) -> Self {
        self.points = points;
        self
    }

    pub fn x_range(&self) -> Option<AxisRange> {
        let r = AxisRange::covering(self.points.iter().map(|p| p.0))?;
        Some(match self.kind {
            ChartKind::Line => r,
            ChartKind::Bar => AxisRange {
                min: r.min - 0.5,
                max: r.max + 0.5,
            },
        })
    }

    /// Bars grow from zero, so a bar chart's y range always includes it.
    pub fn y_range(&self) -> Option<AxisRange> {
        let ys = self.points.iter().map(|p| p.1);
        match self.kind {
            ChartKind::Line => AxisRange::covering(ys),
            ChartKind::Bar => AxisRange::covering(ys.chain([0.0])),
        }
    }

    /// Standalone SVG document; `None` when there is nothing to plot.
    pub fn to_svg(&self) -> Option<String> {
        let (xr, yr) = (self.x_range()?, self.y_range()?);
        let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN / 2.0, MARGIN, HEIGHT - MARGIN);
        let px = |x: f64| xr.project(x, left, right);
        let py = |y: f64| yr.project(y, bottom, top);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            MARGIN / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            s,
            r#"<path d="M{left:.1},{top:.1} L{left:.1},{bottom:.1} L{right:.1},{bottom:.1}" stroke="black" fill="none"/>"#
        );
        let (x_lo, x_hi) = match &self.x_tick_labels {
            Some((a, b)) => (a.clone(), b.clone()),
            None => (fmt_tick(xr.min), fmt_tick(xr.max)),
        };
        let _ = writeln!(s, r#"<text x="{left:.1}" y="{:.1}" text-anchor="start">{}</text>"#, bottom + 14.0, escape(&x_lo));
        let _ = writeln!(s, r#"<text x="{right:.1}" y="{:.1}" text-anchor="end">{}</text>"#, bottom + 14.0, escape(&x_hi));
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, left - 4.0, bottom, fmt_tick(yr.min));
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, left - 4.0, top + 4.0, fmt_tick(yr.max));
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            (left + right) / 2.0,
            HEIGHT - 8.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="12" y="{:.1}" text-anchor="middle" transform="rotate(-90 12 {:.1})">{}</text>"#,
            (top + bottom) / 2.0,
            (top + bottom) / 2.0,
            escape(&self.y_label)
        );

        match self.kind {
            ChartKind::Line => {
                let path: Vec<String> = self
                    .points
                    .iter()
                    .enumerate()
                    .map(|(i, &(x, y))| format!("{}{:.1},{:.1}", if i == 0 { 'M' } else { 'L' }, px(x), py(y)))
                    .collect();
                let _ = writeln!(s, r#"<path d="{}" stroke="steelblue" fill="none"/>"#, path.join(" "));
            }
            ChartKind::Bar => {
                let slot = (right - left) / (xr.max - xr.min);
                let base = py(0.0);
                for &(x, y) in &self.points {
                    let (y0, y1) = (py(y).min(base), py(y).max(base));
                    let _ = writeln!(
                        s,
                        r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="steelblue"/>"#,
                        px(x) - slot * 0.4,
                        y0,
                        slot * 0.8,
                        y1 - y0
                    );
                }
            }
        }
        s.push_str("</svg>\n");
        Some(s)
    }
}

fn fmt_tick(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
