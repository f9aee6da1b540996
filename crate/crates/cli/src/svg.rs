//! Minimal SVG 1.1 line plots: axes with ticks, polylines, and a legend.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::CliError;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

/// Polyline points kept per series.
const MAX_POINTS: usize = 1500;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub dashed: bool,
    /// Palette index, so solid and dashed curves of one parameter share a color.
    pub color: usize,
    pub width: f64,
}

impl Series {
    pub fn new(label: impl Into<String>, xs: Vec<f64>, ys: Vec<f64>) -> Self {
        Series {
            label: label.into(),
            xs,
            ys,
            dashed: false,
            color: 0,
            width: 1.5,
        }
    }

    pub fn dashed(mut self, dashed: bool) -> Self {
        self.dashed = dashed;
        self
    }

    pub fn color(mut self, color: usize) -> Self {
        self.color = color;
        self
    }

    pub fn width(mut self, width: f64) -> Self {
        self.width = width;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub series: Vec<Series>,
    /// Written into an XML comment at the top of the document.
    pub comment: String,
    pub width: f64,
    pub height: f64,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Round tick positions covering `[lo, hi]`.
fn linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

impl Plot {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Plot {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            log_y: false,
            series: Vec::new(),
            comment: String::new(),
            width: 760.0,
            height: 480.0,
        }
    }

    fn y_value(&self, y: f64) -> Option<f64> {
        if !y.is_finite() {
            None
        } else if self.log_y {
            (y > 0.0).then(|| y.log10())
        } else {
            Some(y)
        }
    }

    fn bounds(&self) -> ((f64, f64), (f64, f64)) {
        let mut x = (f64::INFINITY, f64::NEG_INFINITY);
        let mut y = (f64::INFINITY, f64::NEG_INFINITY);
        for s in &self.series {
            for (&xv, &yv) in s.xs.iter().zip(&s.ys) {
                if let (true, Some(yv)) = (xv.is_finite(), self.y_value(yv)) {
                    x = (x.0.min(xv), x.1.max(xv));
                    y = (y.0.min(yv), y.1.max(yv));
                }
            }
        }
        if !x.0.is_finite() {
            x = (0.0, 1.0);
            y = (0.0, 1.0);
        }
        if x.1 <= x.0 {
            x.1 = x.0 + 1.0;
        }
        if self.log_y {
            // at most twelve decades below the top
            y.0 = y.0.max(y.1 - 12.0).floor();
            y.1 = y.1.ceil();
        }
        if y.1 <= y.0 {
            y = (y.0 - 0.5, y.1 + 0.5);
        }
        (x, y)
    }

    pub fn render(&self) -> String {
        let (left, right, top, bottom) = (80.0, 180.0, 40.0, 60.0);
        let pw = self.width - left - right;
        let ph = self.height - top - bottom;
        let ((x0, x1), (y0, y1)) = self.bounds();
        let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| top + ph - (y.clamp(y0, y1) - y0) / (y1 - y0) * ph;

        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(out, "<!-- {} -->", self.comment.replace("--", "- -"));
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" font-family=\"sans-serif\" font-size=\"12\">",
            self.width, self.height, self.width, self.height
        );
        let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>",
            left + pw / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            "<rect x=\"{left}\" y=\"{top}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"black\"/>"
        );

        for t in linear_ticks(x0, x1) {
            let x = sx(t);
            let _ = writeln!(
                out,
                "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"black\"/><text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
                top + ph,
                top + ph + 5.0,
                top + ph + 18.0,
                tick_label(t)
            );
        }
        let y_ticks = if self.log_y {
            let step = ((y1 - y0) / 6.0).ceil().max(1.0);
            let mut v = Vec::new();
            let mut t = y0;
            while t <= y1 + 1e-9 {
                v.push(t);
                t += step;
            }
            v
        } else {
            linear_ticks(y0, y1)
        };
        for t in y_ticks {
            let y = sy(t);
            let label = if self.log_y {
                format!("1e{}", t.round() as i64)
            } else {
                tick_label(t)
            };
            let _ = writeln!(
                out,
                "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{left}\" y2=\"{y:.2}\" stroke=\"black\"/><text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{label}</text>",
                left - 5.0,
                left - 8.0,
                y + 4.0
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            left + pw / 2.0,
            self.height - 15.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            "<text x=\"20\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {})\">{}</text>",
            top + ph / 2.0,
            top + ph / 2.0,
            escape(&self.y_label)
        );

        for s in &self.series {
            let color = PALETTE[s.color % PALETTE.len()];
            let dash = if s.dashed { " stroke-dasharray=\"6,4\"" } else { "" };
            let stride = (s.xs.len() / MAX_POINTS).max(1);
            let mut segment: Vec<String> = Vec::new();
            let flush = |segment: &mut Vec<String>, out: &mut String| {
                if segment.len() > 1 {
                    let _ = writeln!(
                        out,
                        "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"{}\"{dash} points=\"{}\"/>",
                        s.width,
                        segment.join(" ")
                    );
                }
                segment.clear();
            };
            let n = s.xs.len().min(s.ys.len());
            let mut after_gap = true;
            for i in 0..n {
                match (s.xs[i].is_finite(), self.y_value(s.ys[i])) {
                    (true, Some(y)) => {
                        if after_gap || i % stride == 0 || i + 1 == n {
                            segment.push(format!("{:.2},{:.2}", sx(s.xs[i]), sy(y)));
                        }
                        after_gap = false;
                    }
                    _ => {
                        flush(&mut segment, &mut out);
                        after_gap = true;
                    }
                }
            }
            flush(&mut segment, &mut out);
        }

        for (i, s) in self.series.iter().enumerate() {
            let y = top + 12.0 + 18.0 * i as f64;
            let x = left + pw + 12.0;
            let color = PALETTE[s.color % PALETTE.len()];
            let dash = if s.dashed { " stroke-dasharray=\"6,4\"" } else { "" };
            let _ = writeln!(
                out,
                "<line x1=\"{x}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"{color}\" stroke-width=\"{}\"{dash}/><text x=\"{}\" y=\"{}\">{}</text>",
                x + 28.0,
                s.width,
                x + 34.0,
                y + 4.0,
                escape(&s.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.render()).map_err(|e| CliError::io(path, e))
    }
}
