use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::RunError;

/// One decimal digit more than needed to round-trip any double.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// `t,value` rows, one per sample.
pub fn series_csv(times: &[f64], values: &[f64]) -> String {
    let mut out = String::from("t,value\n");
    for (t, v) in times.iter().zip(values) {
        let _ = writeln!(out, "{},{}", format_value(*t), format_value(*v));
    }
    out
}

/// Output directory layout of one scenario.
#[derive(Debug, Clone)]
pub struct ArtifactDir {
    root: PathBuf,
}

impl ArtifactDir {
    pub fn create(root: &Path) -> Result<Self, RunError> {
        for sub in ["", "series", "plots"] {
            let dir = root.join(sub);
            fs::create_dir_all(&dir).map_err(|e| RunError::io(&dir, e))?;
        }
        Ok(Self { root: root.to_path_buf() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn write(&self, rel: &str, contents: &str) -> Result<(), RunError> {
        let path = self.root.join(rel);
        fs::write(&path, contents).map_err(|e| RunError::io(&path, e))
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), RunError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn write_series(&self, label: &str, times: &[f64], values: &[f64]) -> Result<(), RunError> {
        self.write(&format!("series/{label}.csv"), &series_csv(times, values))
    }

    pub fn write_plot(&self, label: &str, plot: &LogLogPlot) -> Result<(), RunError> {
        self.write(&format!("plots/{label}.svg"), &plot.render())
    }
}

/// A straight line of given slope in log-log coordinates through `(t0, v0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeGuide {
    pub slope: f64,
    pub t0: f64,
    pub v0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogLogPlot {
    pub title: String,
    pub curves: Vec<(String, Vec<f64>, Vec<f64>)>,
    pub guide: Option<SlopeGuide>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

impl LogLogPlot {
    /// Standalone SVG. Non-positive samples are skipped.
    pub fn render(&self) -> String {
        let points: Vec<(f64, f64)> = self
            .curves
            .iter()
            .flat_map(|(_, t, v)| t.iter().zip(v).map(|(a, b)| (*a, *b)))
            .filter(|(t, v)| *t > 0.0 && *v > 0.0 && t.is_finite() && v.is_finite())
            .map(|(t, v)| (t.log10(), v.log10()))
            .collect();
        let mut svg = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">{}</text>",
            WIDTH / 2.0,
            escape(&self.title)
        );
        if points.is_empty() {
            svg.push_str("</svg>\n");
            return svg;
        }
        let (mut x0, mut x1, mut y0, mut y1) = points.iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
        );
        x0 = x0.floor();
        x1 = x1.ceil().max(x0 + 1.0);
        y0 = y0.floor();
        y1 = y1.ceil().max(y0 + 1.0);
        let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
        let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
        let _ = writeln!(
            svg,
            "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
            WIDTH - 2.0 * MARGIN,
            HEIGHT - 2.0 * MARGIN
        );
        for d in (x0 as i64)..=(x1 as i64) {
            let x = sx(d as f64);
            let _ = writeln!(
                svg,
                "<text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">1e{d}</text>",
                HEIGHT - MARGIN + 16.0
            );
        }
        for d in (y0 as i64)..=(y1 as i64) {
            let y = sy(d as f64);
            let _ = writeln!(
                svg,
                "<text x=\"{:.1}\" y=\"{y:.1}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e{d}</text>",
                MARGIN - 6.0
            );
        }
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">t</text>",
            WIDTH / 2.0,
            HEIGHT - 16.0
        );
        for (k, (name, t, v)) in self.curves.iter().enumerate() {
            let pts: Vec<String> = t
                .iter()
                .zip(v)
                .filter(|(a, b)| **a > 0.0 && **b > 0.0)
                .map(|(a, b)| format!("{:.2},{:.2}", sx(a.log10()), sy(b.log10())))
                .collect();
            let color = COLORS[k % COLORS.len()];
            let _ = writeln!(
                svg,
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
                pts.join(" ")
            );
            let _ = writeln!(
                svg,
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\">{}</text>",
                MARGIN + 8.0,
                MARGIN + 16.0 + 14.0 * k as f64,
                escape(name)
            );
        }
        if let Some(g) = self.guide.filter(|g| g.t0 > 0.0 && g.v0 > 0.0) {
            let at = |x: f64| g.v0.log10() + g.slope * (x - g.t0.log10());
            let _ = writeln!(
                svg,
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>",
                sx(x0),
                sy(at(x0)),
                sx(x1),
                sy(at(x1))
            );
            let _ = writeln!(
                svg,
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"gray\">predicted slope {:.4}</text>",
                MARGIN + 8.0,
                MARGIN + 16.0 + 14.0 * self.curves.len() as f64,
                g.slope
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
