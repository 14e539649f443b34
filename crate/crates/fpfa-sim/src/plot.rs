//! Minimal static SVG line charts for sweep outputs. The CSV is the
//! authoritative artifact; these exist for quick visual inspection only.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

const WIDTH: f64 = 840.0;
const HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 64.0;

const PALETTE: [&str; 5] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"];

/// One curve: mean line plus an optional (low, high) band per point.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    /// band[i] = (low, high) at points[i].0.
    pub band: Option<Vec<(f64, f64)>>,
}

fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let magnitude = v.abs();
    if !(0.01..10000.0).contains(&magnitude) {
        format!("{v:.1e}")
    } else if magnitude >= 100.0 {
        format!("{v:.0}")
    } else {
        let s = format!("{v:.2}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn from_series(series: &[Series]) -> Self {
        let mut frame = Frame {
            x_min: f64::INFINITY,
            x_max: f64::NEG_INFINITY,
            y_min: f64::INFINITY,
            y_max: f64::NEG_INFINITY,
        };
        for s in series {
            for &(x, y) in &s.points {
                frame.x_min = frame.x_min.min(x);
                frame.x_max = frame.x_max.max(x);
                frame.y_min = frame.y_min.min(y);
                frame.y_max = frame.y_max.max(y);
            }
            if let Some(band) = &s.band {
                for &(lo, hi) in band {
                    frame.y_min = frame.y_min.min(lo);
                    frame.y_max = frame.y_max.max(hi);
                }
            }
        }
        // Degenerate spans still need a drawable window.
        if !frame.x_min.is_finite() {
            frame = Frame {
                x_min: 0.0,
                x_max: 1.0,
                y_min: 0.0,
                y_max: 1.0,
            };
        }
        if frame.x_max - frame.x_min < 1e-12 {
            frame.x_min -= 1.0;
            frame.x_max += 1.0;
        }
        if frame.y_max - frame.y_min < 1e-12 {
            frame.y_min -= 1.0;
            frame.y_max += 1.0;
        }
        let pad = 0.05 * (frame.y_max - frame.y_min);
        frame.y_min -= pad;
        frame.y_max += pad;
        frame
    }

    fn x_px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y_px(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_BOTTOM
            - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

/// Render a line chart into `path`. Overwrites any existing file.
pub fn write_line_chart(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
) -> std::io::Result<()> {
    let frame = Frame::from_series(series);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"14\">"
    );
    let _ = writeln!(svg, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"26\" text-anchor=\"middle\" font-size=\"17\">{}</text>",
        (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
        escape(title)
    );

    let (x0, x1) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
    let (y0, y1) = (HEIGHT - MARGIN_BOTTOM, MARGIN_TOP);
    let _ = write!(
        svg,
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n"
    );

    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let xv = frame.x_min + t * (frame.x_max - frame.x_min);
        let yv = frame.y_min + t * (frame.y_max - frame.y_min);
        let xp = frame.x_px(xv);
        let yp = frame.y_px(yv);
        let _ = write!(
            svg,
            "<line x1=\"{xp:.1}\" y1=\"{y0}\" x2=\"{xp:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n\
             <text x=\"{xp:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
            y0 + 6.0,
            y0 + 24.0,
            fmt_num(xv)
        );
        let _ = write!(
            svg,
            "<line x1=\"{:.1}\" y1=\"{yp:.1}\" x2=\"{x0}\" y2=\"{yp:.1}\" stroke=\"black\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>\n",
            x0 - 6.0,
            x0 - 10.0,
            yp + 5.0,
            fmt_num(yv)
        );
        // Light gridline to make crossovers readable.
        let _ = writeln!(
            svg,
            "<line x1=\"{x0}\" y1=\"{yp:.1}\" x2=\"{x1}\" y2=\"{yp:.1}\" stroke=\"#dddddd\"/>"
        );
    }

    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
        (x0 + x1) / 2.0,
        HEIGHT - 16.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        "<text x=\"20\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.1})\">{}</text>",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );

    for (idx, s) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        if let Some(band) = &s.band {
            if band.len() == s.points.len() && !band.is_empty() {
                let mut poly = String::new();
                for (&(x, _), &(_, hi)) in s.points.iter().zip(band.iter()) {
                    let _ = write!(poly, "{:.1},{:.1} ", frame.x_px(x), frame.y_px(hi));
                }
                for (&(x, _), &(lo, _)) in s.points.iter().zip(band.iter()).rev() {
                    let _ = write!(poly, "{:.1},{:.1} ", frame.x_px(x), frame.y_px(lo));
                }
                let _ = writeln!(
                    svg,
                    "<polygon points=\"{}\" fill=\"{color}\" opacity=\"0.15\"/>",
                    poly.trim_end()
                );
            }
        }
        let mut line = String::new();
        for &(x, y) in &s.points {
            let _ = write!(line, "{:.1},{:.1} ", frame.x_px(x), frame.y_px(y));
        }
        let _ = writeln!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>",
            line.trim_end()
        );
        for &(x, y) in &s.points {
            let _ = writeln!(
                svg,
                "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3\" fill=\"{color}\"/>",
                frame.x_px(x),
                frame.y_px(y)
            );
        }
        let ly = MARGIN_TOP + 22.0 * idx as f64 + 10.0;
        let _ = write!(
            svg,
            "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\">{}</text>\n",
            x1 + 14.0,
            x1 + 44.0,
            x1 + 50.0,
            ly + 5.0,
            escape(&s.name)
        );
    }

    svg.push_str("</svg>\n");
    fs::write(path, svg)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
