//! Single-panel SVG line plot of an envelope's intensity against τ.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::propagation::EnvelopeField;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 55.0;
const TICKS: usize = 5;

/// Renders |ε|² (solid) and the incident |ε_in|² (dashed) in units of ε_p².
pub fn render_svg(field: &EnvelopeField) -> Result<String> {
    if field.tau.is_empty() {
        return Err(Error::InvalidParameter("plot: empty field".into()));
    }
    let norm = field
        .incident
        .iter()
        .map(|v| v.norm_sqr())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let out: Vec<f64> = field.values.iter().map(|v| v.norm_sqr() / norm).collect();
    let inc: Vec<f64> = field.incident.iter().map(|v| v.norm_sqr() / norm).collect();

    let x0 = field.tau[0];
    let x1 = *field.tau.last().unwrap();
    let xspan = if x1 > x0 { x1 - x0 } else { 1.0 };
    let ymax = out.iter().chain(&inc).copied().fold(0.0, f64::max);
    let ymax = if ymax > 0.0 { 1.05 * ymax } else { 1.0 };

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |t: f64| LEFT + pw * (t - x0) / xspan;
    let py = |y: f64| TOP + ph * (1.0 - y / ymax);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for k in 0..=TICKS {
        let f = k as f64 / TICKS as f64;
        let t = x0 + f * xspan;
        let x = px(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{:.1}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 20.0,
            t * 1e12
        );
        let yv = f * ymax;
        let y = py(yv);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{yv:.3}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">τ (ps)</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">|ε|² / ε_p²</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    let line = |ys: &[f64]| {
        let mut pts = String::new();
        for (t, y) in field.tau.iter().zip(ys) {
            let _ = write!(pts, "{:.2},{:.2} ", px(*t), py(*y));
        }
        pts.pop();
        pts
    };
    let _ = writeln!(
        s,
        r##"<polyline fill="none" stroke="#888888" stroke-dasharray="6 4" points="{}"/>"##,
        line(&inc)
    );
    let _ = writeln!(
        s,
        r##"<polyline fill="none" stroke="#1f4e9c" stroke-width="1.2" points="{}"/>"##,
        line(&out)
    );
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_plot(field: &EnvelopeField, path: &Path) -> Result<()> {
    std::fs::write(path, render_svg(field)?)?;
    Ok(())
}
