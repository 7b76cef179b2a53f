//! SVG plots of the sampled curves in an affine chart.
//!
//! A chart is the level set `<c, v> = 1` of a covector `c`; coordinates are
//! `(v0 / <c, v>, v2 / <c, v>)`. Points of the chart's line at infinity are
//! clipped by the square window `[-w, w]^2`.

use std::fmt::Write;

use nalgebra::Vector3;

use crate::config::RenderConfig;

pub struct Panel {
    pub title: String,
    /// Homogeneous coordinates in curve order, closing up at the end.
    pub curve: Vec<Vector3<f64>>,
}

fn chart(v: &Vector3<f64>, c: &Vector3<f64>) -> Option<(f64, f64, f64)> {
    let w = v.dot(c);
    if w.abs() < 1e-300 {
        return None;
    }
    Some((v[0] / w, v[2] / w, w))
}

/// Polylines in pixel coordinates. A run breaks when the curve leaves the
/// window or crosses the line at infinity.
fn polylines(p: &Panel, cfg: &RenderConfig) -> Vec<Vec<(f64, f64)>> {
    let c = Vector3::from(cfg.chart_covector);
    let win = cfg.window;
    let size = cfg.width_px as f64;
    let px = |u: f64, v: f64| ((u + win) / (2.0 * win) * size, (win - v) / (2.0 * win) * size);

    // consistent signs along the curve so crossings of infinity show up as
    // sign changes of <c, v>
    let mut lifted: Vec<Vector3<f64>> = Vec::with_capacity(p.curve.len() + 1);
    for v in &p.curve {
        let v = match lifted.last() {
            Some(prev) if prev.dot(v) < 0.0 => -v,
            _ => *v,
        };
        lifted.push(v);
    }
    if let Some(first) = lifted.first().copied() {
        let last = *lifted.last().unwrap();
        lifted.push(if last.dot(&first) < 0.0 { -first } else { first });
    }

    let mut runs = Vec::new();
    let mut run: Vec<(f64, f64)> = Vec::new();
    let mut prev_w: Option<f64> = None;
    for v in &lifted {
        let pt = chart(v, &c).filter(|(u, v, _)| u.abs() <= win && v.abs() <= win);
        let crossed = match (prev_w, pt) {
            (Some(pw), Some((_, _, w))) => pw.signum() != w.signum(),
            _ => false,
        };
        if pt.is_none() || crossed {
            if run.len() >= 2 {
                runs.push(std::mem::take(&mut run));
            }
            run.clear();
        }
        if let Some((u, vv, w)) = pt {
            let q = px(u, vv);
            // thin points closer than a quarter pixel
            if run.last().is_none_or(|l: &(f64, f64)| (l.0 - q.0).hypot(l.1 - q.1) >= 0.25) {
                run.push(q);
            }
            prev_w = Some(w);
        } else {
            prev_w = chart(v, &c).map(|t| t.2);
        }
    }
    if run.len() >= 2 {
        runs.push(run);
    }
    runs
}

pub fn svg(panels: &[Panel], cfg: &RenderConfig) -> String {
    let size = cfg.width_px as f64;
    let gap = 16.0;
    let head = 24.0;
    let total_w = panels.len() as f64 * (size + gap) + gap;
    let total_h = size + head + gap;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{total_w:.0}" height="{total_h:.0}" viewBox="0 0 {total_w:.0} {total_h:.0}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, p) in panels.iter().enumerate() {
        let x0 = gap + i as f64 * (size + gap);
        let _ = writeln!(s, r#"<g transform="translate({x0:.0},{head:.0})">"#);
        let _ = writeln!(s, r#"<text x="0" y="-8" font-family="sans-serif" font-size="13">{}</text>"#, p.title);
        let _ = writeln!(s, r##"<rect width="{size:.0}" height="{size:.0}" fill="none" stroke="#999"/>"##);
        let mid = size / 2.0;
        let _ = writeln!(
            s,
            r##"<path d="M0 {mid:.2}H{size:.2}M{mid:.2} 0V{size:.2}" stroke="#ddd" stroke-width="1"/>"##
        );
        for run in polylines(p, cfg) {
            let pts: Vec<String> = run.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                s,
                r##"<polyline fill="none" stroke="#1f4e9c" stroke-width="{}" stroke-linejoin="round" points="{}"/>"##,
                cfg.stroke,
                pts.join(" ")
            );
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(s, "</svg>");
    s
}
