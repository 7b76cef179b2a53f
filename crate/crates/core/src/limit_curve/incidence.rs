use std::collections::BTreeMap;

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::Serialize;

use super::{lift_continuously, CurveModel};
use crate::tolerance;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncidenceReport {
    pub pass: bool,
    pub lines_checked: usize,
    /// Crossing count -> number of lines with that count.
    pub histogram: BTreeMap<usize, usize>,
    /// Index of the line whose count is farthest from one.
    pub worst_line: Option<usize>,
    pub worst_count: usize,
    /// Smallest `|<point(s), line(s')>|` over `s != s'`.
    pub min_cross_pairing: f64,
    /// Pairs `s != s'` with `|pairing|` at or below the incidence tolerance.
    pub near_misses: usize,
    /// Largest `|<point(s), line(s)>|`.
    pub max_same_pairing: f64,
}

/// Sign changes of `f` around the closed lifted curve; the value after the
/// last sample is `wrap * f[0]`.
pub(crate) fn cyclic_sign_changes(f: &[f64], wrap: f64, zero: f64) -> usize {
    let n = f.len();
    let Some(start) = f.iter().position(|v| v.abs() > zero) else {
        return 0;
    };
    let mut prev = f[start].signum();
    let mut count = 0;
    for k in 1..=n {
        let i = start + k;
        let v = if i < n { f[i] } else { wrap * f[i - n] };
        if v.abs() <= zero {
            continue;
        }
        if v.signum() != prev {
            count += 1;
            prev = v.signum();
        }
    }
    count
}

pub(crate) fn lifted_points(model: &CurveModel) -> (Vec<Vector3<f64>>, f64) {
    let pts = lift_continuously(model.samples().iter().map(|s| *s.flag.point.rep()));
    let wrap = match (pts.first(), pts.last()) {
        (Some(a), Some(b)) if b.dot(a) < 0.0 => -1.0,
        _ => 1.0,
    };
    (pts, wrap)
}

/// Counts, for every sampled line, the transversal crossings of the closed
/// point curve.
pub fn check_incidence(model: &CurveModel) -> IncidenceReport {
    check_incidence_strided(model, 1)
}

/// Same, checking every `stride`-th line against all points.
pub fn check_incidence_strided(model: &CurveModel, stride: usize) -> IncidenceReport {
    let stride = stride.max(1);
    let (pts, wrap) = lifted_points(model);
    let samples = model.samples();
    let rows: Vec<(usize, usize, f64, usize, f64)> = (0..samples.len())
        .step_by(stride)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|j| {
            let l = samples[j].flag.line.rep();
            let f: Vec<f64> = pts.iter().map(|p| p.dot(l)).collect();
            let count = cyclic_sign_changes(&f, wrap, tolerance::ZERO_PAIRING);
            let mut min_cross = f64::INFINITY;
            let mut near = 0;
            for (i, v) in f.iter().enumerate() {
                if i == j {
                    continue;
                }
                min_cross = min_cross.min(v.abs());
                if v.abs() <= tolerance::INCIDENCE {
                    near += 1;
                }
            }
            (j, count, min_cross, near, f[j].abs())
        })
        .collect();
    let mut histogram = BTreeMap::new();
    let mut worst: Option<(usize, usize)> = None;
    let mut min_cross_pairing = f64::INFINITY;
    let mut near_misses = 0;
    let mut max_same_pairing: f64 = 0.0;
    for (j, count, min_cross, near, same) in &rows {
        *histogram.entry(*count).or_insert(0) += 1;
        let badness = count.abs_diff(1);
        if badness > 0 && worst.is_none_or(|(_, c)| badness > c.abs_diff(1)) {
            worst = Some((*j, *count));
        }
        min_cross_pairing = min_cross_pairing.min(*min_cross);
        near_misses += near;
        max_same_pairing = max_same_pairing.max(*same);
    }
    IncidenceReport {
        pass: !rows.is_empty() && worst.is_none(),
        lines_checked: rows.len(),
        histogram,
        worst_line: worst.map(|w| w.0),
        worst_count: worst.map_or(1, |w| w.1),
        min_cross_pairing,
        near_misses,
        max_same_pairing,
    }
}
