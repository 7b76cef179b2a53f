//! The invariant domain of flags avoiding the limit curves, membership,
//! finite-scale recurrence experiments, fiber crossing counts and the affine
//! chart of the canonical domain.

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{FlagError, Result};
use crate::limit_curve::{cyclic_sign_changes, lifted_points, CurveModel, CurveSample};
use crate::projective::{Flag, GroupElement, ProjLine, ProjPoint};
use crate::representation::RepSpec;
use crate::surface::Word;
use crate::tolerance;

/// Default boundary band: twice the dedup resolution.
pub const DEFAULT_BOUNDARY_TOL: f64 = 2.0 * tolerance::DEDUP;
/// A nonempty word moving the base less than this counts as a fixer.
pub const FIXER_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaQuery {
    pub flag: Flag,
    pub margin_l: f64,
    pub margin_lstar: f64,
}

impl OmegaQuery {
    pub fn margin(&self) -> f64 {
        self.margin_l.min(self.margin_lstar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum OmegaStatus {
    Inside(OmegaQuery),
    OnBoundary(OmegaQuery),
    Outside(OmegaQuery),
}

impl OmegaStatus {
    pub fn query(&self) -> &OmegaQuery {
        match self {
            OmegaStatus::Inside(q) | OmegaStatus::OnBoundary(q) | OmegaStatus::Outside(q) => q,
        }
    }

    pub fn is_inside(&self) -> bool {
        matches!(self, OmegaStatus::Inside(_))
    }
}

/// Classifies `flag` against `L` (from `model_l`) and `L*` (from
/// `model_lstar`). A margin within `tol` is `Outside` when the curve is known
/// exactly and `OnBoundary` when only samples are available.
pub fn in_omega(flag: &Flag, model_l: &CurveModel, model_lstar: &CurveModel, tol: f64) -> OmegaStatus {
    let q = OmegaQuery {
        flag: *flag,
        margin_l: model_l.distance_to_points(&flag.point),
        margin_lstar: model_lstar.distance_to_lines(&flag.line),
    };
    let exact_hit = (q.margin_l <= tol && model_l.exact_points.is_some())
        || (q.margin_lstar <= tol && model_lstar.exact_lines.is_some());
    if q.margin_l > tol && q.margin_lstar > tol {
        OmegaStatus::Inside(q)
    } else if exact_hit {
        OmegaStatus::Outside(q)
    } else {
        OmegaStatus::OnBoundary(q)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReturningWord {
    pub word: Word,
    pub displacement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceReport {
    pub ball_radius: usize,
    pub nbhd: f64,
    /// Words moving the base by at most `2 nbhd`, shortlex order.
    pub returning_words: Vec<ReturningWord>,
    /// `count_history[r]`: returning words of length at most `r`.
    pub count_history: Vec<usize>,
    /// Smallest radius from which the count no longer changes.
    pub stable_from: usize,
    /// Nonempty words fixing the base within [`FIXER_TOL`].
    pub fixers: Vec<Word>,
    /// Nonempty words trivial in the group (seed image `+-I`), skipped.
    pub trivial_words: usize,
    /// Smallest displacement of a nontrivial nonempty word.
    pub min_displacement: f64,
    pub base_margin: f64,
}

fn is_trivial(m: &nalgebra::Matrix2<f64>) -> bool {
    let id = nalgebra::Matrix2::identity();
    (m - id).norm().min((m + id).norm()) <= tolerance::RELATOR
}

/// Orbit of `base` under the ball: which words bring it back within
/// `2 nbhd` (flag distance is the larger of the point and line angles).
pub fn recurrence_experiment(
    spec: &RepSpec,
    base: &Flag,
    nbhd: f64,
    radius: usize,
    model: &CurveModel,
) -> Result<RecurrenceReport> {
    let status = in_omega(base, model, model, DEFAULT_BOUNDARY_TOL);
    let margin = status.query().margin();
    if !status.is_inside() || margin <= 2.0 * nbhd {
        return Err(FlagError::BaseNotInterior { margin, required: 2.0 * nbhd });
    }
    let words: Vec<(Word, nalgebra::Matrix2<f64>)> = spec.seed().ball(radius).collect();
    let moved: Vec<(Word, Option<f64>)> = words
        .into_par_iter()
        .map(|(w, m)| {
            if !w.is_empty() && is_trivial(&m) {
                return (w, None);
            }
            let d = spec.evaluate(&w).act_flag(base).distance(base);
            (w, Some(d))
        })
        .collect();
    let mut returning_words = Vec::new();
    let mut fixers = Vec::new();
    let mut trivial_words = 0;
    let mut min_displacement = f64::INFINITY;
    let mut count_history = vec![0usize; radius + 1];
    for (w, d) in moved {
        let Some(d) = d else {
            trivial_words += 1;
            continue;
        };
        if !w.is_empty() {
            min_displacement = min_displacement.min(d);
            if d <= FIXER_TOL {
                fixers.push(w.clone());
            }
        }
        if d <= 2.0 * nbhd {
            count_history[w.len()] += 1;
            returning_words.push(ReturningWord { word: w, displacement: d });
        }
    }
    for r in 1..=radius {
        count_history[r] += count_history[r - 1];
    }
    let last = count_history[radius];
    let stable_from = count_history.iter().position(|c| *c == last).unwrap_or(radius);
    Ok(RecurrenceReport {
        ball_radius: radius,
        nbhd,
        returning_words,
        count_history,
        stable_from,
        fixers,
        trivial_words,
        min_displacement,
        base_margin: margin,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FiberQuery {
    Line(ProjLine),
    Point(ProjPoint),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiberProfile {
    pub crossings: usize,
    pub in_m_set: bool,
    /// The fiber meets the curve in more than one sampled point.
    pub non_transversal: bool,
    pub zero_pairings: usize,
}

/// Transversal crossings of a line with `L`, or of the pencil through a
/// point with `L*`.
pub fn fiber_profile(query: &FiberQuery, model_l: &CurveModel, model_lstar: &CurveModel) -> FiberProfile {
    let (values, wrap) = match query {
        FiberQuery::Line(l) => {
            let (pts, wrap) = lifted_points(model_l);
            (pts.iter().map(|p| p.dot(l.rep())).collect::<Vec<_>>(), wrap)
        }
        FiberQuery::Point(p) => {
            let lines = crate::limit_curve::lift_continuously(model_lstar.samples().iter().map(|s| *s.flag.line.rep()));
            let wrap = match (lines.first(), lines.last()) {
                (Some(a), Some(b)) if b.dot(a) < 0.0 => -1.0,
                _ => 1.0,
            };
            (lines.iter().map(|l| l.dot(p.rep())).collect(), wrap)
        }
    };
    let zero_pairings = values.iter().filter(|v| v.abs() <= tolerance::ZERO_PAIRING).count();
    let crossings = cyclic_sign_changes(&values, wrap, tolerance::ZERO_PAIRING);
    FiberProfile { crossings, in_m_set: crossings == 1, non_transversal: zero_pairings >= 2, zero_pairings }
}

/// Image of a model under `g`, with the same parameters.
pub fn transform_model(model: &CurveModel, g: &GroupElement) -> CurveModel {
    let samples: Vec<CurveSample> = model
        .samples()
        .iter()
        .map(|s| CurveSample { flag: g.act_flag(&s.flag), ..s.clone() })
        .collect();
    let mut out = CurveModel::from_samples(samples, model.resolution());
    out.exact_points = model.exact_points.map(|l| g.act_dual(&l));
    out.exact_lines = model.exact_lines.map(|p| g.act(&p));
    out
}

/// Coordinates `(u, v)` of `[u e1 + e2 + v e3]`.
pub fn omega0_chart(flag: &Flag) -> Result<(f64, f64)> {
    point_chart(&flag.point)
}

pub fn point_chart(p: &ProjPoint) -> Result<(f64, f64)> {
    let v: &Vector3<f64> = p.rep();
    if v[1].abs() < 1e-10 {
        return Err(FlagError::OnL0 { coord: v[1] });
    }
    Ok((v[0] / v[1], v[2] / v[1]))
}
