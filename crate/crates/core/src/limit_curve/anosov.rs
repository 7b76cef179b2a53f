use rayon::prelude::*;
use serde::Serialize;

use super::{check_radius, scored_words};
use crate::error::{FlagError, Result};
use crate::representation::{RepSpec, RepVariant};
use crate::spectral::{eigen3, saddle_classification, SaddleType};
use crate::surface::{eval_u, translation_length, CohomologyClass, FuchsianSeed, Word};
use crate::tolerance;

/// Relative slack under which two ratios count as tied; ties keep the
/// shortlex-first word.
const TIE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StableNormEstimate {
    pub value: f64,
    pub witness: Option<Word>,
    pub ball_radius: usize,
    /// `history[r]` is the estimate over words of length at most `r`.
    pub history: Vec<f64>,
}

fn better(ratio: f64, best: f64) -> bool {
    ratio > best * (1.0 + TIE) + f64::MIN_POSITIVE
}

/// Lower bound for the stable norm: the largest `|u(w)| / t(w)` over
/// cyclically reduced hyperbolic words of the ball.
pub fn stable_norm(u: &CohomologyClass, seed: &FuchsianSeed, radius: usize) -> Result<StableNormEstimate> {
    check_radius(radius)?;
    let mut best = 0.0;
    let mut witness: Option<Word> = None;
    let mut history = vec![0.0; radius + 1];
    for (w, m) in seed.ball(radius) {
        if w.is_empty() || !w.is_cyclically_reduced() {
            continue;
        }
        let Ok(t) = translation_length(&m) else { continue };
        let ratio = eval_u(u, &w).abs() / t;
        if witness.is_none() || better(ratio, best) {
            best = ratio.max(best);
            witness = Some(w.clone());
        }
        history[w.len()] = best;
    }
    for r in 1..=radius {
        history[r] = history[r].max(history[r - 1]);
    }
    Ok(StableNormEstimate { value: best, witness, ball_radius: radius, history })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    CertifiedAtScale,
    Refuted,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElementCheck {
    pub word: Word,
    pub translation_length: f64,
    pub u: f64,
    pub ratio: f64,
    pub ratio_pass: bool,
    pub saddle: SaddleType,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certification {
    pub verdict: Verdict,
    /// `1/2` minus the stable-norm estimate.
    pub margin: f64,
    pub epsilon: f64,
    pub estimate: StableNormEstimate,
    /// An element with `|u| >= t/2`, for refutations.
    pub witness: Option<Word>,
    pub elements_checked: usize,
    /// Elements where the saddle test and the ratio test disagree.
    pub disagreements: Vec<Word>,
}

fn cohomology_of(spec: &RepSpec) -> Result<CohomologyClass> {
    match spec.variant() {
        RepVariant::Explicit => Err(FlagError::UnsupportedSpec("explicit")),
        _ => Ok(spec.u().unwrap_or_else(|| CohomologyClass::zero(spec.seed().genus()))),
    }
}

/// Per-element ratio and saddle tests over the cyclically reduced words of
/// the ball, in shortlex order.
pub fn element_checks(spec: &RepSpec, radius: usize) -> Result<Vec<ElementCheck>> {
    check_radius(radius)?;
    let u = cohomology_of(spec)?;
    scored_words(spec, radius)
        .into_par_iter()
        .map(|(word, _, t)| {
            let uw = eval_u(&u, &word);
            let saddle = saddle_classification(&spec.evaluate(&word), tolerance::SPECTRAL_GAP)?;
            Ok(ElementCheck { translation_length: t, u: uw, ratio: uw.abs() / t, ratio_pass: uw.abs() < t / 2.0, saddle, word })
        })
        .collect()
}

/// Finite-scale check of the saddle criterion for a representation fixing
/// `[e2]`.
pub fn certify_anosov(spec: &RepSpec, radius: usize, epsilon: f64) -> Result<Certification> {
    let checks = element_checks(spec, radius)?;
    let u = cohomology_of(spec)?;
    let estimate = stable_norm(&u, spec.seed(), radius)?;
    let disagreements: Vec<Word> = checks
        .iter()
        .filter(|c| c.ratio_pass != (c.saddle == SaddleType::Saddle))
        .map(|c| c.word.clone())
        .collect();
    let mut witness: Option<&ElementCheck> = None;
    for c in checks.iter().filter(|c| !c.ratio_pass || c.saddle != SaddleType::Saddle) {
        if witness.is_none_or(|w| better(c.ratio, w.ratio)) {
            witness = Some(c);
        }
    }
    let margin = 0.5 - estimate.value;
    let verdict = if witness.is_some() {
        Verdict::Refuted
    } else if margin >= epsilon {
        Verdict::CertifiedAtScale
    } else {
        Verdict::Inconclusive
    };
    Ok(Certification {
        verdict,
        margin,
        epsilon,
        estimate,
        witness: witness.map(|w| w.word.clone()),
        elements_checked: checks.len(),
        disagreements,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub word: Word,
    pub translation_length: f64,
    pub upper: f64,
    pub lower: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub inf_upper: f64,
    pub inf_lower: f64,
    pub upper_witness: Word,
    pub lower_witness: Word,
    pub rows: Vec<RateRow>,
}

/// Moduli `(block_max, e2, block_min)` for a matrix fixing `[e2]`, read off
/// the induced action on `V / e2`.
fn e2_spectrum(m: &nalgebra::Matrix3<f64>) -> Option<(f64, f64, f64)> {
    let beta = m[(1, 1)];
    let tr = m[(0, 0)] + m[(2, 2)];
    let det = 1.0 / beta;
    let disc = tr * tr / 4.0 - det;
    if disc < 0.0 || beta == 0.0 {
        return None;
    }
    let big = tr.abs() / 2.0 + disc.sqrt();
    Some((big, beta.abs(), det.abs() / big))
}

/// Per-element expansion rates `log(l1/l2)/t` and `log(l2/l3)/t`.
///
/// For representations fixing `[e2]`, `l2` is the eigenvalue at `e2` and the
/// rates are signed: they are positive exactly when `[e2]` is a saddle. For
/// explicit representations the sorted moduli are used.
pub fn anosov_rates(spec: &RepSpec, radius: usize, min_length: f64) -> Result<RateReport> {
    check_radius(radius)?;
    let fixes_e2 = !matches!(spec.variant(), RepVariant::Explicit);
    let rows: Vec<Result<RateRow>> = scored_words(spec, radius)
        .into_par_iter()
        .filter(|(_, _, t)| *t >= min_length)
        .map(|(word, _, t)| {
            let g = spec.evaluate(&word);
            let moduli = if fixes_e2 {
                e2_spectrum(g.mat())
            } else {
                eigen3(&g).ok().filter(|e| !e.near_degenerate).map(|e| (e.values[0].abs(), e.values[1].abs(), e.values[2].abs()))
            };
            let Some((l1, l2, l3)) = moduli else {
                return Err(FlagError::NonLoxodromicEncountered { word: word.to_string() });
            };
            Ok(RateRow { translation_length: t, upper: (l1 / l2).ln() / t, lower: (l2 / l3).ln() / t, word })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let argmin = |key: fn(&RateRow) -> f64| {
        rows.iter().fold(None::<&RateRow>, |best, r| match best {
            Some(b) if key(b) <= key(r) => Some(b),
            _ => Some(r),
        })
    };
    let (Some(up), Some(lo)) = (argmin(|r| r.upper), argmin(|r| r.lower)) else {
        return Err(FlagError::InsufficientSamples { found: 0, required: 1 });
    };
    Ok(RateReport {
        inf_upper: up.upper,
        inf_lower: lo.lower,
        upper_witness: up.word.clone(),
        lower_witness: lo.word.clone(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub elements: usize,
    pub loxodromic: usize,
    pub loxodromic_fraction: f64,
    pub inf_upper: f64,
    pub inf_lower: f64,
}

/// Probe-only summary for representations without a verdict: the fraction
/// of loxodromic elements and the gap infima among them.
pub fn probe_explicit(spec: &RepSpec, radius: usize, min_length: f64) -> Result<ProbeReport> {
    check_radius(radius)?;
    let gaps: Vec<Option<(f64, f64)>> = scored_words(spec, radius)
        .into_par_iter()
        .filter(|(_, _, t)| *t >= min_length)
        .map(|(word, _, t)| {
            let e = eigen3(&spec.evaluate(&word)).ok().filter(|e| !e.near_degenerate)?;
            let v = e.values.map(f64::abs);
            Some(((v[0] / v[1]).ln() / t, (v[1] / v[2]).ln() / t))
        })
        .collect();
    let loxodromic = gaps.iter().flatten().count();
    let inf = |f: fn(&(f64, f64)) -> f64| gaps.iter().flatten().map(f).fold(f64::INFINITY, f64::min);
    Ok(ProbeReport {
        elements: gaps.len(),
        loxodromic,
        loxodromic_fraction: if gaps.is_empty() { 0.0 } else { loxodromic as f64 / gaps.len() as f64 },
        inf_upper: inf(|g| g.0),
        inf_lower: inf(|g| g.1),
    })
}
