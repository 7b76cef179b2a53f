//! The limit curve of a representation, sampled at attractive fixed flags,
//! and the analyses built on it.
//!
//! A sample is indexed by the attractive eigendirection of the seed image of
//! its word, an angle in `[0, pi)` (a point of RP^1).

mod anosov;
mod delta;
mod incidence;
mod regularity;

pub use anosov::*;
pub use delta::*;
pub use incidence::*;
pub use regularity::*;

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{FlagError, Result};
use crate::projective::{angle_between, Flag, ProjLine, ProjPoint};
use crate::representation::{RepSpec, RepVariant};
use crate::spectral::attractive_flag;
use crate::surface::{attractive_direction, translation_length, Word};
use crate::tolerance;

/// Fewest samples a model may hold.
pub const MIN_SAMPLES: usize = 16;
/// Default minimum translation length of sampled words.
pub const DEFAULT_MIN_LENGTH: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct CurveSample {
    pub param: f64,
    pub flag: Flag,
    pub word: Word,
    pub translation_length: f64,
}

/// Samples of the limit curve sorted by parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveModel {
    samples: Vec<CurveSample>,
    resolution: f64,
    /// `L` is this projective line, when known in closed form.
    pub exact_points: Option<ProjLine>,
    /// `L*` is the pencil through this point, when known in closed form.
    pub exact_lines: Option<ProjPoint>,
}

impl CurveModel {
    /// Sorts by parameter and merges samples closer than `resolution`
    /// (cyclically, mod pi), keeping the shortlex-least word of each cluster.
    pub fn from_samples(mut samples: Vec<CurveSample>, resolution: f64) -> Self {
        samples.sort_by(|a, b| a.param.total_cmp(&b.param).then_with(|| a.word.shortlex_key().cmp(&b.word.shortlex_key())));
        let mut clusters: Vec<Vec<CurveSample>> = Vec::new();
        for s in samples {
            match clusters.last_mut() {
                Some(c) if s.param - c.last().expect("nonempty").param <= resolution => c.push(s),
                _ => clusters.push(vec![s]),
            }
        }
        if clusters.len() > 1 {
            let first = clusters[0][0].param;
            let last = clusters.last().and_then(|c| c.last()).expect("nonempty").param;
            if first + PI - last <= resolution {
                let tail = clusters.pop().expect("nonempty");
                clusters[0].extend(tail);
            }
        }
        let samples = clusters
            .into_iter()
            .map(|c| c.into_iter().min_by(|a, b| a.word.shortlex_key().cmp(&b.word.shortlex_key())).expect("nonempty"))
            .collect::<Vec<_>>();
        let mut samples = samples;
        samples.sort_by(|a, b| a.param.total_cmp(&b.param));
        Self { samples, resolution, exact_points: None, exact_lines: None }
    }

    pub fn samples(&self) -> &[CurveSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    /// Smallest angular distance between consecutive (cyclic) points and
    /// between consecutive lines.
    pub fn injectivity_margins(&self) -> (f64, f64) {
        let n = self.samples.len();
        if n < 2 {
            return (f64::INFINITY, f64::INFINITY);
        }
        let mut points = f64::INFINITY;
        let mut lines = f64::INFINITY;
        for i in 0..n {
            let a = &self.samples[i].flag;
            let b = &self.samples[(i + 1) % n].flag;
            points = points.min(a.point.angle_to(&b.point));
            lines = lines.min(a.line.angle_to(&b.line));
        }
        (points, lines)
    }

    /// Angular distance from `p` to `L`: exact when known, else to the
    /// nearest sampled point.
    pub fn distance_to_points(&self, p: &ProjPoint) -> f64 {
        match &self.exact_points {
            Some(l) => crate::projective::pairing(p, l).abs().clamp(0.0, 1.0).asin(),
            None => self.samples.iter().map(|s| s.flag.point.angle_to(p)).fold(f64::INFINITY, f64::min),
        }
    }

    /// Angular distance from `l` to `L*`, exact when known.
    pub fn distance_to_lines(&self, l: &ProjLine) -> f64 {
        match &self.exact_lines {
            Some(c) => crate::projective::pairing(c, l).abs().clamp(0.0, 1.0).asin(),
            None => self.samples.iter().map(|s| s.flag.line.angle_to(l)).fold(f64::INFINITY, f64::min),
        }
    }

    /// CSV with columns
    /// `param,point_x,point_y,point_z,line_a,line_b,line_c,word,translation_length`.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut out = std::io::BufWriter::new(out);
        writeln!(out, "param,point_x,point_y,point_z,line_a,line_b,line_c,word,translation_length")?;
        for s in &self.samples {
            let p = s.flag.point.rep();
            let l = s.flag.line.rep();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                s.param, p[0], p[1], p[2], l[0], l[1], l[2], s.word, s.translation_length
            )?;
        }
        out.flush()
    }
}

/// Cyclically reduced nonempty words of the ball, in shortlex order, with
/// their translation lengths (hyperbolic seed images only).
pub(crate) fn scored_words(spec: &RepSpec, radius: usize) -> Vec<(Word, nalgebra::Matrix2<f64>, f64)> {
    spec.seed()
        .ball(radius)
        .filter(|(w, _)| !w.is_empty() && w.is_cyclically_reduced())
        .filter_map(|(w, m)| translation_length(&m).ok().map(|t| (w, m, t)))
        .collect()
}

pub(crate) fn check_radius(radius: usize) -> Result<()> {
    if radius < 2 {
        return Err(FlagError::InvalidRadius { radius, min: 2 });
    }
    Ok(())
}

/// One sample per cyclically reduced loxodromic word of the ball with
/// translation length at least `min_length`.
pub fn sample_limit_curve(spec: &RepSpec, radius: usize, min_length: f64) -> Result<CurveModel> {
    sample_limit_curve_with(spec, radius, min_length, tolerance::DEDUP)
}

pub fn sample_limit_curve_with(spec: &RepSpec, radius: usize, min_length: f64, resolution: f64) -> Result<CurveModel> {
    check_radius(radius)?;
    let words = scored_words(spec, radius);
    let samples: Vec<CurveSample> = words
        .into_par_iter()
        .filter(|(_, _, t)| *t >= min_length)
        .filter_map(|(word, m, t)| {
            let g = spec.evaluate(&word);
            let flag = attractive_flag(&g).ok()?;
            let param = attractive_direction(&m).ok()?;
            Some(CurveSample { param, flag, word, translation_length: t })
        })
        .collect();
    let mut model = CurveModel::from_samples(samples, resolution);
    if model.len() < MIN_SAMPLES {
        return Err(FlagError::InsufficientSamples { found: model.len(), required: MIN_SAMPLES });
    }
    let e2 = ProjPoint::basis(1);
    match spec.variant() {
        RepVariant::Canonical => {
            model.exact_points = Some(ProjLine::basis(1));
            model.exact_lines = Some(e2);
        }
        RepVariant::Radial { .. } => model.exact_lines = Some(e2),
        _ => {}
    }
    Ok(model)
}

/// Representatives of `vs` with consecutive signs chosen so that adjacent
/// vectors have nonnegative inner product.
pub(crate) fn lift_continuously(vs: impl Iterator<Item = nalgebra::Vector3<f64>>) -> Vec<nalgebra::Vector3<f64>> {
    let mut out: Vec<nalgebra::Vector3<f64>> = Vec::new();
    for v in vs {
        let v = match out.last() {
            Some(prev) if prev.dot(&v) < 0.0 => -v,
            _ => v,
        };
        out.push(v);
    }
    out
}

#[allow(dead_code)]
pub(crate) fn angle(a: &nalgebra::Vector3<f64>, b: &nalgebra::Vector3<f64>) -> f64 {
    angle_between(a, b)
}
