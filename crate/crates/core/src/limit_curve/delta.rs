use std::f64::consts::PI;

use serde::Serialize;

use super::CurveModel;
use crate::error::{FlagError, Result};
use crate::representation::{RepSpec, RepVariant};
use crate::surface::Letter;

pub const DELTA_GRID: usize = 4096;
const MIN_DELTA_SAMPLES: usize = 64;
const POLAR_FLOOR: f64 = 1e-8;

/// A degree-one homogeneous function on R^2 stored as values at the unit
/// directions `k pi / N`, `k < N`; the other half circle follows from
/// `delta(-v) = -delta(v)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaModel {
    values: Vec<f64>,
}

/// Direction of `(x, y)` in `[0, pi)` and the sign relating `(x, y)` to the
/// unit vector at that direction.
fn half_turn(x: f64, y: f64) -> (f64, f64) {
    let mut theta = y.atan2(x);
    let mut sign = 1.0;
    if theta < 0.0 {
        theta += PI;
        sign = -1.0;
    }
    if theta >= PI {
        theta -= PI;
        sign = -sign;
    }
    (theta, sign)
}

/// Interpolation between unit directions `a < theta < b` that is exact for
/// linear functions.
fn blend(theta: f64, (a, va): (f64, f64), (b, vb): (f64, f64)) -> f64 {
    let s = (b - a).sin();
    ((b - theta).sin() * va + (theta - a).sin() * vb) / s
}

impl DeltaModel {
    pub fn from_values(values: Vec<f64>) -> Self {
        Self { values }
    }

    /// Interpolates `(direction, value)` nodes, sorted by direction in
    /// `[0, pi)`, onto the grid.
    pub fn from_nodes(nodes: &[(f64, f64)]) -> Self {
        let n = nodes.len();
        let values = (0..DELTA_GRID)
            .map(|k| {
                let theta = k as f64 * PI / DELTA_GRID as f64;
                let idx = nodes.partition_point(|(d, _)| *d <= theta);
                let a = if idx == 0 { (nodes[n - 1].0 - PI, -nodes[n - 1].1) } else { nodes[idx - 1] };
                let b = if idx == n { (nodes[0].0 + PI, -nodes[0].1) } else { nodes[idx] };
                if a.0 == theta {
                    a.1
                } else {
                    blend(theta, a, b)
                }
            })
            .collect();
        Self { values }
    }

    pub fn grid(&self) -> &[f64] {
        &self.values
    }

    pub fn grid_angle(k: usize) -> f64 {
        k as f64 * PI / DELTA_GRID as f64
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let r = x.hypot(y);
        if r == 0.0 {
            return 0.0;
        }
        let (theta, sign) = half_turn(x, y);
        let n = self.values.len();
        let h = PI / n as f64;
        let k = ((theta / h).floor() as usize).min(n - 1);
        let a = (k as f64 * h, self.values[k]);
        let b = if k + 1 == n { (PI, -self.values[0]) } else { ((k + 1) as f64 * h, self.values[k + 1]) };
        r * sign * blend(theta, a, b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaFit {
    pub delta: DeltaModel,
    /// Largest failure of the cocycle identity over samples and generators.
    pub cocycle_residual: f64,
    /// Largest distance to `L0` after `(x, y, z) -> (x, y, z - delta(x, y))`
    /// is applied to the sampled points of `L`.
    pub conjugacy_residual: f64,
    pub samples_used: usize,
}

/// Height function of the point curve over `L0`: the point with `(e1, e3)`
/// part `(x, y)` has `e2` coordinate `delta(x, y)`.
pub fn fit_delta(model: &CurveModel, spec: &RepSpec) -> Result<DeltaFit> {
    if matches!(spec.variant(), RepVariant::Explicit) {
        return Err(FlagError::NotRadial);
    }
    if model.len() < MIN_DELTA_SAMPLES {
        return Err(FlagError::InsufficientSamples { found: model.len(), required: MIN_DELTA_SAMPLES });
    }
    let mut nodes = Vec::with_capacity(model.len());
    let mut units = Vec::with_capacity(model.len());
    for s in model.samples() {
        let p = s.flag.point.rep();
        let (x, z, y) = (p[0], p[1], p[2]);
        let r = x.hypot(y);
        if r < POLAR_FLOOR {
            return Err(FlagError::PolarDegenerate { norm: r });
        }
        let (theta, sign) = half_turn(x, y);
        nodes.push((theta, sign * z / r));
        units.push((x / r, y / r, z / r));
    }
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
    nodes.dedup_by(|a, b| a.0 == b.0);
    let delta = DeltaModel::from_nodes(&nodes);

    let letters: Vec<Letter> = (0..spec.seed().presentation().letter_count()).map(Letter::from_code).collect();
    let mut cocycle_residual: f64 = 0.0;
    let mut conjugacy_residual: f64 = 0.0;
    for &(x, y, z) in &units {
        let d = delta.eval(x, y);
        let off = z - d;
        conjugacy_residual = conjugacy_residual.max(off.abs() / (1.0 + off * off).sqrt());
        for &l in &letters {
            let m = spec.letter(l);
            // projective action normalized so that the e2 entry is one
            let beta = m[(1, 1)];
            let (x2, y2) = ((m[(0, 0)] * x + m[(0, 2)] * y) / beta, (m[(2, 0)] * x + m[(2, 2)] * y) / beta);
            let (tau1, tau2) = (m[(1, 0)] / beta, m[(1, 2)] / beta);
            let res = (delta.eval(x2, y2) - d - tau1 * x - tau2 * y).abs();
            cocycle_residual = cocycle_residual.max(res);
        }
    }
    Ok(DeltaFit { delta, cocycle_residual, conjugacy_residual, samples_used: units.len() })
}
