use std::f64::consts::PI;

use serde::Serialize;

use super::CurveModel;
use crate::error::{FlagError, Result};
use crate::projective::chordal;

const MIN_REGULARITY_SAMPLES: usize = 256;
/// Largest parameter gap used in the fit.
const H_MAX: f64 = PI / 16.0;
const MIN_PAIRS_PER_BIN: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegularityHint {
    LipschitzLike,
    HolderLike,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    /// Estimated exponent `a` in `d(s, s') ~ |s - s'|^a`.
    pub holder_exponent_estimate: f64,
    /// Largest `d(s, s') / |s - s'|` seen.
    pub secant_slope_max: f64,
    pub verdict_hint: RegularityHint,
    /// `(log h, log max d/h)` per dyadic bin of parameter gaps.
    pub bins: Vec<(f64, f64)>,
}

/// Estimates the modulus of continuity of the point map `param -> point`.
///
/// Pairs `(i, i + 2^j)` are grouped in dyadic bins of their parameter gap
/// `h`; the worst secant slope `S(h)` per bin is regressed in log-log scale
/// and the exponent is `1 + slope`.
pub fn regularity_diagnostics(model: &CurveModel) -> Result<RegularityReport> {
    let n = model.len();
    if n < MIN_REGULARITY_SAMPLES {
        return Err(FlagError::InsufficientSamples { found: n, required: MIN_REGULARITY_SAMPLES });
    }
    let s = model.samples();
    let gaps: Vec<f64> = (0..n)
        .map(|i| if i + 1 < n { s[i + 1].param - s[i].param } else { s[0].param + PI - s[i].param })
        .collect();
    let h_min = gaps.iter().copied().filter(|g| *g > 0.0).fold(f64::INFINITY, f64::min);
    // bins centered on h_min * 2^b
    let bin_of = |h: f64| ((h / h_min).log2().round().max(0.0)) as usize;
    let n_bins = bin_of(H_MAX) + 1;
    let mut worst = vec![0.0f64; n_bins];
    let mut counts = vec![0usize; n_bins];
    let mut secant_slope_max: f64 = 0.0;

    let mut cum = vec![0.0; 2 * n + 1];
    for k in 0..2 * n {
        cum[k + 1] = cum[k] + gaps[k % n];
    }
    let mut lag = 1;
    while lag < n / 2 {
        let mut any = false;
        for i in 0..n {
            // parameter gap from i to i + lag, walking the cycle
            let h = cum[i + lag] - cum[i];
            if h > H_MAX || h <= 0.0 {
                continue;
            }
            any = true;
            let d = chordal(s[i].flag.point.rep(), s[(i + lag) % n].flag.point.rep());
            let slope = d / h;
            secant_slope_max = secant_slope_max.max(slope);
            let b = bin_of(h);
            worst[b] = worst[b].max(slope);
            counts[b] += 1;
        }
        if !any {
            break;
        }
        lag *= 2;
    }

    let bins: Vec<(f64, f64)> = (0..n_bins)
        .filter(|&b| counts[b] >= MIN_PAIRS_PER_BIN && worst[b] > 0.0)
        .map(|b| ((h_min * 2f64.powi(b as i32)).ln(), worst[b].ln()))
        .collect();
    let slope = if bins.len() >= 2 {
        let m = bins.len() as f64;
        let mx = bins.iter().map(|b| b.0).sum::<f64>() / m;
        let my = bins.iter().map(|b| b.1).sum::<f64>() / m;
        let sxy: f64 = bins.iter().map(|b| (b.0 - mx) * (b.1 - my)).sum();
        let sxx: f64 = bins.iter().map(|b| (b.0 - mx).powi(2)).sum();
        if sxx > 0.0 {
            sxy / sxx
        } else {
            0.0
        }
    } else {
        0.0
    };
    let exponent = 1.0 + slope;
    let verdict_hint = if exponent >= 0.9 { RegularityHint::LipschitzLike } else { RegularityHint::HolderLike };
    Ok(RegularityReport { holder_exponent_estimate: exponent, secant_slope_max, verdict_hint, bins })
}
