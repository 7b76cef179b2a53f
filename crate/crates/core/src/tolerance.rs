//! Numerical thresholds shared across the crate.
//!
//! Constants are the defaults; [`Tolerances`] carries the configurable set
//! through the pipelines.

use serde::{Deserialize, Serialize};

/// Angular equality of projective classes: `1 - |<a, b>| <= EQUALITY`.
pub const EQUALITY: f64 = 1e-9;
/// Incidence tolerance for flags built from exact formulas.
pub const INCIDENCE: f64 = 1e-10;
/// Incidence tolerance for user-supplied flags.
pub const USER_INCIDENCE: f64 = 1e-8;
/// Minimum `|det|` of a frame.
pub const FRAME_DET: f64 = 1e-10;
/// Allowed `|det - 1|` of a group element.
pub const UNIMODULAR: f64 = 1e-10;
/// Below this `|det|` a matrix is treated as singular.
pub const SINGULAR: f64 = 1e-12;
/// Minimum angle between points passed to `join`/`meet`.
pub const JOIN_ANGLE: f64 = 1e-8;
/// Relative gap separating eigenvalue moduli.
pub const SPECTRAL_GAP: f64 = 1e-8;
/// Relator residual bound for seeds and representations.
pub const RELATOR: f64 = 1e-8;
/// Resolution at which curve samples are deduplicated by parameter.
pub const DEDUP: f64 = 1e-7;
/// `|trace| <= 2 + HYPERBOLIC` is not hyperbolic.
pub const HYPERBOLIC: f64 = 1e-10;
/// Pairings below this are treated as zero when counting sign changes.
pub const ZERO_PAIRING: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub incidence: f64,
    pub user_incidence: f64,
    pub spectral_gap: f64,
    pub dedup: f64,
    pub zero_pairing: f64,
    /// Margin required by `certify_anosov` for a certified verdict.
    pub epsilon: f64,
    /// Width of the boundary band in `in_omega`.
    pub boundary: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            incidence: INCIDENCE,
            user_incidence: USER_INCIDENCE,
            spectral_gap: SPECTRAL_GAP,
            dedup: DEDUP,
            zero_pairing: ZERO_PAIRING,
            epsilon: 0.02,
            boundary: 2.0 * DEDUP,
        }
    }
}

impl Tolerances {
    /// Name of the first non-positive (or non-finite) field, if any.
    pub fn first_invalid(&self) -> Option<&'static str> {
        let fields = [
            ("incidence", self.incidence),
            ("user_incidence", self.user_incidence),
            ("spectral_gap", self.spectral_gap),
            ("dedup", self.dedup),
            ("zero_pairing", self.zero_pairing),
            ("epsilon", self.epsilon),
            ("boundary", self.boundary),
        ];
        fields
            .into_iter()
            .find(|(_, v)| !(v.is_finite() && *v > 0.0))
            .map(|(name, _)| name)
    }
}
