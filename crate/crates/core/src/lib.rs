//! Flag geometry of surface group representations into SL(3,R): projective
//! primitives, Fuchsian seeds and their deformations, spectral tools, limit
//! curves and the invariant domain of flags.

pub mod error;
pub mod limit_curve;
pub mod omega;
pub mod projective;
pub mod representation;
pub mod spectral;
pub mod surface;
pub mod tolerance;

pub use error::{FlagError, Result};
