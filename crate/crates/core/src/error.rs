use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlagError {
    #[error("degenerate join/meet: inputs are projectively equal")]
    DegenerateJoin,
    #[error("flag pair is not in general position (not an element of Y)")]
    NotInY,
    #[error("matrix is singular (|det| = {det:e})")]
    SingularMatrix { det: f64 },
    #[error("matrix is not unimodular (det = {det})")]
    NotUnimodular { det: f64 },
    #[error("point is not incident to line (|pairing| = {pairing:e})")]
    NotIncident { pairing: f64 },
    #[error("frame points are collinear (|det| = {det:e})")]
    Collinear { det: f64 },
    #[error("zero vector has no projective class")]
    ZeroVector,
    #[error("unsupported genus {0}; need genus >= 2")]
    UnsupportedGenus(usize),
    #[error("matrix is not hyperbolic (|trace| = {trace})")]
    NotHyperbolic { trace: f64 },
    #[error("invalid seed: {0}")]
    InvalidSeed(String),
    #[error("invalid representation: {0}")]
    InvalidSpec(String),
    #[error("relator residual {residual:e} exceeds {bound:e}")]
    RelatorResidual { residual: f64, bound: f64 },
    #[error("matrix has a complex conjugate pair of eigenvalues")]
    ComplexSpectrum,
    #[error("matrix is not loxodromic")]
    NotLoxodromic,
    #[error("[e2] is not a fixed point (angle {angle:e})")]
    NotFixed { angle: f64 },
    #[error("only {found} samples, need at least {required}")]
    InsufficientSamples { found: usize, required: usize },
    #[error("operation is not supported for the {0} variant")]
    UnsupportedSpec(&'static str),
    #[error("non-loxodromic element encountered: {word}")]
    NonLoxodromicEncountered { word: String },
    #[error("representation is not radial")]
    NotRadial,
    #[error("sample point has degenerate (x, y) part (norm {norm:e})")]
    PolarDegenerate { norm: f64 },
    #[error("base flag is not interior to the domain (margin {margin:e}, need > {required:e})")]
    BaseNotInterior { margin: f64, required: f64 },
    #[error("point lies on L0 (e2-coordinate {coord:e})")]
    OnL0 { coord: f64 },
    #[error("unknown generator name {0:?}")]
    UnknownGenerator(String),
    #[error("ball radius {radius} is below the minimum {min}")]
    InvalidRadius { radius: usize, min: usize },
    #[error("invalid word: {0}")]
    InvalidWord(String),
}

pub type Result<T> = std::result::Result<T, FlagError>;
