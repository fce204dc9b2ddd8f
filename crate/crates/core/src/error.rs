use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vector is not a future-pointing timelike unit vector (n·n = {norm}, n⁰ = {time})")]
    NotTimelikeUnit { norm: f64, time: f64 },

    #[error("matrix is not a proper orthochronous Lorentz transformation (residual {residual:e})")]
    NotLorentz { residual: f64 },

    #[error("SL(2,C) element has determinant {det_re}{det_im:+}i, expected 1")]
    NotUnimodular { det_re: f64, det_im: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("field tensor is not antisymmetric (residual {residual:e})")]
    NotAntisymmetric { residual: f64 },

    #[error("mass must be positive, got {0}")]
    NonPositiveMass(f64),

    #[error("{value} is not a non-negative half-integer")]
    NotHalfInteger { value: f64 },

    #[error("invalid angular momentum projection m = {m} for j = {j}")]
    InvalidProjection { j: f64, m: f64 },

    #[error("total spin {requested} is not reachable; reachable values: {reachable:?}")]
    UnreachableSpin { requested: f64, reachable: Vec<f64> },

    #[error("inputs live on different leaves of the foliation (n mismatch {distance:e})")]
    FoliationMismatch { distance: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("rotation axis must be a spacelike unit vector orthogonal to n ({reason})")]
    InvalidAxis { reason: String },

    #[error("exchange geometry violated: {0}")]
    Geometry(String),

    #[error("momentum support left the grid: {0}")]
    SupportLeftGrid(String),

    #[error("grid sample is not in the forward timelike region: {0}")]
    NotForwardTimelike(String),

    #[error("requested particle sector {sector} is affected by truncation at N_max = {n_max}")]
    TruncatedSector { sector: usize, n_max: usize },

    #[error("bracket is not proportional to the identity (residual {residual:e})")]
    NotScalar { residual: f64 },

    #[error("site {0:?} is not on the lattice")]
    OffLattice(Vec<i64>),

    #[error("mass band reaches m² ≤ 0 (m² = {mass_sq}, half-width = {half_width})")]
    InvalidBand { mass_sq: f64, half_width: f64 },

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
