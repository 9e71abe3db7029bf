//! Error type shared across the crate.

use crate::solver::GroundStateResult;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension must be 1, 2 or 3 (got {0})")]
    InvalidDimension(u32),
    #[error("radial grid needs at least 16 cells (got {0})")]
    GridTooCoarse(usize),
    #[error("radius must be positive and finite (got {0})")]
    BadRadius(f64),
    #[error("density rho must be positive (got {0})")]
    NonPositiveDensity(f64),
    /// Existence of a Thomas-Fermi minimizer for rho > 3/4 is an open problem;
    /// the closed-form constructor refuses instead of guessing.
    #[error("TF existence unknown for rho = {0} > 3/4")]
    TfExistenceUnknown(f64),
    #[error("grid radius {grid} is smaller than the profile domain radius {needed}")]
    GridTooSmall { grid: f64, needed: f64 },
    #[error("field has zero mass")]
    ZeroMass,
    #[error("field values must be finite")]
    NonFiniteField,
    #[error("field length {got} does not match grid node count {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("empty interior region: margin {margin} >= plateau radius {r0}")]
    EmptyRegion { margin: f64, r0: f64 },
    #[error("kinetic coefficient eps must be positive for the gradient flow (got {0})")]
    BadEps(f64),
    #[error("pseudo-time step tau must be positive (got {0})")]
    BadTau(f64),
    #[error("solver produced non-finite values at tau = {tau}, iteration {iteration}")]
    Diverged { tau: f64, iteration: usize },
    /// Carries the last iterate and its diagnostics so callers can inspect
    /// what the flow was doing when the budget ran out.
    #[error("no convergence within {} iterations (final residual {:.3e})", .0.iterations, .0.final_residual)]
    NoConvergence(Box<GroundStateResult>),
    #[error("sweep solve failed at control {control}: {source}")]
    SweepSolve { control: f64, source: Box<Error> },
    #[error("shooting bracket not found for u(0) in [{lo}, {hi}]")]
    BracketNotFound { lo: f64, hi: f64 },
    #[error("degenerate trial field: {0}")]
    DegenerateTrial(&'static str),
    #[error("rate fit needs at least 3 usable points (got {0})")]
    TooFewPoints(usize),
    #[error("rate fit requires positive controls and values (got {0})")]
    NonPositiveFitInput(f64),
    #[error("controls must be distinct and increasing")]
    BadControls,
    #[error("{0}")]
    Invalid(String),
}
