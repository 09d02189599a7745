use thiserror::Error;

/// Errors raised by the spectral toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid cone dimensions p={p}, q={q}: both sphere factors need dimension >= 1")]
    InvalidCone { p: u32, q: u32 },

    #[error("Hardy exponent p={p_exp} must satisfy p < n-2 = {bound}")]
    HardyExponent { p_exp: f64, bound: f64 },

    #[error("polynomial is not homogeneous (found degrees {first} and {second})")]
    NotHomogeneous { first: u32, second: u32 },

    #[error("odd power r^{power} in input: the beta-Laplacian of such a term is not polynomial")]
    OddRadialPower { power: u32 },

    #[error("variable count mismatch: expected {expected}, found {found}")]
    VariableCount { expected: usize, found: usize },

    #[error("beta must be positive, got {0}")]
    NonPositiveBeta(f64),

    #[error("linear solve did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("radius {0} outside the open interval (0, 1)")]
    RadiusOutOfRange(f64),

    #[error("annulus touches the axis r = 0 (inner radius {0})")]
    AxisContact(f64),

    #[error("profile is identically zero on the evaluated range")]
    ZeroProfile,

    #[error("Q = {q_value} lies within the guard band of the ladder value 4^{exponent}")]
    ForbiddenRatio { q_value: f64, exponent: f64 },

    #[error("alpha = {0} outside (0, 1)")]
    AlphaOutOfRange(String),

    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),

    #[error("spectral level {level} is not available: {reason}")]
    Level { level: usize, reason: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of a numerical procedure rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::SolverDiverged { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
