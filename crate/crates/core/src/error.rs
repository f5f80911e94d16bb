use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("metric is not positive definite at x = {x}: {what}")]
    NonPositiveMetric { x: f64, what: &'static str },

    #[error("degenerate metric at x = {x}: V = {volume}")]
    DegenerateMetric { x: f64, volume: f64 },

    #[error("profile is not normalized to p = 1 (p = {p}, p' = {dp})")]
    NotNormalized { p: f64, dp: f64 },

    #[error("point lies on a coordinate axis, outside the chart")]
    ChartDomain,

    #[error("argument outside the domain (0, 1): {0}")]
    Domain(f64),

    #[error("equal moduli a = b; use the logistic profile")]
    EqualModuli,

    #[error("root bracketing failed: {0}")]
    RootBracket(String),

    #[error("finite-difference step too large: stencil leaves the region V > 0")]
    StepTooLarge,

    #[error("Newton iteration diverged after {iterations} iterations (residual {residual:e})")]
    NewtonDivergence { iterations: usize, residual: f64 },

    #[error("time step underflow: dt = {0:e}")]
    StepUnderflow(f64),

    #[error("invalid initial data: {0}")]
    InvalidInitialData(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("wedge product degree {0} exceeds 4")]
    DegreeOverflow(usize),

    #[error("coefficient jets carry no derivative left to differentiate")]
    JetExhausted,

    #[error("profile violates the diagonal ansatz (n = k, m = 0): {0}")]
    AnsatzViolation(String),

    #[error("the origin is excluded")]
    OriginExcluded,

    #[error("finite-difference stencil crosses the origin")]
    StencilCrossesOrigin,
}
