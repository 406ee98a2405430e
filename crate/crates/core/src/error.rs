use thiserror::Error;

/// Errors raised by the transform, measure and asymptotics engines.
///
/// The `Display` form of each variant starts with a stable kebab-case code so
/// that callers (and the CLI) can match on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("divergent-integral: {0}")]
    DivergentIntegral(String),
    #[error("integrand-singularity: non-finite value at t = {0}")]
    IntegrandSingularity(f64),
    #[error("subdivision-limit: quadrature did not reach tolerance (value {value}, error estimate {err_est})")]
    SubdivisionLimit { value: f64, err_est: f64 },
    #[error("insufficient-samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("bad-samples: {0}")]
    BadSamples(String),
    #[error("evaluation-failure: non-finite value at {0}")]
    EvaluationFailure(String),
    #[error("tail-undeclared: {0}")]
    TailUndeclared(String),
    #[error("not-power-bounded: {0}")]
    NotPowerBounded(String),
    #[error("weight-order-too-small: order {order} below the minimal order {minimal}")]
    WeightOrderTooSmall { order: u32, minimal: u32 },
    #[error("transform-undefined: {0}")]
    TransformUndefined(String),
    #[error("outside-upper-half-plane: Im z = {0}")]
    OutsideUpperHalfPlane(f64),
    #[error("not-an-embedding: target order {target} must exceed {current}")]
    NotAnEmbedding { current: u32, target: u32 },
    #[error("invalid-pair: {0}")]
    InvalidPair(String),
    #[error("not-positive: F({0}) <= 0")]
    NotPositive(f64),
    #[error("index-out-of-range: {0}")]
    IndexOutOfRange(f64),
    #[error("hypothesis-violated: {0}")]
    HypothesisViolated(String),
    #[error("bad-parameters: {0}")]
    BadParameters(String),
    #[error("degenerate-system: {0}")]
    DegenerateSystem(String),
    #[error("duplicate-points: points {0} and {1} coincide")]
    DuplicatePoints(usize, usize),
    #[error("not-in-range: {0}")]
    NotInRange(String),
    #[error("no-radial-limit: {0}")]
    NoRadialLimit(String),
    #[error("degenerate-limit: radial limit vanishes")]
    DegenerateLimit,
    #[error("not-regularly-varying: {0}")]
    NotRegularlyVarying(String),
    #[error("zero-measure: both half-line distributions vanish")]
    ZeroMeasure,
    #[error("index-incompatible: beta = {beta} outside [{lo}, {hi}]")]
    IndexIncompatible { beta: f64, lo: f64, hi: f64 },
    #[error("eta-limit-missing: {0}")]
    EtaLimitMissing(String),
    #[error("kappa-mismatch: sequence mixes orders {0} and {1}")]
    KappaMismatch(u32, u32),
    #[error("invalid-measure: {0}")]
    InvalidMeasure(String),
}

impl Error {
    /// The stable kebab-case code at the front of the message.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DivergentIntegral(_) => "divergent-integral",
            Error::IntegrandSingularity(_) => "integrand-singularity",
            Error::SubdivisionLimit { .. } => "subdivision-limit",
            Error::InsufficientSamples { .. } => "insufficient-samples",
            Error::BadSamples(_) => "bad-samples",
            Error::EvaluationFailure(_) => "evaluation-failure",
            Error::TailUndeclared(_) => "tail-undeclared",
            Error::NotPowerBounded(_) => "not-power-bounded",
            Error::WeightOrderTooSmall { .. } => "weight-order-too-small",
            Error::TransformUndefined(_) => "transform-undefined",
            Error::OutsideUpperHalfPlane(_) => "outside-upper-half-plane",
            Error::NotAnEmbedding { .. } => "not-an-embedding",
            Error::InvalidPair(_) => "invalid-pair",
            Error::NotPositive(_) => "not-positive",
            Error::IndexOutOfRange(_) => "index-out-of-range",
            Error::HypothesisViolated(_) => "hypothesis-violated",
            Error::BadParameters(_) => "bad-parameters",
            Error::DegenerateSystem(_) => "degenerate-system",
            Error::DuplicatePoints(..) => "duplicate-points",
            Error::NotInRange(_) => "not-in-range",
            Error::NoRadialLimit(_) => "no-radial-limit",
            Error::DegenerateLimit => "degenerate-limit",
            Error::NotRegularlyVarying(_) => "not-regularly-varying",
            Error::ZeroMeasure => "zero-measure",
            Error::IndexIncompatible { .. } => "index-incompatible",
            Error::EtaLimitMissing(_) => "eta-limit-missing",
            Error::KappaMismatch(..) => "kappa-mismatch",
            Error::InvalidMeasure(_) => "invalid-measure",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
