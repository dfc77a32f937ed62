use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("a filtered space needs at least one atom")]
    NoAtoms,
    #[error("bad probabilities: {0}")]
    BadProbabilities(String),
    #[error("partition at t = 0 must be the single-cell partition, found {0} cells")]
    NonTrivialRoot(usize),
    #[error("partition at t = {t} does not refine partition at t = {}", t - 1)]
    NonRefining { t: usize },
    #[error("partition at t = {t} is not a partition of the atoms: {reason}")]
    NotAPartition { t: usize, reason: String },
    #[error("the filtration needs at least the partition at t = 0")]
    NoPartitions,
    #[error("dyadic space needs depth >= 1")]
    ZeroDepth,
    #[error("unknown cell {cell} at t = {t}")]
    UnknownCell { t: usize, cell: usize },
    #[error("random variable has {got} entries, space has {expected} atoms")]
    LengthMismatch { expected: usize, got: usize },
    #[error("value at t = {t} is not measurable with respect to the partition at that time")]
    NotMeasurable { t: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssessError {
    #[error("could not bracket the inverse of utility {utility} at level {level}")]
    InversionFailure { utility: String, level: f64 },
    #[error("invalid assessor parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValueError {
    #[error("negative value {value} at t = {t}, atom {atom}")]
    NegativeValue { t: usize, atom: usize, value: f64 },
    #[error("value {value} at t = {t}, atom {atom} is not a finite number")]
    NonFinite { t: usize, atom: usize, value: f64 },
    #[error("value process revives at t = {t} on atom {atom} after hitting zero")]
    AbsorptionViolation { t: usize, atom: usize },
    #[error("scaler at t = {t} is not measurable")]
    NotMeasurable { t: usize },
    #[error("scaler must be strictly positive and finite")]
    NonPositiveScaler,
    #[error("value process needs at least one time step")]
    Empty,
    #[error("horizon {horizon} outside the valid range of this construction (max {max})")]
    HorizonOutOfRange { horizon: usize, max: usize },
    #[error("invalid step distribution: {0}")]
    BadDistribution(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("window {window} does not fit between t = {t} and T_max = {t_max}")]
    WindowTooLarge { t: usize, t_max: usize, window: usize },
    #[error("T_max = {t_max} must exceed t = {t}")]
    HorizonTooShort { t: usize, t_max: usize },
    #[error("gamma must be finite")]
    BadGamma,
    #[error(transparent)]
    Assess(#[from] AssessError),
    #[error(transparent)]
    Value(#[from] ValueError),
}

/// Crate-level error, used by the file loaders and the scenario runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Assess(#[from] AssessError),
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
