use alloc::string::String;

/// Errors raised by the estimation and testing routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("series too short: need at least {needed} observations, got {got}")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("series is empty")]
    EmptySeries,
    #[error("non-finite value at index {index}")]
    NonFiniteValue { index: usize },
    #[error("value {value} at index {index} is outside [0, 100]")]
    OutOfRange { index: usize, value: f64 },
    #[error("non-positive value at index {index}; logarithm undefined")]
    NonPositiveValue { index: usize },
    #[error("transformation not applicable: {0}")]
    InvalidTransform(&'static str),
    #[error("weekly observations {index} and {next} are not 7 days apart", next = index + 1)]
    NonWeeklySpacing { index: usize },
    #[error("weekly data does not fully cover any calendar month")]
    CoverageGap,
    #[error("series do not overlap")]
    NoOverlap,
    #[error("series are not aligned (different start or length)")]
    AlignmentError,
    #[error("design matrix has {n} rows but {k} columns; need n > k")]
    InsufficientObservations { n: usize, k: usize },
    #[error("regressor `{column}` is identically zero")]
    ZeroColumn { column: String },
    #[error("design matrix is rank deficient at regressor `{column}`")]
    RankDeficient { column: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("HAC bandwidth {bandwidth} must be smaller than n = {n}")]
    BandwidthTooLarge { bandwidth: usize, n: usize },
    #[error("restricted and unrestricted fits use different samples")]
    SampleMismatch,
    #[error("restricted model is not nested in the unrestricted model")]
    NestedViolation,
    #[error("series has zero variance")]
    ConstantSeries,
    #[error("invalid test specification: {0}")]
    InvalidSpecification(&'static str),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("forecast window falls outside the data range")]
    WindowOutOfRange,
    #[error("no forecasts to evaluate")]
    EmptyForecastSet,
    #[error("sequences differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("loss differential is constant; Diebold-Mariano statistic undefined")]
    DegenerateLossDifferential,
}

pub type Result<T> = core::result::Result<T, Error>;
