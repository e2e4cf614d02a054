use std::fmt;
use std::path::PathBuf;

use chrono::NaiveDate;
use nowcast_core::series::YearMonth;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{line}: {message}", path.display())]
    Parse { path: PathBuf, line: u64, message: String },
    #[error("{}: month {month} is missing", path.display())]
    Gap { path: PathBuf, month: YearMonth },
    #[error("{}:{line}: value {value} outside [0, 100]", path.display())]
    Range { path: PathBuf, line: u64, value: f64 },
    #[error("{}:{line}: week {date} is not 7 days after the previous row", path.display())]
    NonWeeklySpacing { path: PathBuf, line: u64, date: NaiveDate },
    #[error("{}: no data rows", path.display())]
    Empty { path: PathBuf },
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Syntax { path: PathBuf, source: toml::de::Error },
    #[error("{scope}: {message}")]
    Invalid { scope: String, message: String },
    #[error("no country matches {0:?}")]
    UnknownCountry(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Prepare,
    Stationarity,
    Elasticity,
    Nowcast,
    Forecast,
    Causality,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Ingest => "ingest",
            Stage::Prepare => "prepare",
            Stage::Stationarity => "stationarity",
            Stage::Elasticity => "elasticity",
            Stage::Nowcast => "nowcast",
            Stage::Forecast => "forecast",
            Stage::Causality => "causality",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum StageFailure {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Model(#[from] nowcast_core::error::Error),
}

#[derive(Debug, thiserror::Error)]
#[error("country {country}, stage {stage}: {source}")]
pub struct PipelineError {
    pub country: String,
    pub stage: Stage,
    pub source: StageFailure,
}

impl PipelineError {
    pub fn new(country: &str, stage: Stage, source: impl Into<StageFailure>) -> Self {
        Self { country: country.to_string(), stage, source: source.into() }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{} pipeline stage(s) failed", .0.len())]
    Pipeline(Vec<PipelineError>),
    #[error("simulation: {0}")]
    Simulation(#[source] nowcast_core::error::Error),
    #[error("{}: {source}", path.display())]
    Output { path: PathBuf, source: std::io::Error },
}
