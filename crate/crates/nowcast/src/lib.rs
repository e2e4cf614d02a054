//! Data ingestion, configuration, pipeline orchestration and reporting on
//! top of `nowcast-core`.

pub mod config;
pub mod error;
pub mod ingest;
pub mod montecarlo;
pub mod pipeline;
pub mod report;
