//! Ingestion, synthetic instances, configuration, reports and benchmarks.

pub mod bench;
pub mod config;
pub mod generate;
pub mod ingest;
pub mod pipeline;
pub mod report;
