//! CSV ingestion, JSON configuration and report/DOT output for the
//! `poset-screen` command.

pub mod config;
pub mod export;
pub mod ingest;
pub mod pipeline;

pub use config::{ClusterSpec, ConfigError, Cutoff, PipelineConfig, SelectionMode};
pub use export::{export_hasse_dot, hasse_dot, write_json, write_rates_csv, ExportError};
pub use ingest::{ingest_candidates, ingest_with, IngestError, IngestOptions, Pool, Schema, Supplied};
pub use pipeline::{
    construct, run_pipeline, select, write_outputs, Constructed, PipelineError, PipelineRun, Ranges,
    Stage,
};
