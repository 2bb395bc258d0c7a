//! Experiment harness for the workbench: seeded experiment configs, a
//! registry of named experiments over the core primitives, CSV/JSON report
//! writing, and fixture manifests. The `owsg-wb` binary drives all of it.

pub mod config;
pub mod experiments;
pub mod fixtures;
pub mod report;

pub use config::ExperimentConfig;
pub use report::{Comparator, ReportRow};
