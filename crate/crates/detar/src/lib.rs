//! Experiment driver and file formats for `detar-core`.
//!
//! Each `run_*` function reproduces one experiment and returns plain rows;
//! [`output`] turns them into the results CSV, the slopes sidecar and the
//! optional plot data.

pub mod config;
pub mod experiments;
pub mod output;

pub use config::{ExperimentConfig, ExperimentId, MRange};
pub use experiments::{
    run_example1, run_example2, run_example3, run_net_audit, AuditRow, BoundCheck, ExperimentRun,
    ResultRow,
};
