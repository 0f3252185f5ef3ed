//! Sweep engine, file formats and command-line support for `hrn-core`.

pub mod config;
pub mod error;
pub mod experiments;
pub mod table;

pub use config::{load_sweep_config, parse_sweep_config};
pub use error::{SimError, SimResult};
pub use experiments::{
    run, run_custom, run_fig3, run_fig4, run_fig5, run_fig6, run_with_traces, Figure, Grid, Metric,
    Row, SweepOutput, SweepResult, SweepSpec,
};
