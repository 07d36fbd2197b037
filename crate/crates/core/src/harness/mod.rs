//! Experiment orchestration, configuration and output.

pub mod config;
pub mod experiments;
pub mod output;

pub use config::{ExperimentConfig, ExperimentId, Overrides, Sweep, SweepVariable};
pub use experiments::{
    run_analytic, run_experiment, run_fig2, run_fig3, run_fig4, run_simulate, ResultRow, ResultTable,
};
pub use output::emit_outputs;
