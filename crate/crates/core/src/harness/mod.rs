//! Experiment configuration, drivers and result files.

mod config;
mod output;
mod pareto;
mod run;
mod scaling;

pub use config::{dambreak_sph_defaults, CaseKind, ExperimentConfig, ParetoConfig, ScalingConfig};
pub use output::{emit_outputs, file_stem, read_summary, SummaryFile};
pub use pareto::{mark_front, pareto_sweep, ParetoCell, ParetoResult};
pub use run::{
    error_metrics, reference_run, run_case, run_length_quartiles, run_pc_config, run_simulation, run_simulation_with,
    summarize, CaseRun, RunOutput, RunSummary, Series,
};
pub use scaling::{
    dfs_error, hpc_detects, loglog_slope, scaling_experiment, smallest_passing, tgv_solution_pair, ScalingRow, ScalingTable,
};
