//! Scenario configuration, closed-loop runs, batch execution and logging.

mod csvlog;
mod run;
mod scenario;
mod sweep;

pub use csvlog::{csv_string, gnuplot_script, write_csv, CSV_COLUMNS};
pub use run::{
    run_batch, run_scenario, Record, RunLog, RunStatus, Summary, SETTLING_THRESHOLD,
    V_INCREASE_TOLERANCE,
};
pub use scenario::{
    AeroSpec, GainsSpec, InitialSpec, Scenario, ScenarioFile, TrajectorySpec, VehicleSpec,
    WindSpec, YawSpec,
};
pub use sweep::{run_sweep, sample_initial_conditions, SweepConfig, SweepOutcome, SweepReport};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("state diverged at t = {t_s} s")]
    NumericalDivergence { t_s: f64 },
}

impl SimError {
    /// Process exit code for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) => 1,
            SimError::NumericalDivergence { .. } => 2,
        }
    }
}
