//! Episode execution, the two 500-scenario experiment suites, metrics, and
//! trajectory export.

mod controller;
mod episode;
mod export;
mod metrics;
mod suite;
mod svg;

pub use controller::Controller;
pub use episode::{run_episode, EpisodeRecord, RobotTrack, TrajectoryRow};
pub use export::{export_trajectories, read_trajectories, CsvRow};
pub use metrics::{action_energy, compute_metrics, Distribution, LevelMetrics, MetricsSummary};
pub use suite::{
    derive_seed, run_experiment_suite, suite_levels, suite_scenarios, ExperimentConfig, PolicyChoice,
    Suite, SuiteScenario,
};
pub use svg::{render_metrics_svg, render_svg, trajectory_svg};

use crate::classical::PlannerError;
use crate::nn::NnError;
use crate::policy::CheckpointError;
use crate::sim::SimError;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error(transparent)]
    Network(#[from] NnError),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error("policy {0:?} needs a trained model checkpoint")]
    MissingModel(PolicyChoice),
    #[error("no episode records to summarize")]
    Empty,
    #[error("invalid experiment configuration: {0}")]
    Config(String),
    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
}
