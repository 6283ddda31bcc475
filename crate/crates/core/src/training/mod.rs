//! Parameter-shared multi-robot training with a replay buffer, a curriculum
//! of environments and periodic evaluation.

mod config;
mod learner;
mod replay;
mod schedule;
mod trainer;

pub use config::{epsilon_at, TrainConfig};
pub use learner::Learner;
pub use replay::{ReplayBuffer, Transition};
pub use schedule::{CurriculumSchedule, CurriculumStage};
pub use trainer::{
    evaluate_checkpoint, evaluate_controller, generate_eval_envs, train, EvalEnv, EvalLogEntry, EvalReport,
    LevelReport, TrainOutcome,
};

use crate::eval::EvalError;
use crate::nn::NnError;
use crate::policy::CheckpointError;
use crate::sim::SimError;

#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error("replay buffer holds {have} transitions, a batch needs {need}")]
    InsufficientBuffer { have: usize, need: usize },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Network(#[from] NnError),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
}
