use serde::{Deserialize, Serialize};

use super::TrainError;
use crate::sim::CurriculumLevel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurriculumStage {
    /// Last global step (inclusive) at which this stage is used.
    pub step_boundary: u64,
    pub level: CurriculumLevel,
}

/// Environment difficulty as a function of the global training step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurriculumSchedule {
    stages: Vec<CurriculumStage>,
}

impl CurriculumSchedule {
    pub fn new(stages: Vec<CurriculumStage>) -> Result<Self, TrainError> {
        if stages.is_empty() {
            return Err(TrainError::Config("curriculum has no stages".into()));
        }
        if stages.windows(2).any(|w| w[0].step_boundary >= w[1].step_boundary) {
            return Err(TrainError::Config("curriculum boundaries must strictly increase".into()));
        }
        Ok(CurriculumSchedule { stages })
    }

    /// The six training stages with boundaries at `k * t_total / 6`.
    pub fn scaled(t_total: u64) -> Result<Self, TrainError> {
        let n = CurriculumLevel::TRAINING.len() as u64;
        Self::new(
            CurriculumLevel::TRAINING
                .iter()
                .zip(1..)
                .map(|(level, k)| CurriculumStage {
                    step_boundary: t_total * k / n,
                    level: *level,
                })
                .collect(),
        )
    }

    pub fn stages(&self) -> &[CurriculumStage] {
        &self.stages
    }

    /// Index of the first stage whose boundary is at or beyond `step`; steps
    /// past the last boundary stay in the last stage.
    pub fn stage_index(&self, step: u64) -> usize {
        self.stages
            .iter()
            .position(|s| step <= s.step_boundary)
            .unwrap_or(self.stages.len() - 1)
    }

    pub fn level_at(&self, step: u64) -> CurriculumLevel {
        self.stages[self.stage_index(step)].level
    }
}
