use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{compute_metrics, run_episode, Controller, EpisodeRecord, EvalError, MetricsSummary};
use crate::classical::{ApfParams, RvoParams};
use crate::policy::{Model, ModelKind, RiskMode};
use crate::sim::{CurriculumLevel, EnvironmentGenerator, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Vortices and robots only.
    DynamicOnly,
    /// Vortices, robots and static obstacles.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyChoice {
    Apf,
    Rvo,
    Dqn,
    IqnGreedy,
    IqnAdaptive,
}

impl PolicyChoice {
    pub fn model_kind(self) -> Option<ModelKind> {
        match self {
            PolicyChoice::Apf | PolicyChoice::Rvo => None,
            PolicyChoice::Dqn => Some(ModelKind::Dqn),
            PolicyChoice::IqnGreedy | PolicyChoice::IqnAdaptive => Some(ModelKind::Iqn),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub suite: Suite,
    pub episodes_per_level: usize,
    /// Robot counts of the levels to run; each level has one more vortex (and
    /// obstacle, in the mixed suite) than robots.
    pub robot_counts: Vec<usize>,
    pub min_start_goal_distance: f64,
    /// Simulated seconds.
    pub timeout: f64,
    pub policy: PolicyChoice,
    /// Distance scale of the adaptive risk mode, m.
    pub adaptive_d0: f64,
    pub apf: ApfParams,
    pub rvo: RvoParams,
    pub generator: EnvironmentGenerator,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            suite: Suite::Mixed,
            episodes_per_level: 100,
            robot_counts: vec![3, 4, 5, 6, 7],
            min_start_goal_distance: 40.0,
            timeout: 180.0,
            policy: PolicyChoice::Apf,
            adaptive_d0: 10.0,
            apf: ApfParams::default(),
            rvo: RvoParams::default(),
            generator: EnvironmentGenerator::default(),
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        if self.robot_counts.is_empty() {
            return Err(EvalError::Config("no levels selected".into()));
        }
        if let Some(k) = self.robot_counts.iter().find(|k| !(3..=7).contains(*k)) {
            return Err(EvalError::Config(format!("robot count {k} outside 3..=7")));
        }
        if !(self.timeout > 0.0 && self.timeout.is_finite()) {
            return Err(EvalError::Config(format!("timeout must be positive, got {}", self.timeout)));
        }
        if !(self.adaptive_d0 > 0.0) {
            return Err(EvalError::Config(format!("adaptive_d0 must be positive, got {}", self.adaptive_d0)));
        }
        Ok(())
    }

    /// Number of control steps that fit in the timeout.
    pub fn max_steps(&self) -> u64 {
        (self.timeout / self.generator.params.dt + 1e-9).floor() as u64
    }
}

/// One generated episode of a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteScenario {
    pub episode_id: usize,
    /// Index into `ExperimentConfig::robot_counts`.
    pub level: usize,
    pub scenario: Scenario,
}

/// SplitMix64 mix of a base seed with a list of stream indices.
pub fn derive_seed(base: u64, stream: &[u64]) -> u64 {
    let mix = |mut z: u64| {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    };
    stream.iter().fold(mix(base), |acc, &s| mix(acc ^ mix(s)))
}

pub fn suite_levels(config: &ExperimentConfig) -> Vec<CurriculumLevel> {
    config
        .robot_counts
        .iter()
        .map(|&k| {
            let obstacles = match config.suite {
                Suite::DynamicOnly => 0,
                Suite::Mixed => k + 1,
            };
            CurriculumLevel::new(k, k + 1, obstacles, config.min_start_goal_distance)
        })
        .collect()
}

fn suite_tag(suite: Suite) -> u64 {
    match suite {
        Suite::DynamicOnly => 1,
        Suite::Mixed => 2,
    }
}

/// Generates every scenario of the suite. Independent of the policy.
pub fn suite_scenarios(config: &ExperimentConfig) -> Result<Vec<SuiteScenario>, EvalError> {
    config.validate()?;
    let mut out = Vec::with_capacity(config.robot_counts.len() * config.episodes_per_level);
    for (level, spec) in suite_levels(config).iter().enumerate() {
        for i in 0..config.episodes_per_level {
            let seed = derive_seed(config.seed, &[suite_tag(config.suite), spec.robots as u64, i as u64]);
            out.push(SuiteScenario {
                episode_id: out.len(),
                level,
                scenario: config.generator.generate(spec, seed)?,
            });
        }
    }
    Ok(out)
}

/// Runs the configured policy on every scenario of the suite. Learned
/// policies need `model` of the matching kind.
pub fn run_experiment_suite(
    config: &ExperimentConfig,
    model: Option<&Model>,
) -> Result<(MetricsSummary, Vec<EpisodeRecord>), EvalError> {
    config.validate()?;
    let controller = match (config.policy, config.policy.model_kind()) {
        (PolicyChoice::Apf, _) => Controller::Apf(config.apf),
        (PolicyChoice::Rvo, _) => Controller::Rvo(config.rvo),
        (policy, Some(kind)) => {
            let model = model.ok_or(EvalError::MissingModel(policy))?;
            if model.kind() != kind {
                return Err(EvalError::Config(format!(
                    "policy {policy:?} needs a {kind:?} model, got {:?}",
                    model.kind()
                )));
            }
            let risk = match policy {
                PolicyChoice::IqnAdaptive => RiskMode::Adaptive { d0: config.adaptive_d0 },
                _ => RiskMode::Greedy,
            };
            Controller::Learned { model, risk }
        }
        (policy, None) => unreachable!("{policy:?} has no model kind"),
    };
    let scenarios = suite_scenarios(config)?;
    let max_steps = config.max_steps();
    let records = scenarios
        .par_iter()
        .map(|s| {
            let seed = derive_seed(config.seed, &[suite_tag(config.suite), 0xAC7, s.episode_id as u64]);
            run_episode(&s.scenario, &controller, max_steps, seed, s.episode_id, s.level)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((compute_metrics(&records)?, records))
}
