use serde::{Deserialize, Serialize};

use super::TrainError;
use crate::policy::{ModelKind, NetworkShape, TRAINING_QUANTILES};
use crate::sim::EnvironmentGenerator;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub model_kind: ModelKind,
    pub t_total: u64,
    pub epsilon_max: f64,
    pub epsilon_min: f64,
    /// Fraction of `t_total` over which ε decays linearly.
    pub decay_fraction: f64,
    pub l_episode_max: u64,
    pub learn_freq: u64,
    pub eval_freq: u64,
    /// Evaluation environments generated per curriculum stage.
    pub eval_envs_per_level: usize,
    pub batch_size: usize,
    pub gamma: f64,
    pub buffer_capacity: usize,
    /// Learn steps between hard copies into the target model.
    pub target_sync: u64,
    pub learning_rate: f64,
    /// Gradients with a larger global L2 norm are rescaled to this norm.
    pub max_grad_norm: Option<f64>,
    /// Online (N) and target (N') quantile samples per transition.
    pub n_quantiles: usize,
    pub n_target_quantiles: usize,
    pub network: NetworkShape,
    pub generator: EnvironmentGenerator,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            model_kind: ModelKind::Iqn,
            t_total: 200_000,
            epsilon_max: 0.6,
            epsilon_min: 0.05,
            decay_fraction: 0.25,
            l_episode_max: 1000,
            learn_freq: 4,
            eval_freq: 60_000,
            eval_envs_per_level: 10,
            batch_size: 64,
            gamma: 0.99,
            buffer_capacity: 100_000,
            target_sync: 1000,
            learning_rate: 1e-4,
            max_grad_norm: Some(10.0),
            n_quantiles: TRAINING_QUANTILES,
            n_target_quantiles: TRAINING_QUANTILES,
            network: NetworkShape::default(),
            generator: EnvironmentGenerator::default(),
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |msg: String| Err(TrainError::Config(msg));
        if !(0.0 <= self.epsilon_min && self.epsilon_min <= self.epsilon_max && self.epsilon_max <= 1.0) {
            return bad(format!(
                "need 0 <= epsilon_min ({}) <= epsilon_max ({}) <= 1",
                self.epsilon_min, self.epsilon_max
            ));
        }
        if !(self.decay_fraction > 0.0 && self.decay_fraction <= 1.0) {
            return bad(format!("decay_fraction {} outside (0, 1]", self.decay_fraction));
        }
        let counters = [
            ("t_total", self.t_total),
            ("l_episode_max", self.l_episode_max),
            ("learn_freq", self.learn_freq),
            ("eval_freq", self.eval_freq),
            ("target_sync", self.target_sync),
            ("eval_envs_per_level", self.eval_envs_per_level as u64),
            ("batch_size", self.batch_size as u64),
            ("buffer_capacity", self.buffer_capacity as u64),
            ("n_quantiles", self.n_quantiles as u64),
            ("n_target_quantiles", self.n_target_quantiles as u64),
            ("encoder_width", self.network.encoder_width as u64),
            ("head_width", self.network.head_width as u64),
        ];
        if let Some((name, _)) = counters.iter().find(|(_, v)| *v == 0) {
            return bad(format!("{name} must be positive"));
        }
        if self.batch_size > self.buffer_capacity {
            return bad("batch_size exceeds buffer_capacity".into());
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad(format!("gamma {} outside [0, 1]", self.gamma));
        }
        if let Some(c) = self.max_grad_norm {
            if !(c > 0.0 && c.is_finite()) {
                return bad(format!("max_grad_norm {c} must be positive"));
            }
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning_rate {} must be positive", self.learning_rate));
        }
        self.generator.params.validate()?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, TrainError> {
        let config: TrainConfig = serde_json::from_str(text).map_err(|e| TrainError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }
}

/// Exploration rate at global step `t`: linear from `epsilon_max` at 0 to
/// `epsilon_min` at `decay_fraction * t_total`, then constant.
pub fn epsilon_at(t: u64, config: &TrainConfig) -> Result<f64, TrainError> {
    if t > config.t_total {
        return Err(TrainError::Config(format!("step {t} beyond t_total {}", config.t_total)));
    }
    let horizon = config.decay_fraction * config.t_total as f64;
    let frac = (t as f64 / horizon).min(1.0);
    Ok((1.0 - frac) * config.epsilon_max + frac * config.epsilon_min)
}
