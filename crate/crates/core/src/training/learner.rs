use rand::Rng;

use super::{ReplayBuffer, TrainConfig, TrainError, Transition};
use crate::nn::{dqn_loss, iqn_loss, Adam, Matrix, Parameterized};
use crate::policy::{dqn_targets, iqn_td_deltas, observation_matrix, Model};
use crate::sim::ACTION_COUNT;

/// Online model, target model and optimizer state.
#[derive(Debug, Clone)]
pub struct Learner {
    pub model: Model,
    pub target: Model,
    pub optimizer: Adam,
    pub learn_steps: u64,
    gamma: f64,
    batch_size: usize,
    n_quantiles: usize,
    n_target_quantiles: usize,
    target_sync: u64,
    max_grad_norm: Option<f64>,
}

impl Learner {
    pub fn new(model: Model, config: &TrainConfig) -> Self {
        Learner {
            target: model.clone(),
            optimizer: Adam::new(&model, config.learning_rate),
            model,
            learn_steps: 0,
            gamma: config.gamma,
            batch_size: config.batch_size,
            n_quantiles: config.n_quantiles,
            n_target_quantiles: config.n_target_quantiles,
            target_sync: config.target_sync,
            max_grad_norm: config.max_grad_norm,
        }
    }

    /// Samples one batch, applies one optimizer step and, every
    /// `target_sync` steps, copies the online parameters into the target.
    /// Returns the batch loss before the update.
    pub fn learn_step<R: Rng + ?Sized>(&mut self, buffer: &ReplayBuffer, rng: &mut R) -> Result<f64, TrainError> {
        let batch = buffer
            .sample(self.batch_size, rng)
            .ok_or(TrainError::InsufficientBuffer {
                have: buffer.len(),
                need: self.batch_size,
            })?;
        let loss = self.update(&batch, rng)?;
        self.learn_steps += 1;
        if self.learn_steps.is_multiple_of(self.target_sync) {
            self.target.copy_params_from(&self.model);
        }
        Ok(loss)
    }

    /// Gradient step on an explicit batch, without touching the target.
    pub fn update<R: Rng + ?Sized>(&mut self, batch: &[&Transition], rng: &mut R) -> Result<f64, TrainError> {
        let (loss, mut grads) = self.loss_and_gradients(batch, rng)?;
        if let Some(limit) = self.max_grad_norm {
            let norm = grads.global_norm();
            if norm > limit {
                grads.scale(limit / norm);
            }
        }
        self.optimizer.apply(&mut self.model, &grads)?;
        Ok(loss)
    }

    /// Batch-mean loss and its gradient with respect to the online parameters.
    pub fn loss_and_gradients<R: Rng + ?Sized>(
        &self,
        batch: &[&Transition],
        rng: &mut R,
    ) -> Result<(f64, crate::nn::Gradients), TrainError> {
        let b = batch.len() as f64;
        match (&self.model, &self.target) {
            (Model::Iqn(online), Model::Iqn(target)) => {
                let n = self.n_quantiles;
                let td = iqn_td_deltas(batch, online, target, n, self.n_target_quantiles, self.gamma, rng)?;
                let mut d_out = Matrix::zeros(batch.len() * n, ACTION_COUNT);
                let mut total = 0.0;
                for (s, t) in batch.iter().enumerate() {
                    let (loss, grad) = iqn_loss(&td.deltas[s], td.taus.row(s))?;
                    total += loss / b;
                    for i in 0..n {
                        // delta_ij = ... - Z_i, so dL/dZ_i = -sum_j dL/d delta_ij.
                        d_out[(s * n + i, t.action)] = -grad.row(i).iter().sum::<f64>() / b;
                    }
                }
                Ok((total, online.backward(&td.cache, &d_out)?))
            }
            (Model::Dqn(online), Model::Dqn(target)) => {
                let targets = dqn_targets(batch, target, self.gamma)?;
                let states: Vec<_> = batch.iter().map(|t| t.state).collect();
                let (q, cache) = online.forward(&observation_matrix(&states))?;
                let predicted: Vec<f64> = batch.iter().enumerate().map(|(s, t)| q[(s, t.action)]).collect();
                let (loss, grad) = dqn_loss(&predicted, &targets)?;
                let mut d_out = Matrix::zeros(batch.len(), ACTION_COUNT);
                for (s, t) in batch.iter().enumerate() {
                    d_out[(s, t.action)] = grad[s];
                }
                Ok((loss, online.backward(&cache, &d_out)?))
            }
            _ => Err(TrainError::Config("online and target models differ in kind".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Parameterized;
    use crate::policy::{ModelKind, NetworkShape};
    use crate::sim::{Observation, RobotStatus, SimRng};
    use rand::{RngExt, SeedableRng};

    fn shape() -> NetworkShape {
        NetworkShape {
            encoder_width: 8,
            head_width: 16,
        }
    }

    fn random_obs(rng: &mut SimRng) -> Observation {
        let mut o = Observation::default();
        o.0.iter_mut().for_each(|v| *v = rng.random_range(-3.0..3.0));
        o
    }

    fn buffer(n: usize, seed: u64) -> ReplayBuffer {
        let mut rng = SimRng::seed_from_u64(seed);
        let mut b = ReplayBuffer::new(1000);
        for k in 0..n {
            b.push(Transition {
                state: random_obs(&mut rng),
                action: k % ACTION_COUNT,
                reward: rng.random_range(-2.0..2.0),
                next_state: random_obs(&mut rng),
                terminal: k % 5 == 0,
                outcome: if k % 5 == 0 { RobotStatus::Collided } else { RobotStatus::Active },
            });
        }
        b
    }

    fn config(kind: ModelKind) -> TrainConfig {
        TrainConfig {
            model_kind: kind,
            batch_size: 16,
            network: shape(),
            target_sync: 2,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn zero_td_error_leaves_parameters() {
        for kind in [ModelKind::Iqn, ModelKind::Dqn] {
            let mut model = Model::zeros(kind, shape());
            match &mut model {
                Model::Iqn(m) => m.output_bias_mut().fill(-1.0),
                Model::Dqn(m) => m.output_bias_mut().fill(-1.0),
            }
            let mut learner = Learner::new(model.clone(), &config(kind));
            let t = Transition {
                state: Observation::default(),
                action: 4,
                reward: -1.0,
                next_state: Observation::default(),
                terminal: true,
                outcome: RobotStatus::Collided,
            };
            let batch = vec![&t; 8];
            let loss = learner.update(&batch, &mut SimRng::seed_from_u64(0)).unwrap();
            assert_eq!(loss, 0.0);
            assert_eq!(learner.model, model);
        }
    }

    #[test]
    fn dqn_loss_matches_scalar_oracle() {
        let cfg = config(ModelKind::Dqn);
        let mut rng = SimRng::seed_from_u64(3);
        let learner = Learner::new(Model::new(ModelKind::Dqn, shape(), &mut rng), &cfg);
        let buf = buffer(40, 4);
        let batch: Vec<_> = buf.iter().collect();
        let (loss, _) = learner.loss_and_gradients(&batch, &mut rng).unwrap();
        let (Model::Dqn(online), Model::Dqn(target)) = (&learner.model, &learner.target) else {
            unreachable!()
        };
        let mut oracle = 0.0;
        for t in &batch {
            let (q, _) = online.forward(&observation_matrix(&[t.state])).unwrap();
            let (qn, _) = target.forward(&observation_matrix(&[t.next_state])).unwrap();
            let best = qn.row(0).iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let y = t.reward + if t.terminal { 0.0 } else { cfg.gamma * best };
            oracle += (y - q[(0, t.action)]).powi(2);
        }
        oracle /= batch.len() as f64;
        assert!((loss - oracle).abs() < 1e-12);
    }

    #[test]
    fn learn_steps_are_deterministic() {
        for kind in [ModelKind::Iqn, ModelKind::Dqn] {
            let cfg = config(kind);
            let model = Model::new(kind, shape(), &mut SimRng::seed_from_u64(5));
            let buf = buffer(100, 6);
            let run = || {
                let mut l = Learner::new(model.clone(), &cfg);
                let mut rng = SimRng::seed_from_u64(9);
                let losses: Vec<f64> = (0..3).map(|_| l.learn_step(&buf, &mut rng).unwrap()).collect();
                (losses, l.model)
            };
            let (la, ma) = run();
            let (lb, mb) = run();
            assert_eq!(la, lb);
            assert_eq!(ma, mb);
            assert_ne!(ma, model);
        }
    }

    #[test]
    fn target_synchronizes_on_schedule() {
        let cfg = config(ModelKind::Dqn);
        let model = Model::new(ModelKind::Dqn, shape(), &mut SimRng::seed_from_u64(1));
        let buf = buffer(100, 2);
        let mut l = Learner::new(model.clone(), &cfg);
        let mut rng = SimRng::seed_from_u64(3);
        l.learn_step(&buf, &mut rng).unwrap();
        assert_eq!(l.target, model);
        assert_ne!(l.model, model);
        l.learn_step(&buf, &mut rng).unwrap();
        assert_eq!(l.target.param_slices(), l.model.param_slices());
    }

    #[test]
    fn insufficient_buffer() {
        let mut l = Learner::new(Model::zeros(ModelKind::Iqn, shape()), &config(ModelKind::Iqn));
        let err = l.learn_step(&buffer(3, 0), &mut SimRng::seed_from_u64(0)).unwrap_err();
        assert!(matches!(err, TrainError::InsufficientBuffer { have: 3, need: 16 }));
    }

    #[test]
    fn iqn_loss_decreases_on_fixed_batch() {
        let cfg = TrainConfig {
            learning_rate: 1e-3,
            ..config(ModelKind::Iqn)
        };
        let mut l = Learner::new(Model::new(ModelKind::Iqn, shape(), &mut SimRng::seed_from_u64(1)), &cfg);
        let buf = buffer(16, 8);
        let batch: Vec<_> = buf.iter().filter(|t| t.terminal).collect();
        let mut rng = SimRng::seed_from_u64(2);
        let first = l.update(&batch, &mut rng).unwrap();
        let mut last = first;
        for _ in 0..300 {
            last = l.update(&batch, &mut rng).unwrap();
        }
        assert!(last < 0.5 * first, "{first} -> {last}");
    }
}
