use rand::{RngExt, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

use super::{epsilon_at, CurriculumSchedule, Learner, ReplayBuffer, TrainConfig, TrainError, Transition};
use crate::eval::{derive_seed, run_episode, Controller, EpisodeRecord};
use crate::policy::{save_checkpoint, Model, RiskMode};
use crate::sim::{observe, observe_unchecked, Action, RobotStatus, Scenario, SimRng, ACTION_COUNT};

const STREAM_INIT: u64 = 1;
const STREAM_ACT: u64 = 2;
const STREAM_TRAIN_ENV: u64 = 3;
const STREAM_EVAL_ENV: u64 = 4;
const STREAM_EVAL_EPISODE: u64 = 5;

/// One fixed evaluation environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalEnv {
    /// Curriculum stage the environment was drawn from.
    pub level: usize,
    pub scenario: Scenario,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: usize,
    pub episodes: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Mean over robots of the cumulative episode reward.
    pub mean_reward: f64,
    /// Mean over robots of successful episodes, s.
    pub mean_travel_time: Option<f64>,
    /// Mean over robots of successful episodes.
    pub mean_energy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub levels: Vec<LevelReport>,
}

impl EvalReport {
    pub fn success_rate(&self) -> f64 {
        let episodes: usize = self.levels.iter().map(|l| l.episodes).sum();
        let successes: usize = self.levels.iter().map(|l| l.successes).sum();
        successes as f64 / episodes.max(1) as f64
    }
}

/// One line of the evaluation log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalLogEntry {
    pub step: u64,
    pub epsilon: f64,
    pub episodes_started: u64,
    pub learn_steps: u64,
    /// Mean loss over the learn steps since the previous entry.
    pub mean_loss: Option<f64>,
    pub report: EvalReport,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: Model,
    pub log: Vec<EvalLogEntry>,
    pub buffer_len: usize,
    pub transitions: u64,
    pub episodes: u64,
    pub learn_steps: u64,
}

/// `per_level` environments for every stage of `schedule`, from a stream of
/// `seed` reserved for evaluation.
pub fn generate_eval_envs(
    config: &TrainConfig,
    schedule: &CurriculumSchedule,
    per_level: usize,
) -> Result<Vec<EvalEnv>, TrainError> {
    let mut envs = Vec::new();
    for (level, stage) in schedule.stages().iter().enumerate() {
        for i in 0..per_level {
            let seed = derive_seed(config.seed, &[STREAM_EVAL_ENV, level as u64, i as u64]);
            envs.push(EvalEnv {
                level,
                scenario: config.generator.generate(&stage.level, seed)?,
            });
        }
    }
    Ok(envs)
}

/// Runs every environment once with `controller` for at most `max_steps`
/// steps. An episode succeeds only if every robot reaches its goal.
pub fn evaluate_controller(
    controller: &Controller,
    envs: &[EvalEnv],
    max_steps: u64,
    seed: u64,
) -> Result<(EvalReport, Vec<EpisodeRecord>), TrainError> {
    let records = envs
        .par_iter()
        .enumerate()
        .map(|(i, env)| {
            let episode_seed = derive_seed(seed, &[STREAM_EVAL_EPISODE, i as u64]);
            run_episode(&env.scenario, controller, max_steps, episode_seed, i, env.level)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((summarize(&records), records))
}

/// Greedy evaluation of `model` (risk mode as given) on the fixed set.
pub fn evaluate_checkpoint(
    model: &Model,
    envs: &[EvalEnv],
    risk: RiskMode,
    max_steps: u64,
    seed: u64,
) -> Result<EvalReport, TrainError> {
    let controller = Controller::Learned { model, risk };
    Ok(evaluate_controller(&controller, envs, max_steps, seed)?.0)
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

fn summarize(records: &[EpisodeRecord]) -> EvalReport {
    let mut levels: Vec<usize> = records.iter().map(|r| r.level).collect();
    levels.sort_unstable();
    levels.dedup();
    let levels = levels
        .into_iter()
        .map(|level| {
            let eps: Vec<_> = records.iter().filter(|r| r.level == level).collect();
            let successes = eps.iter().filter(|e| e.success).count();
            let rewards: Vec<f64> = eps.iter().flat_map(|e| e.robots.iter().map(|t| t.total_reward())).collect();
            let winners = eps.iter().filter(|e| e.success).flat_map(|e| &e.robots);
            let times: Vec<f64> = winners.clone().filter_map(|t| t.arrival_time).collect();
            let energy: Vec<f64> = winners.map(|t| t.energy()).collect();
            LevelReport {
                level,
                episodes: eps.len(),
                successes,
                success_rate: successes as f64 / eps.len() as f64,
                mean_reward: mean(&rewards).unwrap_or(0.0),
                mean_travel_time: mean(&times),
                mean_energy: mean(&energy),
            }
        })
        .collect();
    EvalReport { levels }
}

/// Parameter-shared training loop. Every active robot acts ε-greedily from
/// one model and all transitions enter one replay buffer. Robots that reach
/// their goal or collide leave the episode; the episode restarts in a fresh
/// environment from the current curriculum stage once no robot is left or
/// `l_episode_max` steps have passed. The model is evaluated greedily on a
/// fixed environment set every `eval_freq` steps and at the final step.
///
/// With `out`, a checkpoint and a line of `eval_log.jsonl` are written at
/// each evaluation, and the final model to `model.json`. `on_eval` sees each
/// log entry as it is produced.
pub fn train(
    config: &TrainConfig,
    schedule: &CurriculumSchedule,
    out: Option<&Path>,
    mut on_eval: impl FnMut(&EvalLogEntry),
) -> Result<TrainOutcome, TrainError> {
    config.validate()?;
    let mut init_rng = SimRng::seed_from_u64(derive_seed(config.seed, &[STREAM_INIT]));
    let mut rng = SimRng::seed_from_u64(derive_seed(config.seed, &[STREAM_ACT]));
    let model = Model::new(config.model_kind, config.network, &mut init_rng);
    let mut learner = Learner::new(model, config);
    let mut buffer = ReplayBuffer::new(config.buffer_capacity);
    let eval_envs = generate_eval_envs(config, schedule, config.eval_envs_per_level)?;

    let mut log_file = match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            Some(std::fs::File::create(dir.join("eval_log.jsonl"))?)
        }
        None => None,
    };

    let mut log = Vec::new();
    let mut episodes = 0u64;
    let mut transitions = 0u64;
    let mut loss_sum = 0.0;
    let mut loss_count = 0u64;
    let mut world = None;
    let mut episode_len = 0u64;

    for t in 0..config.t_total {
        let w = match &mut world {
            Some(w) => w,
            None => {
                let level = schedule.level_at(t + 1);
                let seed = derive_seed(config.seed, &[STREAM_TRAIN_ENV, episodes]);
                episodes += 1;
                episode_len = 0;
                world.insert(config.generator.generate(&level, seed)?.to_world()?)
            }
        };

        let epsilon = epsilon_at(t, config)?;
        let ids = w.active_ids();
        let mut actions = vec![0usize; ids.len()];
        let mut greedy = Vec::new();
        for (k, slot) in actions.iter_mut().enumerate() {
            if rng.random::<f64>() < epsilon {
                *slot = rng.random_range(0..ACTION_COUNT);
            } else {
                greedy.push(k);
            }
        }
        let observations = ids.iter().map(|&id| observe(w, id)).collect::<Result<Vec<_>, _>>()?;
        if !greedy.is_empty() {
            let obs: Vec<_> = greedy.iter().map(|&k| observations[k]).collect();
            let chosen = learner.model.select_actions(&obs, &vec![1.0; obs.len()], &mut rng)?;
            for (&k, a) in greedy.iter().zip(chosen) {
                actions[k] = a;
            }
        }
        let paired: Vec<_> = ids
            .iter()
            .zip(&actions)
            .map(|(&id, &a)| (id, Action::from_index(a).expect("valid action index")))
            .collect();
        let outcomes = w.step(&paired)?;
        for (o, state) in outcomes.iter().zip(observations) {
            let terminal = matches!(o.next.status, RobotStatus::ReachedGoal | RobotStatus::Collided);
            buffer.push(Transition {
                state,
                action: o.action.index(),
                reward: o.reward,
                next_state: observe_unchecked(w, o.robot_id)?,
                terminal,
                outcome: o.next.status,
            });
            transitions += 1;
        }
        episode_len += 1;
        if !w.any_active() || episode_len >= config.l_episode_max {
            world = None;
        }

        let step = t + 1;
        if step % config.learn_freq == 0 && buffer.len() >= config.batch_size {
            loss_sum += learner.learn_step(&buffer, &mut rng)?;
            loss_count += 1;
        }
        if step % config.eval_freq == 0 || step == config.t_total {
            let report = evaluate_checkpoint(
                &learner.model,
                &eval_envs,
                RiskMode::Greedy,
                config.l_episode_max,
                config.seed,
            )?;
            let entry = EvalLogEntry {
                step,
                epsilon: epsilon_at(step, config)?,
                episodes_started: episodes,
                learn_steps: learner.learn_steps,
                mean_loss: (loss_count > 0).then(|| loss_sum / loss_count as f64),
                report,
            };
            loss_sum = 0.0;
            loss_count = 0;
            if let (Some(dir), Some(file)) = (out, log_file.as_mut()) {
                save_checkpoint(&learner.model, &dir.join(format!("checkpoint_{step:09}.json")), step, config.seed)?;
                let line = serde_json::to_string(&entry).expect("log entries serialize");
                writeln!(file, "{line}")?;
            }
            on_eval(&entry);
            log.push(entry);
        }
    }

    if let Some(dir) = out {
        save_checkpoint(&learner.model, &dir.join("model.json"), config.t_total, config.seed)?;
    }
    Ok(TrainOutcome {
        buffer_len: buffer.len(),
        model: learner.model,
        log,
        transitions,
        episodes,
        learn_steps: learner.learn_steps,
    })
}
