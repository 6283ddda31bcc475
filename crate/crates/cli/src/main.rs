#![allow(clippy::neg_cmp_op_on_partial_ord)]

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use std::fs;
use std::path::{Path, PathBuf};

use asv_nav::classical::{ApfParams, RvoParams};
use asv_nav::eval::{
    export_trajectories, render_metrics_svg, render_svg, run_episode, run_experiment_suite, Controller,
    ExperimentConfig, MetricsSummary, PolicyChoice, Suite,
};
use asv_nav::policy::{load_checkpoint, Model, RiskMode};
use asv_nav::sim::Scenario;
use asv_nav::training::{train, CurriculumSchedule, TrainConfig};

#[derive(Parser)]
#[command(name = "asvnav", version, about = "Multi-vehicle navigation among vortex currents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a shared IQN or DQN policy on the curriculum.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one policy on an experiment suite.
    Eval {
        #[arg(long, value_enum)]
        policy: PolicyArg,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "mixed")]
        suite: SuiteArg,
        #[arg(long, default_value_t = 100)]
        episodes_per_level: usize,
        /// Restrict to these robot counts (3 to 7), comma separated.
        #[arg(long, value_delimiter = ',')]
        robots: Option<Vec<usize>>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write a CSV and SVG per episode.
        #[arg(long)]
        trajectories: bool,
    },
    /// Replay one scenario and write its trajectory CSV and SVG.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_enum)]
        policy: PolicyArg,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Simulated seconds.
        #[arg(long, default_value_t = 180.0)]
        timeout: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw a metrics JSON written by `eval` as an SVG bar chart.
    Plot {
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Apf,
    Rvo,
    Dqn,
    Iqn,
    IqnAdaptive,
}

impl From<PolicyArg> for PolicyChoice {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Apf => PolicyChoice::Apf,
            PolicyArg::Rvo => PolicyChoice::Rvo,
            PolicyArg::Dqn => PolicyChoice::Dqn,
            PolicyArg::Iqn => PolicyChoice::IqnGreedy,
            PolicyArg::IqnAdaptive => PolicyChoice::IqnAdaptive,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Dynamic,
    Mixed,
}

fn load_model(policy: PolicyChoice, path: Option<&Path>) -> Result<Option<Model>> {
    let Some(kind) = policy.model_kind() else {
        return Ok(None);
    };
    let Some(path) = path else {
        bail!("policy {policy:?} needs --model <checkpoint>");
    };
    let (model, _) = load_checkpoint(path).with_context(|| format!("loading {}", path.display()))?;
    if model.kind() != kind {
        bail!("{} holds a {:?} model, policy {policy:?} needs {kind:?}", path.display(), model.kind());
    }
    Ok(Some(model))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train { config, seed, out } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let mut config = TrainConfig::from_json(&text)?;
            config.seed = seed;
            let schedule = CurriculumSchedule::scaled(config.t_total)?;
            fs::create_dir_all(&out)?;
            write_json(&out.join("config.json"), &config)?;
            let outcome = train(&config, &schedule, Some(&out), |entry| {
                let rates: Vec<String> =
                    entry.report.levels.iter().map(|l| format!("{:.2}", l.success_rate)).collect();
                eprintln!(
                    "step {:>9}  eps {:.3}  loss {}  success by stage [{}]",
                    entry.step,
                    entry.epsilon,
                    entry.mean_loss.map_or("-".into(), |l| format!("{l:.4}")),
                    rates.join(", ")
                );
            })?;
            write_json(&out.join("metrics.json"), &outcome.log)?;
            println!("{}", out.join("model.json").display());
        }
        Command::Eval {
            policy,
            model,
            suite,
            episodes_per_level,
            robots,
            seed,
            out,
            trajectories,
        } => {
            let policy = PolicyChoice::from(policy);
            let mut config = ExperimentConfig {
                suite: match suite {
                    SuiteArg::Dynamic => Suite::DynamicOnly,
                    SuiteArg::Mixed => Suite::Mixed,
                },
                episodes_per_level,
                policy,
                seed,
                ..ExperimentConfig::default()
            };
            if let Some(robots) = robots {
                config.robot_counts = robots;
            }
            let model = load_model(policy, model.as_deref())?;
            let (metrics, records) = run_experiment_suite(&config, model.as_ref())?;
            fs::create_dir_all(&out)?;
            write_json(&out.join("metrics.json"), &metrics)?;
            let mut episodes = csv::Writer::from_path(out.join("episodes.csv"))?;
            episodes.write_record(["episode_id", "level", "robots", "success", "steps"])?;
            for r in &records {
                episodes.write_record([
                    r.episode_id.to_string(),
                    r.level.to_string(),
                    r.robots.len().to_string(),
                    r.success.to_string(),
                    r.steps.to_string(),
                ])?;
                if trajectories {
                    export_trajectories(r, &out.join(format!("episode_{:04}.csv", r.episode_id)))?;
                    render_svg(r, &out.join(format!("episode_{:04}.svg", r.episode_id)))?;
                }
            }
            episodes.flush()?;
            for level in &metrics.levels {
                println!(
                    "{} robots: success {:.2} ({}/{})",
                    level.robots, level.success_rate, level.successes, level.episodes
                );
            }
        }
        Command::Simulate {
            scenario,
            policy,
            model,
            seed,
            timeout,
            out,
        } => {
            let text =
                fs::read_to_string(&scenario).with_context(|| format!("reading {}", scenario.display()))?;
            let scenario = Scenario::from_json(&text).context("parsing scenario")?;
            let policy = PolicyChoice::from(policy);
            let model = load_model(policy, model.as_deref())?;
            let controller = match (policy, &model) {
                (PolicyChoice::Apf, _) => Controller::Apf(ApfParams::default()),
                (PolicyChoice::Rvo, _) => Controller::Rvo(RvoParams::default()),
                (PolicyChoice::IqnAdaptive, Some(m)) => Controller::Learned {
                    model: m,
                    risk: RiskMode::Adaptive { d0: ExperimentConfig::default().adaptive_d0 },
                },
                (_, Some(m)) => Controller::Learned {
                    model: m,
                    risk: RiskMode::Greedy,
                },
                (_, None) => unreachable!("load_model returns a model for learned policies"),
            };
            if !(timeout > 0.0) {
                bail!("timeout must be positive");
            }
            let max_steps = (timeout / scenario.params.dt + 1e-9).floor() as u64;
            let record = run_episode(&scenario, &controller, max_steps, seed, 0, 0)?;
            fs::create_dir_all(&out)?;
            export_trajectories(&record, &out.join("trajectory.csv"))?;
            render_svg(&record, &out.join("trajectory.svg"))?;
            for track in &record.robots {
                println!("robot {}: {:?}", track.robot_id, track.outcome);
            }
        }
        Command::Plot { metrics, out } => {
            let text = fs::read_to_string(&metrics).with_context(|| format!("reading {}", metrics.display()))?;
            let summary: MetricsSummary = serde_json::from_str(&text).context("parsing metrics")?;
            let title = metrics.file_stem().map_or("success rate".into(), |s| s.to_string_lossy().into_owned());
            fs::write(&out, render_metrics_svg(&summary, &title))
                .with_context(|| format!("writing {}", out.display()))?;
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
