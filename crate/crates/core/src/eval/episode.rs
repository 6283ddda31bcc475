use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use super::{metrics::action_energy, Controller, EvalError};
use crate::sim::{RobotStatus, Scenario, SimRng};

/// State of one robot after one control step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub speed: f64,
    pub accel: f64,
    pub turn_rate: f64,
    pub reward: f64,
    pub status: RobotStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotTrack {
    pub robot_id: usize,
    pub rows: Vec<TrajectoryRow>,
    pub outcome: RobotStatus,
    /// Simulated time at which the goal was reached.
    pub arrival_time: Option<f64>,
}

impl RobotTrack {
    pub fn energy(&self) -> f64 {
        self.rows.iter().map(|r| action_energy(r.accel, r.turn_rate)).sum()
    }

    pub fn total_reward(&self) -> f64 {
        self.rows.iter().map(|r| r.reward).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode_id: usize,
    /// Difficulty level the scenario was drawn from.
    pub level: usize,
    pub scenario: Scenario,
    pub robots: Vec<RobotTrack>,
    /// True iff every robot reached its goal before the step limit.
    pub success: bool,
    pub steps: u64,
}

/// Runs `scenario` until no robot is active or `max_steps` control steps have
/// elapsed. Robots still underway at the limit are deactivated. `seed`
/// drives any randomness inside the controller.
pub fn run_episode(
    scenario: &Scenario,
    controller: &Controller,
    max_steps: u64,
    seed: u64,
    episode_id: usize,
    level: usize,
) -> Result<EpisodeRecord, EvalError> {
    let mut world = scenario.to_world()?;
    let mut rng = SimRng::seed_from_u64(seed);
    let mut tracks: Vec<RobotTrack> = (0..world.robots.len())
        .map(|robot_id| RobotTrack {
            robot_id,
            rows: Vec::new(),
            outcome: RobotStatus::Active,
            arrival_time: None,
        })
        .collect();
    while world.any_active() && world.steps < max_steps {
        let ids = world.active_ids();
        let actions = controller.act(&world, &ids, &mut rng)?;
        let paired: Vec<_> = ids.into_iter().zip(actions).collect();
        let outcomes = world.step(&paired)?;
        for o in outcomes {
            let track = &mut tracks[o.robot_id];
            track.rows.push(TrajectoryRow {
                t: world.sim_time,
                x: o.next.position.x,
                y: o.next.position.y,
                theta: o.next.heading,
                speed: o.next.steer_speed,
                accel: o.action.accel(),
                turn_rate: o.action.turn_rate(),
                reward: o.reward,
                status: o.next.status,
            });
            if o.next.status == RobotStatus::ReachedGoal {
                track.arrival_time = Some(world.sim_time);
            }
        }
    }
    world.deactivate_remaining();
    for (track, robot) in tracks.iter_mut().zip(&world.robots) {
        track.outcome = robot.status;
    }
    let success = tracks.iter().all(|t| t.outcome == RobotStatus::ReachedGoal);
    Ok(EpisodeRecord {
        episode_id,
        level,
        scenario: scenario.clone(),
        robots: tracks,
        success,
        steps: world.steps,
    })
}
