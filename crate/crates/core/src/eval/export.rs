use serde::{Deserialize, Serialize};
use std::path::Path;

use super::{EpisodeRecord, EvalError};
use crate::sim::RobotStatus;

/// One line of the trajectory CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub episode_id: usize,
    pub robot_id: usize,
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

/// Writes one row per robot per step, robot-major then time, with a header.
pub fn export_trajectories(record: &EpisodeRecord, path: &Path) -> Result<(), EvalError> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    writer.write_record([
        "episode_id", "robot_id", "t", "x", "y", "theta", "speed", "accel", "turn_rate", "reward", "status",
    ])?;
    for track in &record.robots {
        for r in &track.rows {
            writer.serialize(CsvRow {
                episode_id: record.episode_id,
                robot_id: track.robot_id,
                t: r.t,
                x: r.x,
                y: r.y,
                theta: r.theta,
                speed: r.speed,
                accel: r.accel,
                turn_rate: r.turn_rate,
                reward: r.reward,
                status: r.status,
            })?;
        }
    }
    writer.flush()?;
    Ok(())
}

pub fn read_trajectories(path: &Path) -> Result<Vec<CsvRow>, EvalError> {
    let mut reader = csv::Reader::from_path(path)?;
    Ok(reader.deserialize().collect::<Result<Vec<_>, _>>()?)
}
