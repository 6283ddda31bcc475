use serde::{Deserialize, Serialize};

use crate::sim::{SimError, World};

/// How the CVaR threshold is chosen when acting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum RiskMode {
    /// `phi = 1`: plain expectation over the return distribution.
    Greedy,
    Fixed { phi: f64 },
    /// `phi` shrinks linearly with the distance to the nearest detected
    /// obstacle or robot once it is within `d0`.
    Adaptive { d0: f64 },
}

impl RiskMode {
    pub fn phi(&self, world: &World, robot_id: usize) -> Result<f64, SimError> {
        match *self {
            RiskMode::Greedy => Ok(1.0),
            RiskMode::Fixed { phi } => {
                if phi > 0.0 && phi <= 1.0 {
                    Ok(phi)
                } else {
                    Err(SimError::InvalidParameter(format!("CVaR threshold {phi} outside (0, 1]")))
                }
            }
            RiskMode::Adaptive { d0 } => adaptive_cvar_threshold(world, robot_id, d0),
        }
    }
}

/// `min(d, d0) / d0` for the nearest detected obstacle or robot center, or 1
/// when nothing is detected.
pub fn adaptive_cvar_threshold(world: &World, robot_id: usize, d0: f64) -> Result<f64, SimError> {
    if !(d0 > 0.0) {
        return Err(SimError::InvalidParameter(format!("d0 must be positive, got {d0}")));
    }
    let nearest_obstacle = world.detected_obstacles(robot_id)?.first().map(|p| p.0);
    let nearest_robot = world.detected_robots(robot_id)?.first().map(|p| p.0);
    let nearest = match (nearest_obstacle, nearest_robot) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => return Ok(1.0),
    };
    // a coincident entity would give 0, which is not a valid threshold
    Ok((nearest.min(d0) / d0).max(f64::EPSILON))
}
