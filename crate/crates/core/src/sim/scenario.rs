use serde::{Deserialize, Serialize};

use super::{RobotState, RobotStatus, SimError, StaticObstacle, Vec2, Vortex, World, WorldParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotSpawn {
    pub start: Vec2,
    pub goal: Vec2,
}

/// Serializable description of an episode's initial conditions.
///
/// Points are `[x, y]` arrays in meters; `gamma` is the signed circulation
/// in m²/s (positive is counter-clockwise) and `r0` the core radius in m.
/// Robots start at rest, facing their goal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub params: WorldParams,
    pub robots: Vec<RobotSpawn>,
    pub obstacles: Vec<StaticObstacle>,
    pub vortices: Vec<Vortex>,
    pub seed: u64,
}

impl Scenario {
    pub fn to_world(&self) -> Result<World, SimError> {
        self.params.validate()?;
        for v in &self.vortices {
            v.validate()?;
        }
        if let Some(o) = self.obstacles.iter().find(|o| !(o.radius > 0.0)) {
            return Err(SimError::InvalidParameter(format!(
                "obstacle radius must be positive, got {}",
                o.radius
            )));
        }
        let robots = self
            .robots
            .iter()
            .map(|s| {
                let to_goal = s.goal - s.start;
                RobotState {
                    position: s.start,
                    heading: super::wrap_angle(to_goal.y.atan2(to_goal.x)),
                    steer_speed: 0.0,
                    goal: s.goal,
                    status: RobotStatus::Active,
                }
            })
            .collect();
        Ok(World {
            robots,
            obstacles: self.obstacles.clone(),
            vortices: self.vortices.clone(),
            sim_time: 0.0,
            steps: 0,
            params: self.params,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
