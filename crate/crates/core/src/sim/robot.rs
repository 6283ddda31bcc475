use serde::{Deserialize, Serialize};

use super::{current_at, wrap_angle, Action, SimError, Vec2, Vortex};

pub const R_STEP: f64 = -1.0;
pub const R_COLLISION: f64 = -50.0;
pub const R_GOAL: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RobotStatus {
    Active,
    ReachedGoal,
    Collided,
    /// Still underway when the episode was cut off.
    Deactivated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub position: Vec2,
    /// Direction of the steering velocity, in `[-pi, pi)`.
    pub heading: f64,
    /// Magnitude of the steering velocity, in `[0, v_max]`.
    pub steer_speed: f64,
    pub goal: Vec2,
    pub status: RobotStatus,
}

impl RobotState {
    pub fn steering_velocity(&self) -> Vec2 {
        Vec2::from_angle(self.heading) * self.steer_speed
    }

    pub fn distance_to_goal(&self) -> f64 {
        self.position.distance(self.goal)
    }

    pub fn is_active(&self) -> bool {
        self.status == RobotStatus::Active
    }
}

/// Advances one control step: controls are applied to the steering state
/// first, then the robot is displaced by current plus the updated steering
/// velocity.
pub fn step_robot(
    state: &RobotState,
    action: Action,
    vortices: &[Vortex],
    dt: f64,
    v_max: f64,
) -> Result<RobotState, SimError> {
    if !state.is_active() {
        return Err(SimError::NotActive);
    }
    let heading = wrap_angle(state.heading + action.turn_rate() * dt);
    let steer_speed = (state.steer_speed + action.accel() * dt).clamp(0.0, v_max);
    let steering = Vec2::from_angle(heading) * steer_speed;
    let velocity = current_at(vortices, state.position) + steering;
    Ok(RobotState {
        position: state.position + velocity * dt,
        heading,
        steer_speed,
        ..*state
    })
}

/// Step penalty plus progress toward the goal plus terminal bonuses.
pub fn reward(prev: &RobotState, next: &RobotState, status: RobotStatus) -> f64 {
    let progress = prev.distance_to_goal() - next.distance_to_goal();
    let terminal = match status {
        RobotStatus::Collided => R_COLLISION,
        RobotStatus::ReachedGoal => R_GOAL,
        _ => 0.0,
    };
    R_STEP + progress + terminal
}
