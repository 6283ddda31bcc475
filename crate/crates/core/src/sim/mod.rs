//! Two-dimensional marine simulation: robots steering through Rankine vortex
//! currents among circular static obstacles.

mod action;
mod generate;
mod observation;
mod robot;
mod scenario;
mod vortex;
mod world;

pub use action::{Action, ACCELERATIONS, ACTION_COUNT, TURN_RATES};
pub use generate::{CurriculumLevel, EnvironmentGenerator, VortexSampling, OBSTACLE_RADIUS};
pub use observation::{
    observe, observe_unchecked, Observation, DYNAMIC_FEATURES, DYNAMIC_SLOTS, EGO_FEATURES, OBS_DIM, STATIC_FEATURES,
    STATIC_SLOTS,
};
pub use robot::{reward, step_robot, RobotState, RobotStatus, R_COLLISION, R_GOAL, R_STEP};
pub use scenario::{RobotSpawn, Scenario};
pub use vortex::{current_at, rankine_velocity, Vortex};
pub use world::{transition_status, StaticObstacle, StepOutcome, World, WorldParams};

pub type Vec2 = glam::DVec2;

/// Seedable generator used everywhere reproducibility matters.
pub type SimRng = rand_chacha::ChaCha8Rng;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SimError {
    #[error("robot {0} does not exist")]
    UnknownRobot(usize),
    #[error("robot {0} is not active")]
    InactiveRobot(usize),
    #[error("robot is not active")]
    NotActive,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("environment generation infeasible: {0}")]
    Infeasible(String),
}

/// Wraps an angle into `[-pi, pi)`.
pub fn wrap_angle(angle: f64) -> f64 {
    use std::f64::consts::PI;
    let wrapped = (angle + PI).rem_euclid(2.0 * PI) - PI;
    // rem_euclid can round up to exactly 2*pi
    if wrapped >= PI {
        wrapped - 2.0 * PI
    } else {
        wrapped
    }
}

/// Rotates a global-frame vector into a frame whose x-axis points along `heading`.
pub fn to_body_frame(v: Vec2, heading: f64) -> Vec2 {
    let (s, c) = heading.sin_cos();
    Vec2::new(c * v.x + s * v.y, -s * v.x + c * v.y)
}
