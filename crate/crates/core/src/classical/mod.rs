//! Non-learning baselines mapped onto the discrete action set: an improved
//! artificial potential field and reciprocal velocity obstacles.

mod apf;
mod rvo;

pub use apf::{apf_action, apf_potential, apf_total_force, ApfParams};
pub use rvo::{
    reciprocal_velocity_obstacle, rvo_action, rvo_select_velocity, time_to_collision,
    velocity_obstacle, velocity_to_action, RvoParams, VelocityCone,
};

use crate::sim::SimError;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PlannerError {
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Picks the candidate with the smallest cost among the three options of an
/// action channel (`[negative, zero, positive]`). Ties prefer zero, then
/// negative.
pub(crate) fn pick_channel(costs: [f64; 3]) -> usize {
    let mut best = 1;
    for idx in [0, 2] {
        if costs[idx] < costs[best] {
            best = idx;
        }
    }
    best
}

/// Absolute angular difference in `[0, pi]`.
pub(crate) fn angle_between(a: f64, b: f64) -> f64 {
    crate::sim::wrap_angle(a - b).abs()
}
