use serde::{Deserialize, Serialize};

use super::{angle_between, pick_channel, PlannerError};
use crate::sim::{Action, RobotState, Vec2, World, ACCELERATIONS, TURN_RATES};

/// Gains of the improved potential field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApfParams {
    pub k_att: f64,
    pub k_rep: f64,
    pub k_v: f64,
    /// Exponent on the goal distance in the repulsive terms.
    pub n_exponent: u32,
    /// Influence distance of obstacles and robots, m.
    pub d0: f64,
    /// Multiplies the force component along the heading before it is
    /// matched to an acceleration.
    pub accel_scale: f64,
}

impl Default for ApfParams {
    fn default() -> Self {
        ApfParams {
            k_att: 50.0,
            k_rep: 500.0,
            k_v: 1.0,
            n_exponent: 2,
            d0: 10.0,
            accel_scale: 1.0 / 50.0,
        }
    }
}

const MIN_DISTANCE: f64 = 1e-6;

struct Dynamic {
    position: Vec2,
    velocity: Vec2,
}

struct Neighborhood {
    obstacles: Vec<Vec2>,
    robots: Vec<Dynamic>,
    own_velocity: Vec2,
    goal: Vec2,
}

fn neighborhood(world: &World, robot_id: usize) -> Result<Neighborhood, PlannerError> {
    let me = world.robot(robot_id)?;
    let obstacles = world
        .detected_obstacles(robot_id)?
        .into_iter()
        .map(|(_, o)| o.center)
        .collect();
    let robots = world
        .detected_robots(robot_id)?
        .into_iter()
        .map(|(_, j)| {
            Ok(Dynamic {
                position: world.robots[j].position,
                velocity: world.total_velocity(j)?,
            })
        })
        .collect::<Result<_, PlannerError>>()?;
    Ok(Neighborhood {
        obstacles,
        robots,
        own_velocity: world.total_velocity(robot_id)?,
        goal: me.goal,
    })
}

/// `d^n(X, X_g)` and its gradient.
fn goal_distance_power(x: Vec2, goal: Vec2, n: u32) -> (f64, Vec2) {
    let diff = x - goal;
    let d = diff.length();
    let value = d.powi(n as i32);
    // n * d^(n-1) * diff / d = n * d^(n-2) * diff
    let grad = if d == 0.0 {
        Vec2::ZERO
    } else {
        diff * (n as f64 * d.powi(n as i32 - 2))
    };
    (value, grad)
}

/// Value and gradient of `0.5 k_rep (1/d - 1/d0)^2 d_g^n` for one entity.
fn position_repulsion(x: Vec2, entity: Vec2, goal: Vec2, p: &ApfParams) -> Result<(f64, Vec2), PlannerError> {
    let diff = x - entity;
    let d = diff.length();
    if d < MIN_DISTANCE {
        return Err(PlannerError::Degenerate(format!(
            "robot coincides with an obstacle (distance {d:e})"
        )));
    }
    if d > p.d0 {
        return Ok((0.0, Vec2::ZERO));
    }
    let f = 1.0 / d - 1.0 / p.d0;
    let (g_pow, g_pow_grad) = goal_distance_power(x, goal, p.n_exponent);
    let value = 0.5 * p.k_rep * f * f * g_pow;
    let grad_d = diff / d;
    let grad = grad_d * (-p.k_rep * f * g_pow / (d * d)) + g_pow_grad * (0.5 * p.k_rep * f * f);
    Ok((value, grad))
}

/// Value and position gradient of `k_v v_ao / d`, active while approaching.
fn velocity_repulsion(x: Vec2, other: &Dynamic, own_velocity: Vec2, p: &ApfParams) -> (f64, Vec2) {
    let r = other.position - x;
    let d = r.length();
    if d > p.d0 {
        return (0.0, Vec2::ZERO);
    }
    let rel = own_velocity - other.velocity;
    let v_ao = rel.dot(r) / d;
    if v_ao <= 0.0 {
        return (0.0, Vec2::ZERO);
    }
    // U = k_v (rel . r) / d^2 with r = X_r - X
    let d2 = d * d;
    let value = p.k_v * v_ao / d;
    let grad = (-rel / d2 + r * (2.0 * rel.dot(r) / (d2 * d2))) * p.k_v;
    (value, grad)
}

fn potential_and_gradient(x: Vec2, n: &Neighborhood, p: &ApfParams) -> Result<(f64, Vec2), PlannerError> {
    let diff = x - n.goal;
    let mut value = 0.5 * p.k_att * diff.length_squared();
    let mut grad = diff * p.k_att;
    for &o in &n.obstacles {
        let (v, g) = position_repulsion(x, o, n.goal, p)?;
        value += v;
        grad += g;
    }
    for r in &n.robots {
        let (v, g) = position_repulsion(x, r.position, n.goal, p)?;
        value += v;
        grad += g;
        let (v, g) = velocity_repulsion(x, r, n.own_velocity, p);
        value += v;
        grad += g;
    }
    Ok((value, grad))
}

/// Total potential the robot would feel at `position`, with every other
/// entity and all velocities held at their current values.
pub fn apf_potential(world: &World, robot_id: usize, position: Vec2, params: &ApfParams) -> Result<f64, PlannerError> {
    let n = neighborhood(world, robot_id)?;
    Ok(potential_and_gradient(position, &n, params)?.0)
}

/// Negative analytic gradient of the attractive and repulsive potentials at
/// the robot's position.
pub fn apf_total_force(world: &World, robot_id: usize, params: &ApfParams) -> Result<Vec2, PlannerError> {
    let n = neighborhood(world, robot_id)?;
    let x = world.robot(robot_id)?.position;
    Ok(-potential_and_gradient(x, &n, params)?.1)
}

/// Turn rate that best aligns the heading with `force` after one step, and
/// the acceleration nearest the scaled force component along the heading.
pub fn apf_action(force: Vec2, state: &RobotState, params: &ApfParams, dt: f64) -> Action {
    if force == Vec2::ZERO {
        return Action::IDLE;
    }
    let target = force.y.atan2(force.x);
    let turn = pick_channel(TURN_RATES.map(|w| angle_between(state.heading + w * dt, target)));
    let along = force.dot(Vec2::from_angle(state.heading)) * params.accel_scale;
    let accel = pick_channel(ACCELERATIONS.map(|a| (a - along).abs()));
    Action::from_parts(accel, turn)
}
