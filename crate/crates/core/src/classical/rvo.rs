use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{angle_between, pick_channel, PlannerError};
use crate::sim::{Action, RobotState, Vec2, World, ACCELERATIONS, TURN_RATES};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RvoParams {
    /// Weight of the inverse time-to-collision penalty.
    pub w_i: f64,
    /// Speed of the preferred velocity, m/s.
    pub preferred_speed: f64,
    /// Speeds sampled evenly over `[0, preferred_speed]`, both ends included.
    pub speed_samples: usize,
    /// Directions sampled evenly around the circle, starting at the goal
    /// direction and proceeding counter-clockwise.
    pub heading_samples: usize,
    /// Collisions further ahead than this are ignored, s.
    pub tc_horizon: f64,
}

impl Default for RvoParams {
    fn default() -> Self {
        RvoParams {
            w_i: 0.2,
            preferred_speed: 2.0,
            speed_samples: 8,
            heading_samples: 36,
            tc_horizon: 10.0,
        }
    }
}

impl RvoParams {
    pub fn velocity_samples(&self) -> usize {
        self.speed_samples * self.heading_samples
    }
}

/// Cone of velocities leading to collision with one entity.
///
/// `distance` is the center distance to the entity that generated the cone;
/// the combined radius follows as `distance * sin(half_angle)`. A candidate
/// velocity `v` moves relative to the entity at `relative_scale * (v - apex)`:
/// 1 for a plain velocity obstacle, 2 for a reciprocal one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityCone {
    pub apex: Vec2,
    pub axis_dir: Vec2,
    pub half_angle: f64,
    pub distance: f64,
    pub relative_scale: f64,
}

impl VelocityCone {
    pub fn combined_radius(&self) -> f64 {
        self.distance * self.half_angle.sin()
    }

    /// Strict interior membership.
    pub fn contains(&self, velocity: Vec2) -> bool {
        let rel = velocity - self.apex;
        let len = rel.length();
        len > 0.0 && rel.dot(self.axis_dir) / len > self.half_angle.cos()
    }

    /// Time until the entity's inflated disc is first touched when moving at
    /// `velocity`; infinite if it never is.
    pub fn time_to_collision(&self, velocity: Vec2) -> f64 {
        let w = (velocity - self.apex) * self.relative_scale;
        let p = self.axis_dir * self.distance;
        let r = self.combined_radius();
        let c = p.length_squared() - r * r;
        if c <= 0.0 {
            return 0.0;
        }
        let b = w.dot(p);
        let a = w.length_squared();
        if b <= 0.0 || a == 0.0 {
            return f64::INFINITY;
        }
        let disc = b * b - a * c;
        // a tangent ray counts as touching
        if disc < -1e-12 * b * b {
            return f64::INFINITY;
        }
        (b - disc.max(0.0).sqrt()) / a
    }
}

/// Velocity obstacle induced on A by B moving at `other_vel`.
pub fn velocity_obstacle(
    ego_pos: Vec2,
    ego_radius: f64,
    other_pos: Vec2,
    other_radius: f64,
    other_vel: Vec2,
) -> Result<VelocityCone, PlannerError> {
    let offset = other_pos - ego_pos;
    let d = offset.length();
    let combined = ego_radius + other_radius;
    if d <= combined {
        return Err(PlannerError::Degenerate(format!(
            "discs overlap: distance {d} <= combined radius {combined}"
        )));
    }
    Ok(VelocityCone {
        apex: other_vel,
        axis_dir: offset / d,
        half_angle: (combined / d).asin(),
        distance: d,
        relative_scale: 1.0,
    })
}

/// Same cone with its apex moved to the mean of both velocities.
pub fn reciprocal_velocity_obstacle(vo: &VelocityCone, ego_vel: Vec2, other_vel: Vec2) -> VelocityCone {
    VelocityCone {
        apex: (ego_vel + other_vel) / 2.0,
        relative_scale: 2.0,
        ..*vo
    }
}

/// Earliest collision over all cones; infinite when none is hit.
pub fn time_to_collision(candidate_vel: Vec2, cones: &[VelocityCone]) -> f64 {
    cones
        .iter()
        .map(|c| c.time_to_collision(candidate_vel))
        .fold(f64::INFINITY, f64::min)
}

/// Chooses among `candidates`: the collision-free one (within the horizon)
/// nearest `preferred` if any exists, otherwise the one minimizing
/// `w_i / tc + |preferred - v|`. Ties go to the lowest index.
pub fn rvo_select_velocity(
    candidates: &[Vec2],
    preferred: Vec2,
    cones: &[VelocityCone],
    params: &RvoParams,
) -> usize {
    let tcs: Vec<f64> = candidates
        .iter()
        .map(|&v| {
            let tc = time_to_collision(v, cones);
            if tc > params.tc_horizon {
                f64::INFINITY
            } else {
                tc
            }
        })
        .collect();
    let argmin = |cost: &dyn Fn(usize) -> f64| {
        let mut best = None::<(usize, f64)>;
        for i in 0..candidates.len() {
            let c = cost(i);
            if best.is_none_or(|(_, b)| c < b) {
                best = Some((i, c));
            }
        }
        best
    };
    let deviation = |i: usize| (preferred - candidates[i]).length();
    let free = argmin(&|i| if tcs[i].is_infinite() { deviation(i) } else { f64::INFINITY });
    if let Some((i, cost)) = free {
        if cost.is_finite() {
            return i;
        }
    }
    let penalized = argmin(&|i| {
        if tcs[i] == 0.0 {
            f64::INFINITY
        } else {
            params.w_i / tcs[i] + deviation(i)
        }
    });
    match penalized {
        Some((i, cost)) if cost.is_finite() => i,
        // every candidate is already in contact: take the latest collision
        _ => argmin(&|i| -tcs[i]).map_or(0, |(i, _)| i),
    }
}

/// Turn rate that best aligns the heading with `velocity` after one step, and
/// the acceleration whose resulting speed is closest to its magnitude.
pub fn velocity_to_action(velocity: Vec2, state: &RobotState, dt: f64, v_max: f64) -> Action {
    let speed = velocity.length();
    let turn = if speed == 0.0 {
        1
    } else {
        let target = velocity.y.atan2(velocity.x);
        pick_channel(TURN_RATES.map(|w| angle_between(state.heading + w * dt, target)))
    };
    let accel = pick_channel(
        ACCELERATIONS.map(|a| ((state.steer_speed + a * dt).clamp(0.0, v_max) - speed).abs()),
    );
    Action::from_parts(accel, turn)
}

fn candidate_velocities(goal_direction: f64, params: &RvoParams) -> Vec<Vec2> {
    let mut out = Vec::with_capacity(params.velocity_samples());
    let top = params.speed_samples.saturating_sub(1).max(1) as f64;
    for h in 0..params.heading_samples {
        let dir = Vec2::from_angle(goal_direction + 2.0 * PI * h as f64 / params.heading_samples as f64);
        for s in (0..params.speed_samples).rev() {
            out.push(dir * (params.preferred_speed * s as f64 / top));
        }
    }
    out
}

/// Reciprocal velocity obstacle planner: other robots contribute RVOs,
/// static obstacles plain VOs, and the selected velocity is mapped onto the
/// discrete action set.
pub fn rvo_action(world: &World, robot_id: usize, params: &RvoParams) -> Result<Action, PlannerError> {
    let me = world.robot(robot_id)?;
    let rr = world.params.robot_radius;
    let own_vel = world.total_velocity(robot_id)?;
    let mut cones = Vec::new();
    for (_, j) in world.detected_robots(robot_id)? {
        let other = &world.robots[j];
        let other_vel = world.total_velocity(j)?;
        if let Ok(vo) = velocity_obstacle(me.position, rr, other.position, rr, other_vel) {
            cones.push(reciprocal_velocity_obstacle(&vo, own_vel, other_vel));
        }
    }
    for (_, o) in world.detected_obstacles(robot_id)? {
        if let Ok(vo) = velocity_obstacle(me.position, rr, o.center, o.radius, Vec2::ZERO) {
            cones.push(vo);
        }
    }
    let to_goal = me.goal - me.position;
    let goal_direction = to_goal.y.atan2(to_goal.x);
    let preferred = Vec2::from_angle(goal_direction) * params.preferred_speed;
    let candidates = candidate_velocities(goal_direction, params);
    let chosen = candidates[rvo_select_velocity(&candidates, preferred, &cones, params)];
    Ok(velocity_to_action(chosen, me, world.params.dt, world.params.v_max))
}
