use super::{to_body_frame, SimError, World};

pub const EGO_FEATURES: usize = 4;
pub const STATIC_SLOTS: usize = 5;
pub const STATIC_FEATURES: usize = 3;
pub const DYNAMIC_SLOTS: usize = 5;
pub const DYNAMIC_FEATURES: usize = 4;
pub const OBS_DIM: usize =
    EGO_FEATURES + STATIC_SLOTS * STATIC_FEATURES + DYNAMIC_SLOTS * DYNAMIC_FEATURES;

/// Fixed-size robot-frame observation:
/// `[goal_x, goal_y, vel_x, vel_y]`, then five `[x, y, radius]` obstacle
/// slots, then five `[x, y, vel_x, vel_y]` robot slots. Unused slots are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation(pub [f64; OBS_DIM]);

impl Default for Observation {
    fn default() -> Self {
        Observation([0.0; OBS_DIM])
    }
}

impl Observation {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn ego(&self) -> &[f64] {
        &self.0[..EGO_FEATURES]
    }

    pub fn statics(&self) -> &[f64] {
        &self.0[EGO_FEATURES..EGO_FEATURES + STATIC_SLOTS * STATIC_FEATURES]
    }

    pub fn dynamics(&self) -> &[f64] {
        &self.0[EGO_FEATURES + STATIC_SLOTS * STATIC_FEATURES..]
    }

    pub fn from_slice(values: &[f64]) -> Option<Self> {
        let arr: [f64; OBS_DIM] = values.try_into().ok()?;
        Some(Observation(arr))
    }
}

/// Builds the observation of robot `robot_id`. Positions are relative to the
/// robot and rotated so the x-axis points along its heading; velocities are
/// ground velocities (steering plus current) rotated into the same frame.
pub fn observe(world: &World, robot_id: usize) -> Result<Observation, SimError> {
    if !world.robot(robot_id)?.is_active() {
        return Err(SimError::InactiveRobot(robot_id));
    }
    observe_unchecked(world, robot_id)
}

/// [`observe`] without the activity check, for the final state of a robot
/// that has just arrived or collided.
pub fn observe_unchecked(world: &World, robot_id: usize) -> Result<Observation, SimError> {
    let me = world.robot(robot_id)?;
    let heading = me.heading;
    let mut obs = [0.0; OBS_DIM];

    let goal = to_body_frame(me.goal - me.position, heading);
    let vel = to_body_frame(world.total_velocity(robot_id)?, heading);
    obs[..EGO_FEATURES].copy_from_slice(&[goal.x, goal.y, vel.x, vel.y]);

    let base = EGO_FEATURES;
    for (slot, (_, o)) in world
        .detected_obstacles(robot_id)?
        .into_iter()
        .take(STATIC_SLOTS)
        .enumerate()
    {
        let p = to_body_frame(o.center - me.position, heading);
        let at = base + slot * STATIC_FEATURES;
        obs[at..at + STATIC_FEATURES].copy_from_slice(&[p.x, p.y, o.radius]);
    }

    let base = EGO_FEATURES + STATIC_SLOTS * STATIC_FEATURES;
    for (slot, (_, j)) in world
        .detected_robots(robot_id)?
        .into_iter()
        .take(DYNAMIC_SLOTS)
        .enumerate()
    {
        let other = &world.robots[j];
        let p = to_body_frame(other.position - me.position, heading);
        let v = to_body_frame(world.total_velocity(j)?, heading);
        let at = base + slot * DYNAMIC_FEATURES;
        obs[at..at + DYNAMIC_FEATURES].copy_from_slice(&[p.x, p.y, v.x, v.y]);
    }
    Ok(Observation(obs))
}
