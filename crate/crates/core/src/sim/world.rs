use serde::{Deserialize, Serialize};

use super::{
    current_at, reward, step_robot, Action, RobotState, RobotStatus, SimError, Vec2, Vortex,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticObstacle {
    pub center: Vec2,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorldParams {
    /// Control period, s.
    pub dt: f64,
    /// Maximum steering speed, m/s.
    pub v_max: f64,
    /// Collision radius of every robot, m.
    pub robot_radius: f64,
    /// Distance to goal at which a robot counts as arrived, m.
    pub goal_threshold: f64,
    /// Sensing radius for obstacles and other robots, m.
    pub detection_range: f64,
    /// Side of the square workspace `[0, extent]²`, m.
    pub workspace_extent: f64,
}

impl Default for WorldParams {
    fn default() -> Self {
        WorldParams {
            dt: 0.2,
            v_max: 2.0,
            robot_radius: 0.8,
            goal_threshold: 2.0,
            detection_range: 15.0,
            workspace_extent: 50.0,
        }
    }
}

impl WorldParams {
    pub fn validate(&self) -> Result<(), SimError> {
        let fields = [
            ("dt", self.dt),
            ("v_max", self.v_max),
            ("robot_radius", self.robot_radius),
            ("goal_threshold", self.goal_threshold),
            ("detection_range", self.detection_range),
            ("workspace_extent", self.workspace_extent),
        ];
        for (name, value) in fields {
            if !(value > 0.0 && value.is_finite()) {
                return Err(SimError::InvalidParameter(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub robots: Vec<RobotState>,
    pub obstacles: Vec<StaticObstacle>,
    pub vortices: Vec<Vortex>,
    pub sim_time: f64,
    /// Control steps taken; `sim_time` is always `steps * dt`.
    pub steps: u64,
    pub params: WorldParams,
}

/// Result of moving one robot during [`World::step`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub robot_id: usize,
    pub action: Action,
    pub prev: RobotState,
    pub next: RobotState,
    pub reward: f64,
}

impl World {
    pub fn robot(&self, id: usize) -> Result<&RobotState, SimError> {
        self.robots.get(id).ok_or(SimError::UnknownRobot(id))
    }

    pub fn active_ids(&self) -> Vec<usize> {
        (0..self.robots.len())
            .filter(|&i| self.robots[i].is_active())
            .collect()
    }

    pub fn any_active(&self) -> bool {
        self.robots.iter().any(RobotState::is_active)
    }

    pub fn current_at(&self, point: Vec2) -> Vec2 {
        current_at(&self.vortices, point)
    }

    /// Ground velocity of a robot: steering plus local current.
    pub fn total_velocity(&self, id: usize) -> Result<Vec2, SimError> {
        let r = self.robot(id)?;
        Ok(self.current_at(r.position) + r.steering_velocity())
    }

    /// Static obstacles within detection range of `id`, nearest first.
    pub fn detected_obstacles(&self, id: usize) -> Result<Vec<(f64, &StaticObstacle)>, SimError> {
        let pos = self.robot(id)?.position;
        let range = self.params.detection_range;
        let mut found: Vec<_> = self
            .obstacles
            .iter()
            .map(|o| (pos.distance(o.center), o))
            .filter(|(d, _)| *d <= range)
            .collect();
        found.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(found)
    }

    /// Other active robots within detection range of `id`, nearest first.
    pub fn detected_robots(&self, id: usize) -> Result<Vec<(f64, usize)>, SimError> {
        let pos = self.robot(id)?.position;
        let range = self.params.detection_range;
        let mut found: Vec<_> = self
            .robots
            .iter()
            .enumerate()
            .filter(|(j, r)| *j != id && r.is_active())
            .map(|(j, r)| (pos.distance(r.position), j))
            .filter(|(d, _)| *d <= range)
            .collect();
        found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Ok(found)
    }

    /// Moves every robot listed in `actions` simultaneously, then resolves
    /// collisions and arrivals against the post-move configuration. Robots that
    /// collide or arrive stop being active.
    pub fn step(&mut self, actions: &[(usize, Action)]) -> Result<Vec<StepOutcome>, SimError> {
        let mut moved = Vec::with_capacity(actions.len());
        for &(id, action) in actions {
            let prev = *self.robot(id)?;
            let next = step_robot(&prev, action, &self.vortices, self.params.dt, self.params.v_max)
                .map_err(|_| SimError::InactiveRobot(id))?;
            moved.push((id, action, prev, next));
        }
        for &(id, _, _, next) in &moved {
            self.robots[id] = next;
        }
        let statuses = moved
            .iter()
            .map(|&(id, ..)| transition_status(self, id))
            .collect::<Result<Vec<_>, _>>()?;
        let mut outcomes = Vec::with_capacity(moved.len());
        for ((id, action, prev, mut next), status) in moved.into_iter().zip(statuses) {
            next.status = status;
            self.robots[id].status = status;
            outcomes.push(StepOutcome {
                robot_id: id,
                action,
                prev,
                next,
                reward: reward(&prev, &next, status),
            });
        }
        self.steps += 1;
        self.sim_time = self.steps as f64 * self.params.dt;
        Ok(outcomes)
    }

    /// Marks every still-active robot as deactivated.
    pub fn deactivate_remaining(&mut self) {
        for r in &mut self.robots {
            if r.is_active() {
                r.status = RobotStatus::Deactivated;
            }
        }
    }
}

/// Collision (touching counts) takes precedence over arrival.
pub fn transition_status(world: &World, robot_id: usize) -> Result<RobotStatus, SimError> {
    let me = world.robot(robot_id)?;
    let rr = world.params.robot_radius;
    let hits_obstacle = world
        .obstacles
        .iter()
        .any(|o| me.position.distance(o.center) <= o.radius + rr);
    let hits_robot = world
        .robots
        .iter()
        .enumerate()
        .any(|(j, r)| j != robot_id && r.is_active() && me.position.distance(r.position) <= 2.0 * rr);
    if hits_obstacle || hits_robot {
        Ok(RobotStatus::Collided)
    } else if me.distance_to_goal() <= world.params.goal_threshold {
        Ok(RobotStatus::ReachedGoal)
    } else {
        Ok(RobotStatus::Active)
    }
}
