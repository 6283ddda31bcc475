use serde::{Deserialize, Serialize};

/// Linear accelerations available to the robot, m/s².
pub const ACCELERATIONS: [f64; 3] = [-0.4, 0.0, 0.4];
/// Turn rates available to the robot, rad/s.
pub const TURN_RATES: [f64; 3] = [-0.52, 0.0, 0.52];
pub const ACTION_COUNT: usize = 9;

/// One of the nine joint (acceleration, turn rate) commands.
///
/// Indices are acceleration-major: `index = 3 * accel_index + turn_index`,
/// so index 4 is (0, 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Action(u8);

impl Action {
    pub const IDLE: Action = Action(4);

    pub fn from_index(index: usize) -> Option<Self> {
        (index < ACTION_COUNT).then_some(Action(index as u8))
    }

    pub fn from_parts(accel_index: usize, turn_index: usize) -> Self {
        assert!(accel_index < 3 && turn_index < 3);
        Action((accel_index * 3 + turn_index) as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn accel_index(self) -> usize {
        self.index() / 3
    }

    pub fn turn_index(self) -> usize {
        self.index() % 3
    }

    pub fn accel(self) -> f64 {
        ACCELERATIONS[self.accel_index()]
    }

    pub fn turn_rate(self) -> f64 {
        TURN_RATES[self.turn_index()]
    }

    pub fn all() -> impl Iterator<Item = Action> {
        (0..ACTION_COUNT).map(|i| Action(i as u8))
    }
}
