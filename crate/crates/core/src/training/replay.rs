use rand::Rng;

use crate::sim::{Observation, RobotStatus};

/// One robot's experience from a single step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub state: Observation,
    pub action: usize,
    pub reward: f64,
    pub next_state: Observation,
    /// True when the robot reached its goal or collided; the TD target then
    /// has no bootstrap term.
    pub terminal: bool,
    pub outcome: RobotStatus,
}

/// Fixed-capacity FIFO experience store.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    storage: Vec<Transition>,
    capacity: usize,
    cursor: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        ReplayBuffer {
            storage: Vec::with_capacity(capacity.min(1 << 20)),
            capacity,
            cursor: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.storage.len()
    }

    pub fn is_empty(&self) -> bool {
        self.storage.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Appends, overwriting the oldest entry once full.
    pub fn push(&mut self, t: Transition) {
        if self.storage.len() < self.capacity {
            self.storage.push(t);
        } else {
            self.storage[self.cursor] = t;
        }
        self.cursor = (self.cursor + 1) % self.capacity;
    }

    /// Entries from oldest to newest.
    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        let split = if self.storage.len() < self.capacity { 0 } else { self.cursor };
        self.storage[split..].iter().chain(&self.storage[..split])
    }

    /// Uniform sample without replacement; `None` if fewer than `size` entries.
    pub fn sample<R: Rng + ?Sized>(&self, size: usize, rng: &mut R) -> Option<Vec<&Transition>> {
        if size > self.storage.len() {
            return None;
        }
        Some(
            rand::seq::index::sample(rng, self.storage.len(), size)
                .into_iter()
                .map(|i| &self.storage[i])
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn transition(reward: f64) -> Transition {
        Transition {
            state: Observation::default(),
            action: 0,
            reward,
            next_state: Observation::default(),
            terminal: false,
            outcome: RobotStatus::Active,
        }
    }

    #[test]
    fn evicts_oldest() {
        let mut buf = ReplayBuffer::new(3);
        for k in 0..5 {
            buf.push(transition(k as f64));
        }
        assert_eq!(buf.len(), 3);
        let rewards: Vec<f64> = buf.iter().map(|t| t.reward).collect();
        assert_eq!(rewards, vec![2.0, 3.0, 4.0]);
    }

    #[test]
    fn sample_without_replacement() {
        let mut buf = ReplayBuffer::new(10);
        for k in 0..10 {
            buf.push(transition(k as f64));
        }
        let mut rng = crate::sim::SimRng::seed_from_u64(0);
        let batch = buf.sample(10, &mut rng).unwrap();
        let mut seen: Vec<i64> = batch.iter().map(|t| t.reward as i64).collect();
        seen.sort();
        assert_eq!(seen, (0..10).collect::<Vec<_>>());
        assert!(buf.sample(11, &mut rng).is_none());
    }
}
