use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::{EpisodeRecord, EvalError};
use crate::sim::{RobotStatus, ACCELERATIONS, TURN_RATES};

/// Control effort of one step: each channel normalized by its largest
/// magnitude.
pub fn action_energy(accel: f64, turn_rate: f64) -> f64 {
    accel.abs() / ACCELERATIONS[2] + turn_rate.abs() / TURN_RATES[2]
}

/// Summary statistics of a sample; quartiles use linear interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl Distribution {
    pub fn from_samples(samples: &[f64]) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let quantile = |q: f64| {
            let pos = q * (sorted.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
        };
        Some(Distribution {
            count: sorted.len(),
            mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
            min: sorted[0],
            q1: quantile(0.25),
            median: quantile(0.5),
            q3: quantile(0.75),
            max: sorted[sorted.len() - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelMetrics {
    pub level: usize,
    pub robots: usize,
    pub episodes: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Per-robot travel times, successful episodes only.
    pub travel_time: Option<Distribution>,
    /// Per-robot energy, successful episodes only.
    pub energy: Option<Distribution>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub levels: Vec<LevelMetrics>,
}

impl MetricsSummary {
    pub fn overall_success_rate(&self) -> f64 {
        let episodes: usize = self.levels.iter().map(|l| l.episodes).sum();
        let successes: usize = self.levels.iter().map(|l| l.successes).sum();
        successes as f64 / episodes.max(1) as f64
    }
}

/// Success rate per level, and time and energy distributions over the robots
/// of successful episodes.
pub fn compute_metrics(records: &[EpisodeRecord]) -> Result<MetricsSummary, EvalError> {
    if records.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut by_level: BTreeMap<usize, Vec<&EpisodeRecord>> = BTreeMap::new();
    for r in records {
        by_level.entry(r.level).or_default().push(r);
    }
    let levels = by_level
        .into_iter()
        .map(|(level, eps)| {
            let successes = eps.iter().filter(|e| e.success).count();
            let mut times = Vec::new();
            let mut energy = Vec::new();
            for e in eps.iter().filter(|e| e.success) {
                for track in &e.robots {
                    debug_assert_eq!(track.outcome, RobotStatus::ReachedGoal);
                    times.extend(track.arrival_time);
                    energy.push(track.energy());
                }
            }
            LevelMetrics {
                level,
                robots: eps[0].scenario.robots.len(),
                episodes: eps.len(),
                successes,
                success_rate: successes as f64 / eps.len() as f64,
                travel_time: Distribution::from_samples(&times),
                energy: Distribution::from_samples(&energy),
            }
        })
        .collect();
    Ok(MetricsSummary { levels })
}
