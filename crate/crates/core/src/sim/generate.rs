use rand::{RngExt, SeedableRng};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{RobotSpawn, Scenario, SimError, SimRng, StaticObstacle, Vec2, Vortex, WorldParams};

/// Radius of every generated static obstacle, m.
pub const OBSTACLE_RADIUS: f64 = 1.0;

/// Entity counts and spacing for one difficulty level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurriculumLevel {
    pub robots: usize,
    pub vortices: usize,
    pub obstacles: usize,
    pub min_start_goal_distance: f64,
}

impl CurriculumLevel {
    pub const fn new(robots: usize, vortices: usize, obstacles: usize, min_dist: f64) -> Self {
        CurriculumLevel {
            robots,
            vortices,
            obstacles,
            min_start_goal_distance: min_dist,
        }
    }

    /// The six training stages, easiest first.
    pub const TRAINING: [CurriculumLevel; 6] = [
        CurriculumLevel::new(3, 4, 0, 30.0),
        CurriculumLevel::new(5, 6, 0, 35.0),
        CurriculumLevel::new(7, 8, 2, 40.0),
        CurriculumLevel::new(7, 8, 4, 40.0),
        CurriculumLevel::new(7, 8, 6, 40.0),
        CurriculumLevel::new(7, 8, 8, 40.0),
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VortexSampling {
    /// Range of |Γ|, m²/s.
    pub circulation: (f64, f64),
    /// Range of r0, m.
    pub core_radius: (f64, f64),
    /// Γ is shrunk so the tangential speed at the core never exceeds this, m/s.
    pub max_peak_speed: f64,
}

impl Default for VortexSampling {
    fn default() -> Self {
        VortexSampling {
            circulation: (PI, 4.0 * PI),
            core_radius: (3.0, 8.0),
            max_peak_speed: 1.5,
        }
    }
}

/// Rejection-sampling generator for random scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentGenerator {
    pub params: WorldParams,
    pub vortex: VortexSampling,
    /// Free space kept between spawn points and other robots or obstacles, m.
    pub spawn_clearance: f64,
    /// Minimum free gap between two obstacle surfaces, m.
    pub obstacle_gap: f64,
    pub max_attempts: usize,
}

impl Default for EnvironmentGenerator {
    fn default() -> Self {
        EnvironmentGenerator {
            params: WorldParams::default(),
            vortex: VortexSampling::default(),
            spawn_clearance: 2.0,
            obstacle_gap: 2.0,
            max_attempts: 10_000,
        }
    }
}

impl EnvironmentGenerator {
    /// Draws a scenario for `level`; the result depends only on `seed`.
    pub fn generate(&self, level: &CurriculumLevel, seed: u64) -> Result<Scenario, SimError> {
        self.params.validate()?;
        let mut rng = SimRng::seed_from_u64(seed);
        let extent = self.params.workspace_extent;
        let rr = self.params.robot_radius;

        let mut obstacles: Vec<StaticObstacle> = Vec::with_capacity(level.obstacles);
        for k in 0..level.obstacles {
            let center = self
                .sample_point(&mut rng, |p| {
                    obstacles.iter().all(|o| {
                        p.distance(o.center) >= 2.0 * OBSTACLE_RADIUS + self.obstacle_gap
                    })
                })
                .ok_or_else(|| SimError::Infeasible(format!("could not place obstacle {k}")))?;
            obstacles.push(StaticObstacle {
                center,
                radius: OBSTACLE_RADIUS,
            });
        }

        let clear_of_obstacles = |p: Vec2| {
            obstacles
                .iter()
                .all(|o| p.distance(o.center) > o.radius + rr + self.spawn_clearance)
        };
        let robot_spacing = 2.0 * rr + self.spawn_clearance;
        let mut robots: Vec<RobotSpawn> = Vec::with_capacity(level.robots);
        for k in 0..level.robots {
            let mut placed = None;
            for _ in 0..self.max_attempts {
                let start = self.uniform_point(&mut rng);
                let goal = self.uniform_point(&mut rng);
                let ok = start.distance(goal) >= level.min_start_goal_distance
                    && clear_of_obstacles(start)
                    && clear_of_obstacles(goal)
                    && robots.iter().all(|r| {
                        start.distance(r.start) >= robot_spacing
                            && goal.distance(r.goal) >= robot_spacing
                    });
                if ok {
                    placed = Some(RobotSpawn { start, goal });
                    break;
                }
            }
            robots.push(placed.ok_or_else(|| {
                SimError::Infeasible(format!(
                    "could not place robot {k} with start-goal distance >= {} in a {extent} m workspace",
                    level.min_start_goal_distance
                ))
            })?);
        }

        let vortices = (0..level.vortices)
            .map(|_| self.sample_vortex(&mut rng))
            .collect::<Result<Vec<_>, _>>()?;

        Ok(Scenario {
            params: self.params,
            robots,
            obstacles,
            vortices,
            seed,
        })
    }

    fn uniform_point(&self, rng: &mut SimRng) -> Vec2 {
        let e = self.params.workspace_extent;
        Vec2::new(rng.random_range(0.0..e), rng.random_range(0.0..e))
    }

    fn sample_point(&self, rng: &mut SimRng, accept: impl Fn(Vec2) -> bool) -> Option<Vec2> {
        (0..self.max_attempts)
            .map(|_| self.uniform_point(rng))
            .find(|&p| accept(p))
    }

    fn sample_vortex(&self, rng: &mut SimRng) -> Result<Vortex, SimError> {
        let center = self.uniform_point(rng);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let (g_lo, g_hi) = self.vortex.circulation;
        let (r_lo, r_hi) = self.vortex.core_radius;
        let magnitude = rng.random_range(g_lo..=g_hi);
        let core_radius = rng.random_range(r_lo..=r_hi);
        let cap = self.vortex.max_peak_speed * 2.0 * PI * core_radius;
        Vortex::new(center, sign * magnitude.min(cap), core_radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn training_table_columns() {
        let first = CurriculumLevel::TRAINING[0];
        assert_eq!((first.robots, first.vortices, first.obstacles), (3, 4, 0));
        assert_eq!(first.min_start_goal_distance, 30.0);
        let last = CurriculumLevel::TRAINING[5];
        assert_eq!((last.robots, last.vortices, last.obstacles), (7, 8, 8));
        assert_eq!(last.min_start_goal_distance, 40.0);
    }

    #[test]
    fn counts_and_constraints() {
        let gen = EnvironmentGenerator::default();
        for (i, level) in CurriculumLevel::TRAINING.iter().enumerate() {
            let s = gen.generate(level, 100 + i as u64).unwrap();
            assert_eq!(s.robots.len(), level.robots);
            assert_eq!(s.vortices.len(), level.vortices);
            assert_eq!(s.obstacles.len(), level.obstacles);
            for r in &s.robots {
                assert!(r.start.distance(r.goal) >= level.min_start_goal_distance);
                for o in &s.obstacles {
                    assert_eq!(o.radius, OBSTACLE_RADIUS);
                    assert!(r.start.distance(o.center) > o.radius + gen.params.robot_radius);
                }
            }
            for v in &s.vortices {
                assert!(v.peak_speed() <= gen.vortex.max_peak_speed + 1e-12);
            }
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let gen = EnvironmentGenerator::default();
        let level = CurriculumLevel::TRAINING[3];
        assert_eq!(gen.generate(&level, 7).unwrap(), gen.generate(&level, 7).unwrap());
        assert_ne!(gen.generate(&level, 7).unwrap(), gen.generate(&level, 8).unwrap());
    }

    #[test]
    fn infeasible_distance_reports_error() {
        let gen = EnvironmentGenerator {
            max_attempts: 50,
            ..Default::default()
        };
        let level = CurriculumLevel::new(1, 0, 0, 100.0);
        assert!(matches!(gen.generate(&level, 1), Err(SimError::Infeasible(_))));
    }

    #[test]
    fn peak_speed_cap_rescales() {
        let gen = EnvironmentGenerator {
            vortex: VortexSampling {
                circulation: (40.0, 40.0),
                core_radius: (1.0, 1.0),
                max_peak_speed: 1.5,
            },
            ..Default::default()
        };
        let s = gen.generate(&CurriculumLevel::new(1, 3, 0, 10.0), 3).unwrap();
        for v in s.vortices {
            assert!((v.peak_speed() - 1.5).abs() < 1e-12);
        }
    }
}
