//! Checks shared by the integration suites and the acceptance report. Each
//! returns the measured quantities so callers can apply their own bounds.

#![allow(dead_code)]

use rand::{RngExt, SeedableRng};
use std::f64::consts::PI;

use asv_nav::classical::{velocity_obstacle, ApfParams, RvoParams};
use asv_nav::eval::{run_episode, run_experiment_suite, suite_scenarios, Controller, EpisodeRecord, ExperimentConfig, PolicyChoice};
use asv_nav::nn::gradcheck::{finite_difference_check, finite_difference_check_strided, relative_error, GradCheck, FD_STEP};
use asv_nav::nn::{Parameterized, dqn_loss, iqn_loss, quantile_huber, relu_backward_in_place, relu_in_place, LinearLayer, Matrix};
use asv_nav::policy::{iqn_td_deltas, IqnModel, Model, ModelKind, NetworkShape, RiskMode};
use asv_nav::sim::{
    observe, rankine_velocity, reward, step_robot, Action, RobotSpawn, RobotState, RobotStatus, Scenario,
    SimRng, StaticObstacle, Vec2, Vortex, World, WorldParams, ACTION_COUNT,
};
use asv_nav::training::{epsilon_at, train, CurriculumSchedule, Learner, TrainConfig, Transition};

pub fn rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

pub fn random_vortex(r: &mut SimRng) -> Vortex {
    let sign = if r.random_bool(0.5) { 1.0 } else { -1.0 };
    Vortex::new(
        Vec2::new(r.random_range(0.0..50.0), r.random_range(0.0..50.0)),
        sign * r.random_range(PI..4.0 * PI),
        r.random_range(3.0..8.0),
    )
    .unwrap()
}

// ---- physics ------------------------------------------------------------

/// Largest jump in current across the core boundary, `r0 (1 ± eps)`.
pub fn rankine_continuity_gap(seeds: u64, eps: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for s in 0..seeds {
        let mut r = rng(s);
        let v = random_vortex(&mut r);
        let dir = Vec2::from_angle(r.random_range(-PI..PI));
        let inside = rankine_velocity(&v, v.center + dir * v.core_radius * (1.0 - eps));
        let outside = rankine_velocity(&v, v.center + dir * v.core_radius * (1.0 + eps));
        worst = worst.max((inside - outside).length());
    }
    worst
}

/// Largest radial component of a single vortex's current.
pub fn max_radial_flow(seeds: u64) -> f64 {
    let mut worst: f64 = 0.0;
    for s in 0..seeds {
        let mut r = rng(s);
        let v = random_vortex(&mut r);
        let dir = Vec2::from_angle(r.random_range(-PI..PI));
        let dist = r.random_range(0.01..30.0);
        let u = rankine_velocity(&v, v.center + dir * dist);
        worst = worst.max(u.dot(dir).abs());
    }
    worst
}

/// Steering speed range seen over random action sequences in random currents.
pub fn steering_speed_range(seeds: u64, steps: usize) -> (f64, f64) {
    let params = WorldParams::default();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in 0..seeds {
        let mut r = rng(s);
        let vortices: Vec<_> = (0..4).map(|_| random_vortex(&mut r)).collect();
        let mut state = RobotState {
            position: Vec2::new(25.0, 25.0),
            heading: r.random_range(-PI..PI),
            steer_speed: r.random_range(0.0..params.v_max),
            goal: Vec2::new(1e6, 1e6),
            status: RobotStatus::Active,
        };
        for _ in 0..steps {
            let a = Action::from_index(r.random_range(0..ACTION_COUNT)).unwrap();
            state = step_robot(&state, a, &vortices, params.dt, params.v_max).unwrap();
            lo = lo.min(state.steer_speed);
            hi = hi.max(state.steer_speed);
        }
    }
    (lo, hi)
}

pub fn random_world(r: &mut SimRng, robots: usize, obstacles: usize, vortices: usize) -> World {
    let point = |r: &mut SimRng| Vec2::new(r.random_range(5.0..45.0), r.random_range(5.0..45.0));
    World {
        robots: (0..robots)
            .map(|_| RobotState {
                position: point(r),
                heading: r.random_range(-PI..PI),
                steer_speed: r.random_range(0.0..2.0),
                goal: point(r),
                status: RobotStatus::Active,
            })
            .collect(),
        obstacles: (0..obstacles)
            .map(|_| StaticObstacle {
                center: point(r),
                radius: 1.0,
            })
            .collect(),
        vortices: (0..vortices).map(|_| random_vortex(r)).collect(),
        sim_time: 0.0,
        steps: 0,
        params: WorldParams::default(),
    }
}

/// The same world rotated by `angle` about the origin and then shifted.
pub fn transform_world(world: &World, angle: f64, shift: Vec2) -> World {
    let rot = Vec2::from_angle(angle);
    let map = |p: Vec2| rot.rotate(p) + shift;
    let mut w = world.clone();
    for robot in &mut w.robots {
        robot.position = map(robot.position);
        robot.goal = map(robot.goal);
        robot.heading += angle;
    }
    for o in &mut w.obstacles {
        o.center = map(o.center);
    }
    for v in &mut w.vortices {
        v.center = map(v.center);
    }
    w
}

/// Largest change of any observation feature under rigid motions.
pub fn frame_invariance_gap(seeds: u64) -> f64 {
    let mut worst: f64 = 0.0;
    for s in 0..seeds {
        let mut r = rng(s);
        let world = random_world(&mut r, 6, 7, 5);
        let moved = transform_world(
            &world,
            r.random_range(-PI..PI),
            Vec2::new(r.random_range(-100.0..100.0), r.random_range(-100.0..100.0)),
        );
        for id in 0..world.robots.len() {
            let a = observe(&world, id).unwrap();
            let b = observe(&moved, id).unwrap();
            for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    worst
}

// ---- numerics -----------------------------------------------------------

pub fn random_matrix(r: &mut SimRng, rows: usize, cols: usize, scale: f64) -> Matrix {
    let data = (0..rows * cols).map(|_| r.random_range(-scale..scale)).collect();
    Matrix::from_vec(rows, cols, data).unwrap()
}

fn dot(a: &Matrix, b: &Matrix) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).sum()
}

/// Linear layer followed by ReLU, against `sum(upstream * relu(W x + b))`.
/// Checks parameter and input gradients.
pub fn linear_layer_error(seed: u64) -> f64 {
    let mut r = rng(seed);
    let (inputs, outputs, batch) = (r.random_range(1..7), r.random_range(1..7), r.random_range(1..5));
    let mut layer = LinearLayer::init(inputs, outputs, &mut r);
    layer.bias.iter_mut().for_each(|b| *b = r.random_range(-0.5..0.5));
    let x = random_matrix(&mut r, batch, inputs, 2.0);
    let up = random_matrix(&mut r, batch, outputs, 1.0);

    let loss = |l: &LinearLayer, x: &Matrix| {
        let mut y = l.forward(x).unwrap();
        relu_in_place(&mut y);
        dot(&y, &up)
    };
    let mut y = layer.forward(&x).unwrap();
    relu_in_place(&mut y);
    let mut g = up.clone();
    relu_backward_in_place(&mut g, &y);
    let (grads, dx) = layer.backward(&x, &g, true).unwrap();
    let dx = dx.unwrap();
    let mut worst = finite_difference_check(&mut layer, |l| loss(l, &x), &grads.into_gradients(), FD_STEP).worst;

    for i in 0..x.as_slice().len() {
        let mut up_x = x.clone();
        up_x.as_mut_slice()[i] += FD_STEP;
        let mut down_x = x.clone();
        down_x.as_mut_slice()[i] -= FD_STEP;
        let numeric = (loss(&layer, &up_x) - loss(&layer, &down_x)) / (2.0 * FD_STEP);
        worst = worst.max(relative_error(dx.as_slice()[i], numeric));
    }
    worst
}

pub fn small_shape() -> NetworkShape {
    NetworkShape {
        encoder_width: 4,
        head_width: 6,
    }
}

pub fn random_transitions(r: &mut SimRng, n: usize) -> Vec<Transition> {
    let obs = |r: &mut SimRng| {
        let mut o = asv_nav::sim::Observation::default();
        o.0.iter_mut().for_each(|v| *v = r.random_range(-3.0..3.0));
        o
    };
    (0..n)
        .map(|k| Transition {
            state: obs(r),
            action: r.random_range(0..ACTION_COUNT),
            reward: r.random_range(-3.0..3.0),
            next_state: obs(r),
            terminal: k % 3 == 0,
            outcome: if k % 3 == 0 { RobotStatus::Collided } else { RobotStatus::Active },
        })
        .collect()
}

/// Zero biases put every all-zero input row exactly on a ReLU kink, where
/// central differences are meaningless; move them off it.
pub fn jitter_biases(model: &mut Model, r: &mut SimRng) {
    for (k, tensor) in model.param_slices_mut().into_iter().enumerate() {
        if k % 2 == 1 {
            tensor.iter_mut().for_each(|b| *b = r.random_range(-0.2..0.2));
        }
    }
}

/// Full model gradient of the batch TD loss (encoders, quantile embedding,
/// product, head, and either loss) against central differences.
pub fn full_model_check(kind: ModelKind, shape: NetworkShape, seed: u64, stride: usize) -> GradCheck {
    let mut r = rng(seed);
    let config = TrainConfig {
        model_kind: kind,
        network: shape,
        n_quantiles: 3,
        n_target_quantiles: 4,
        ..TrainConfig::default()
    };
    let mut model = Model::new(kind, shape, &mut r);
    let mut target = Model::new(kind, shape, &mut r);
    jitter_biases(&mut model, &mut r);
    jitter_biases(&mut target, &mut r);
    let data = random_transitions(&mut r, 4);
    let batch: Vec<_> = data.iter().collect();
    let tau_seed = r.random::<u64>();
    let loss_of = |m: &Model| {
        let mut l = Learner::new(m.clone(), &config);
        l.target = target.clone();
        l.loss_and_gradients(&batch, &mut rng(tau_seed)).unwrap()
    };
    let (_, grads) = loss_of(&model);
    if stride <= 1 {
        finite_difference_check(&mut model, |m| loss_of(m).0, &grads, FD_STEP)
    } else {
        finite_difference_check_strided(&mut model, |m| loss_of(m).0, &grads, FD_STEP, stride, seed as usize % stride)
    }
}

/// Derivative of the quantile Huber loss in the residual, both branches.
pub fn quantile_huber_error(seed: u64) -> f64 {
    let mut r = rng(seed);
    let tau = r.random_range(0.0..1.0);
    let mut u: f64 = r.random_range(-4.0..4.0);
    if (u.abs() - 1.0).abs() < 1e-3 || u.abs() < 1e-3 {
        u += 0.01;
    }
    let (_, d) = quantile_huber(u, tau, 1.0);
    let numeric = (quantile_huber(u + FD_STEP, tau, 1.0).0 - quantile_huber(u - FD_STEP, tau, 1.0).0) / (2.0 * FD_STEP);
    relative_error(d, numeric)
}

pub fn iqn_loss_error(seed: u64) -> f64 {
    let mut r = rng(seed);
    let (n, m) = (r.random_range(1..9), r.random_range(1..9));
    let deltas = random_matrix(&mut r, n, m, 3.0);
    let taus: Vec<f64> = (0..n).map(|_| r.random_range(0.0..1.0)).collect();
    let (_, grad) = iqn_loss(&deltas, &taus).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..n * m {
        let mut up = deltas.clone();
        up.as_mut_slice()[i] += FD_STEP;
        let mut down = deltas.clone();
        down.as_mut_slice()[i] -= FD_STEP;
        let numeric = (iqn_loss(&up, &taus).unwrap().0 - iqn_loss(&down, &taus).unwrap().0) / (2.0 * FD_STEP);
        worst = worst.max(relative_error(grad.as_slice()[i], numeric));
    }
    worst
}

pub fn dqn_loss_error(seed: u64) -> f64 {
    let mut r = rng(seed);
    let n = r.random_range(1..20);
    let pred: Vec<f64> = (0..n).map(|_| r.random_range(-5.0..5.0)).collect();
    let targets: Vec<f64> = (0..n).map(|_| r.random_range(-5.0..5.0)).collect();
    let (_, grad) = dqn_loss(&pred, &targets).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let mut up = pred.clone();
        up[i] += FD_STEP;
        let mut down = pred.clone();
        down[i] -= FD_STEP;
        let numeric = (dqn_loss(&up, &targets).unwrap().0 - dqn_loss(&down, &targets).unwrap().0) / (2.0 * FD_STEP);
        worst = worst.max(relative_error(grad[i], numeric));
    }
    worst
}

/// Scalar double loop: sum over online fractions, mean over target samples.
pub fn iqn_loss_oracle(deltas: &[Vec<f64>], taus: &[f64]) -> f64 {
    let mut total = 0.0;
    for (row, &tau) in deltas.iter().zip(taus) {
        for &u in row {
            let huber = if u.abs() <= 1.0 { 0.5 * u * u } else { u.abs() - 0.5 };
            let weight = if u < 0.0 { (tau - 1.0).abs() } else { tau.abs() };
            total += weight * huber / row.len() as f64;
        }
    }
    total
}

pub fn iqn_loss_oracle_gap(seed: u64) -> f64 {
    let mut r = rng(seed);
    let (n, m) = (r.random_range(1..9), r.random_range(1..9));
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| r.random_range(-3.0..3.0)).collect()).collect();
    let taus: Vec<f64> = (0..n).map(|_| r.random_range(0.0..1.0)).collect();
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    let (loss, _) = iqn_loss(&Matrix::from_vec(n, m, flat).unwrap(), &taus).unwrap();
    (loss - iqn_loss_oracle(&rows, &taus)).abs()
}

/// Folds gradient checks into (worst error, worst kink fraction).
pub fn fold_checks(checks: impl IntoIterator<Item = GradCheck>) -> (f64, f64) {
    checks
        .into_iter()
        .fold((0.0, 0.0), |(w, k), c| (w.max(c.worst), k.max(c.kink_fraction())))
}

#[derive(Debug, Default, Clone, Copy)]
pub struct NumericsReport {
    pub layer: f64,
    pub iqn_model: f64,
    pub dqn_model: f64,
    pub full_width_iqn: f64,
    pub quantile_huber: f64,
    pub iqn_loss: f64,
    pub dqn_loss: f64,
    pub oracle_gap: f64,
    /// Largest share of coordinates skipped as kinks in any model check.
    pub kink_fraction: f64,
}

impl NumericsReport {
    pub fn max_gradient_error(&self) -> f64 {
        [
            self.layer,
            self.iqn_model,
            self.dqn_model,
            self.full_width_iqn,
            self.quantile_huber,
            self.iqn_loss,
            self.dqn_loss,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn numerics_suite(seeds: u64) -> NumericsReport {
    let mut rep = NumericsReport::default();
    for s in 0..seeds {
        rep.layer = rep.layer.max(linear_layer_error(s));
        for (kind, slot) in [(ModelKind::Iqn, &mut rep.iqn_model), (ModelKind::Dqn, &mut rep.dqn_model)] {
            let c = full_model_check(kind, small_shape(), s, 1);
            *slot = slot.max(c.worst);
            rep.kink_fraction = rep.kink_fraction.max(c.kink_fraction());
        }
        rep.quantile_huber = rep.quantile_huber.max(quantile_huber_error(s));
        rep.iqn_loss = rep.iqn_loss.max(iqn_loss_error(s));
        rep.dqn_loss = rep.dqn_loss.max(dqn_loss_error(s));
        rep.oracle_gap = rep.oracle_gap.max(iqn_loss_oracle_gap(s));
    }
    let c = full_model_check(ModelKind::Iqn, NetworkShape::default(), 1, 997);
    rep.full_width_iqn = c.worst;
    rep.kink_fraction = rep.kink_fraction.max(c.kink_fraction());
    rep
}

// ---- formula spot checks ------------------------------------------------

fn constant_iqn(value: f64) -> IqnModel {
    let mut m = IqnModel::zeros(NetworkShape::default());
    m.output_bias_mut().fill(value);
    m
}

fn robot_at(position: Vec2, goal: Vec2) -> RobotState {
    RobotState {
        position,
        heading: 0.0,
        steer_speed: 0.0,
        goal,
        status: RobotStatus::Active,
    }
}

/// `(name, computed, expected)` for every hand-derived example.
pub fn formula_checks() -> Vec<(&'static str, f64, f64)> {
    let mut out = vec![
        ("quantile huber quadratic", quantile_huber(0.5, 0.5, 1.0).0, 0.0625),
        ("quantile huber linear", quantile_huber(-2.0, 0.9, 1.0).0, 0.15),
    ];

    let t = Transition {
        state: Default::default(),
        action: 0,
        reward: 1.0,
        next_state: Default::default(),
        terminal: false,
        outcome: RobotStatus::Active,
    };
    let td = iqn_td_deltas(&[&t], &constant_iqn(1.5), &constant_iqn(2.0), 1, 1, 0.9, &mut rng(0)).unwrap();
    out.push(("TD error", td.deltas[0][(0, 0)], 1.3));

    let world = World {
        robots: vec![robot_at(Vec2::new(10.0, 10.0), Vec2::new(40.0, 40.0)), robot_at(Vec2::new(15.0, 10.0), Vec2::ZERO)],
        obstacles: vec![],
        vortices: vec![],
        sim_time: 0.0,
        steps: 0,
        params: WorldParams::default(),
    };
    out.push((
        "adaptive CVaR threshold",
        asv_nav::policy::adaptive_cvar_threshold(&world, 0, 10.0).unwrap(),
        0.5,
    ));

    let cfg = TrainConfig::default();
    out.push(("epsilon at start", epsilon_at(0, &cfg).unwrap(), 0.6));
    out.push(("epsilon after decay", epsilon_at(cfg.t_total / 4, &cfg).unwrap(), 0.05));

    let prev = robot_at(Vec2::new(0.0, 0.0), Vec2::new(10.0, 0.0));
    let moved = |d: f64| robot_at(Vec2::new(d, 0.0), Vec2::new(10.0, 0.0));
    out.push(("reward progress", reward(&prev, &moved(0.5), RobotStatus::Active), -0.5));
    out.push(("reward goal", reward(&prev, &moved(0.3), RobotStatus::ReachedGoal), 99.3));
    out.push(("reward collision", reward(&prev, &moved(0.2), RobotStatus::Collided), -50.8));

    let vo = velocity_obstacle(Vec2::ZERO, 1.0, Vec2::new(4.0, 0.0), 1.0, Vec2::ZERO).unwrap();
    out.push(("VO half angle", vo.half_angle, PI / 6.0));
    out
}

// ---- baselines ----------------------------------------------------------

pub fn scripted(robots: Vec<RobotSpawn>, obstacles: Vec<StaticObstacle>) -> Scenario {
    Scenario {
        params: WorldParams::default(),
        robots,
        obstacles,
        vortices: vec![],
        seed: 0,
    }
}

/// One robot, one obstacle slightly off the start-goal line.
pub fn apf_single_obstacle() -> EpisodeRecord {
    let s = scripted(
        vec![RobotSpawn {
            start: Vec2::new(10.0, 25.0),
            goal: Vec2::new(40.0, 25.0),
        }],
        vec![StaticObstacle {
            center: Vec2::new(25.0, 25.3),
            radius: 1.0,
        }],
    );
    run_episode(&s, &Controller::Apf(ApfParams::default()), 900, 0, 0, 0).unwrap()
}

/// Two robots swapping places along one line.
pub fn rvo_head_on() -> EpisodeRecord {
    let s = scripted(
        vec![
            RobotSpawn {
                start: Vec2::new(10.0, 25.0),
                goal: Vec2::new(40.0, 25.0),
            },
            RobotSpawn {
                start: Vec2::new(40.0, 25.0),
                goal: Vec2::new(10.0, 25.0),
            },
        ],
        vec![],
    );
    run_episode(&s, &Controller::Rvo(RvoParams::default()), 900, 0, 0, 0).unwrap()
}

/// Smallest center distance between the first two robots at common times.
pub fn min_pair_separation(record: &EpisodeRecord) -> f64 {
    let a = &record.robots[0];
    let b = &record.robots[1];
    let start = record.scenario.robots[0].start.distance(record.scenario.robots[1].start);
    a.rows
        .iter()
        .zip(&b.rows)
        .map(|(p, q)| Vec2::new(p.x, p.y).distance(Vec2::new(q.x, q.y)))
        .fold(start, f64::min)
}

// ---- protocol -----------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolReport {
    /// Scenarios generated for each level, in level order.
    pub per_level: Vec<usize>,
    pub min_start_goal_distance: f64,
    pub obstacle_radii: Vec<f64>,
    /// Obstacle counts seen per level (min, max).
    pub obstacle_counts: Vec<(usize, usize)>,
    /// Suite JSON is byte-identical for every policy choice.
    pub identical_across_policies: bool,
}

pub fn protocol_report(seed: u64) -> ProtocolReport {
    let policies = [
        PolicyChoice::Apf,
        PolicyChoice::Rvo,
        PolicyChoice::Dqn,
        PolicyChoice::IqnGreedy,
        PolicyChoice::IqnAdaptive,
    ];
    let bytes: Vec<String> = policies
        .iter()
        .map(|&policy| {
            let config = ExperimentConfig { policy, seed, ..ExperimentConfig::default() };
            serde_json::to_string(&suite_scenarios(&config).unwrap()).unwrap()
        })
        .collect();
    let config = ExperimentConfig { seed, ..ExperimentConfig::default() };
    let scenarios = suite_scenarios(&config).unwrap();
    let levels = config.robot_counts.len();
    let mut per_level = vec![0; levels];
    let mut obstacle_counts = vec![(usize::MAX, 0); levels];
    for s in &scenarios {
        per_level[s.level] += 1;
        let n = s.scenario.obstacles.len();
        let c = &mut obstacle_counts[s.level];
        *c = (c.0.min(n), c.1.max(n));
    }
    ProtocolReport {
        per_level,
        min_start_goal_distance: scenarios
            .iter()
            .flat_map(|s| s.scenario.robots.iter().map(|r| r.start.distance(r.goal)))
            .fold(f64::INFINITY, f64::min),
        obstacle_radii: scenarios
            .iter()
            .flat_map(|s| s.scenario.obstacles.iter().map(|o| o.radius))
            .collect(),
        obstacle_counts,
        identical_across_policies: bytes.windows(2).all(|w| w[0] == w[1]),
    }
}

/// An episode succeeds exactly when every robot reached its goal within
/// `timeout` simulated seconds.
pub fn failure_rule_holds(rec: &EpisodeRecord, timeout: f64) -> bool {
    let all_in_time = rec.robots.iter().all(|t| {
        t.outcome == RobotStatus::ReachedGoal && t.arrival_time.is_some_and(|a| a <= timeout + 1e-9)
    });
    rec.success == all_in_time
}

/// One robot that never moves toward its goal: an all-zero network ranks
/// every action equally and always picks the first, which brakes.
pub fn idle_robot_episode(max_steps: u64) -> EpisodeRecord {
    let s = scripted(
        vec![RobotSpawn {
            start: Vec2::new(5.0, 5.0),
            goal: Vec2::new(45.0, 45.0),
        }],
        vec![],
    );
    let model = Model::zeros(ModelKind::Dqn, NetworkShape::default());
    let controller = Controller::Learned { model: &model, risk: RiskMode::Greedy };
    run_episode(&s, &controller, max_steps, 0, 0, 0).unwrap()
}

/// Relative error between the APF force on robot 0 of a random world and
/// the central difference of its potential. `None` when the potential has a
/// kink within one step (an entity crossing the influence distance or a
/// robot switching between approaching and receding).
pub fn apf_gradient_error(seed: u64) -> Option<f64> {
    let mut r = rng(seed);
    let world = random_world(&mut r, 4, 4, 0);
    let p = ApfParams::default();
    let x = world.robots[0].position;
    let force = asv_nav::classical::apf_total_force(&world, 0, &p).ok()?;
    let u = |q: Vec2| asv_nav::classical::apf_potential(&world, 0, q, &p).unwrap();
    let h = 1e-6;
    let centre = u(x);
    let mut worst: f64 = 0.0;
    for (axis, analytic) in [(Vec2::new(h, 0.0), -force.x), (Vec2::new(0.0, h), -force.y)] {
        let (up, down) = (u(x + axis), u(x - axis));
        if relative_error((up - centre) / h, (centre - down) / h) > 1e-3 {
            return None;
        }
        worst = worst.max(relative_error(analytic, (up - down) / (2.0 * h)));
    }
    Some(worst)
}

// ---- determinism --------------------------------------------------------

pub fn tiny_train_config(kind: ModelKind, seed: u64) -> TrainConfig {
    TrainConfig {
        model_kind: kind,
        t_total: 1200,
        eval_freq: 600,
        eval_envs_per_level: 1,
        l_episode_max: 200,
        buffer_capacity: 2000,
        batch_size: 16,
        target_sync: 50,
        network: NetworkShape { encoder_width: 8, head_width: 8 },
        seed,
        ..TrainConfig::default()
    }
}

/// Metrics JSON and serialized parameters of one small training run.
pub fn train_fingerprint(kind: ModelKind, seed: u64) -> (String, Vec<Vec<f64>>) {
    let cfg = tiny_train_config(kind, seed);
    let schedule = CurriculumSchedule::scaled(cfg.t_total).unwrap();
    let outcome = train(&cfg, &schedule, None, |_| {}).unwrap();
    let params = outcome.model.param_slices().iter().map(|s| s.to_vec()).collect();
    (serde_json::to_string(&outcome.log).unwrap(), params)
}

/// Metrics JSON of a small mixed-suite evaluation.
pub fn eval_fingerprint(policy: PolicyChoice, model: Option<&Model>, seed: u64) -> String {
    let config = ExperimentConfig {
        policy,
        episodes_per_level: 2,
        robot_counts: vec![3, 7],
        seed,
        ..ExperimentConfig::default()
    };
    let (metrics, _) = run_experiment_suite(&config, model).unwrap();
    serde_json::to_string(&metrics).unwrap()
}
