//! Learned policies: the implicit quantile network with CVaR risk
//! distortion, the DQN counterpart, action selection and checkpoints.

mod checkpoint;
mod network;
mod risk;
mod td;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, CheckpointError, CHECKPOINT_FORMAT_VERSION};
pub use network::{DqnCache, DqnModel, IqnCache, IqnModel, LayerSpec, NetworkShape};
pub use risk::{adaptive_cvar_threshold, RiskMode};
pub use td::{dqn_targets, iqn_td_deltas, IqnTdBatch};

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use crate::nn::{Matrix, NnError, Parameterized};
use crate::sim::{Observation, ACTION_COUNT, OBS_DIM};

/// Number of quantile samples averaged when acting.
pub const ACTING_QUANTILES: usize = 32;
/// Quantile samples for the online and target sides of the TD loss.
pub const TRAINING_QUANTILES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Iqn,
    Dqn,
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Fixed factor applied to every observation feature before the encoders.
/// Distances in metres reach ~50, which made the first layers train far
/// faster than the rest and destabilised late training.
pub const OBSERVATION_SCALE: f64 = 0.1;

/// Stacks observations row-wise, scaled by [`OBSERVATION_SCALE`].
pub fn observation_matrix(observations: &[Observation]) -> Matrix {
    let mut m = Matrix::zeros(observations.len(), OBS_DIM);
    for (i, o) in observations.iter().enumerate() {
        for (dst, src) in m.row_mut(i).iter_mut().zip(o.as_slice()) {
            *dst = src * OBSERVATION_SCALE;
        }
    }
    m
}

fn uniform_taus<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for v in m.as_mut_slice() {
        *v = rng.random_range(0.0..=1.0);
    }
    m
}

/// Risk-distorted action values: for each observation, the mean over `k`
/// sampled fractions of the quantile returns at `phi * tau`. `B x 9`.
pub fn iqn_action_values<R: Rng + ?Sized>(
    model: &IqnModel,
    observations: &[Observation],
    phis: &[f64],
    k: usize,
    rng: &mut R,
) -> Result<Matrix, NnError> {
    let taus = uniform_taus(observations.len(), k, rng);
    let (z, _) = model.forward(&observation_matrix(observations), &taus, phis)?;
    let mut q = Matrix::zeros(observations.len(), ACTION_COUNT);
    for b in 0..observations.len() {
        let row = q.row_mut(b);
        for s in 0..k {
            for (acc, v) in row.iter_mut().zip(z.row(b * k + s)) {
                *acc += v;
            }
        }
        row.iter_mut().for_each(|v| *v /= k as f64);
    }
    Ok(q)
}

/// Risk-sensitive greedy actions for a batch of robots sharing one model.
pub fn iqn_select_actions<R: Rng + ?Sized>(
    model: &IqnModel,
    observations: &[Observation],
    phis: &[f64],
    k: usize,
    rng: &mut R,
) -> Result<Vec<usize>, NnError> {
    if observations.is_empty() {
        return Ok(Vec::new());
    }
    let q = iqn_action_values(model, observations, phis, k, rng)?;
    Ok((0..q.rows()).map(|b| argmax(q.row(b))).collect())
}

pub fn iqn_select_action<R: Rng + ?Sized>(
    model: &IqnModel,
    observation: &Observation,
    phi: f64,
    k: usize,
    rng: &mut R,
) -> Result<usize, NnError> {
    Ok(iqn_select_actions(model, std::slice::from_ref(observation), &[phi], k, rng)?[0])
}

pub fn dqn_select_actions(model: &DqnModel, observations: &[Observation]) -> Result<Vec<usize>, NnError> {
    if observations.is_empty() {
        return Ok(Vec::new());
    }
    let (q, _) = model.forward(&observation_matrix(observations))?;
    Ok((0..q.rows()).map(|b| argmax(q.row(b))).collect())
}

pub fn dqn_select_action(model: &DqnModel, observation: &Observation) -> Result<usize, NnError> {
    Ok(dqn_select_actions(model, std::slice::from_ref(observation))?[0])
}

/// Either learned model behind one interface.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Iqn(IqnModel),
    Dqn(DqnModel),
}

impl Model {
    pub fn new<R: Rng + ?Sized>(kind: ModelKind, shape: NetworkShape, rng: &mut R) -> Self {
        match kind {
            ModelKind::Iqn => Model::Iqn(IqnModel::new(shape, rng)),
            ModelKind::Dqn => Model::Dqn(DqnModel::new(shape, rng)),
        }
    }

    pub fn zeros(kind: ModelKind, shape: NetworkShape) -> Self {
        match kind {
            ModelKind::Iqn => Model::Iqn(IqnModel::zeros(shape)),
            ModelKind::Dqn => Model::Dqn(DqnModel::zeros(shape)),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Iqn(_) => ModelKind::Iqn,
            Model::Dqn(_) => ModelKind::Dqn,
        }
    }

    pub fn shape(&self) -> NetworkShape {
        match self {
            Model::Iqn(m) => m.shape,
            Model::Dqn(m) => m.shape,
        }
    }

    pub fn layer_specs(&self) -> Vec<LayerSpec> {
        match self {
            Model::Iqn(m) => m.layer_specs(),
            Model::Dqn(m) => m.layer_specs(),
        }
    }

    /// Greedy actions; `phis` only matters for the quantile model.
    pub fn select_actions<R: Rng + ?Sized>(
        &self,
        observations: &[Observation],
        phis: &[f64],
        rng: &mut R,
    ) -> Result<Vec<usize>, NnError> {
        match self {
            Model::Iqn(m) => iqn_select_actions(m, observations, phis, ACTING_QUANTILES, rng),
            Model::Dqn(m) => dqn_select_actions(m, observations),
        }
    }
}

impl Parameterized for Model {
    fn param_slices(&self) -> Vec<&[f64]> {
        match self {
            Model::Iqn(m) => m.param_slices(),
            Model::Dqn(m) => m.param_slices(),
        }
    }

    fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        match self {
            Model::Iqn(m) => m.param_slices_mut(),
            Model::Dqn(m) => m.param_slices_mut(),
        }
    }
}
