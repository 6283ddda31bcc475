use rand::Rng;

use super::{argmax, observation_matrix, uniform_taus, DqnModel, IqnCache, IqnModel};
use crate::nn::{Matrix, NnError};
use crate::sim::ACTION_COUNT;
use crate::training::Transition;

/// Pairwise TD errors for a batch of transitions, with the cache needed to
/// backpropagate through the online model.
pub struct IqnTdBatch {
    /// `B x N` online quantile fractions.
    pub taus: Matrix,
    /// One `N x N'` matrix per transition.
    pub deltas: Vec<Matrix>,
    /// Action chosen at the next state by the target model.
    pub next_actions: Vec<usize>,
    /// Online outputs, `(B*N) x 9`.
    pub online: Matrix,
    pub cache: IqnCache,
}

/// `delta_ij = r + gamma * Z_tau'_j(s', a') - Z_tau_i(s, a)`, where `a'` is the
/// target model's greedy action at `s'` (mean over the `N'` target
/// fractions, no distortion). Terminal transitions drop the bootstrap term.
pub fn iqn_td_deltas<R: Rng + ?Sized>(
    batch: &[&Transition],
    model: &IqnModel,
    target_model: &IqnModel,
    n: usize,
    n_prime: usize,
    gamma: f64,
    rng: &mut R,
) -> Result<IqnTdBatch, NnError> {
    let b = batch.len();
    let taus = uniform_taus(b, n, rng);
    let target_taus = uniform_taus(b, n_prime, rng);
    let ones = vec![1.0; b];

    let states: Vec<_> = batch.iter().map(|t| t.state).collect();
    let next_states: Vec<_> = batch.iter().map(|t| t.next_state).collect();
    let (online, cache) = model.forward(&observation_matrix(&states), &taus, &ones)?;
    let (target, _) = target_model.forward(&observation_matrix(&next_states), &target_taus, &ones)?;

    let mut deltas = Vec::with_capacity(b);
    let mut next_actions = Vec::with_capacity(b);
    for (s, t) in batch.iter().enumerate() {
        let mut mean = [0.0; ACTION_COUNT];
        for j in 0..n_prime {
            for (m, v) in mean.iter_mut().zip(target.row(s * n_prime + j)) {
                *m += v;
            }
        }
        let a_next = argmax(&mean);
        next_actions.push(a_next);
        let bootstrap = if t.terminal { 0.0 } else { gamma };
        let mut d = Matrix::zeros(n, n_prime);
        for i in 0..n {
            let z = online[(s * n + i, t.action)];
            for j in 0..n_prime {
                d[(i, j)] = t.reward + bootstrap * target[(s * n_prime + j, a_next)] - z;
            }
        }
        deltas.push(d);
    }
    Ok(IqnTdBatch {
        taus,
        deltas,
        next_actions,
        online,
        cache,
    })
}

/// `r + gamma * max_a' Q_target(s', a')`, bootstrap dropped on terminals.
pub fn dqn_targets(batch: &[&Transition], target_model: &DqnModel, gamma: f64) -> Result<Vec<f64>, NnError> {
    let next_states: Vec<_> = batch.iter().map(|t| t.next_state).collect();
    let (q_next, _) = target_model.forward(&observation_matrix(&next_states))?;
    Ok(batch
        .iter()
        .enumerate()
        .map(|(s, t)| {
            if t.terminal {
                t.reward
            } else {
                let row = q_next.row(s);
                t.reward + gamma * row[argmax(row)]
            }
        })
        .collect())
}
