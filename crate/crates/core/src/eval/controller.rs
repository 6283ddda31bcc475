use rand::RngExt;

use super::EvalError;
use crate::classical::{apf_action, apf_total_force, rvo_action, ApfParams, RvoParams};
use crate::policy::{Model, RiskMode};
use crate::sim::{observe, Action, SimRng, World, ACTION_COUNT};

/// Decision rule applied independently to every active robot.
#[derive(Debug, Clone)]
pub enum Controller<'a> {
    Apf(ApfParams),
    Rvo(RvoParams),
    /// One shared model acting for all robots.
    Learned { model: &'a Model, risk: RiskMode },
    /// Uniformly random actions.
    Random,
}

impl Controller<'_> {
    /// Actions for `ids`, in the same order.
    pub fn act(&self, world: &World, ids: &[usize], rng: &mut SimRng) -> Result<Vec<Action>, EvalError> {
        let dt = world.params.dt;
        match self {
            Controller::Apf(p) => ids
                .iter()
                .map(|&id| {
                    let force = apf_total_force(world, id, p)?;
                    Ok(apf_action(force, &world.robots[id], p, dt))
                })
                .collect(),
            Controller::Rvo(p) => ids.iter().map(|&id| Ok(rvo_action(world, id, p)?)).collect(),
            Controller::Learned { model, risk } => {
                let observations = ids
                    .iter()
                    .map(|&id| observe(world, id))
                    .collect::<Result<Vec<_>, _>>()?;
                let phis = ids
                    .iter()
                    .map(|&id| risk.phi(world, id))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(model
                    .select_actions(&observations, &phis, rng)?
                    .into_iter()
                    .map(|a| Action::from_index(a).expect("model emits valid action indices"))
                    .collect())
            }
            Controller::Random => Ok(ids
                .iter()
                .map(|_| Action::from_index(rng.random_range(0..ACTION_COUNT)).expect("in range"))
                .collect()),
        }
    }
}
