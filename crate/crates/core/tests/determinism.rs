mod common;

use asv_nav::eval::PolicyChoice;
use asv_nav::policy::{Model, ModelKind, NetworkShape};
use common::*;

#[test]
fn training_reruns_match() {
    for kind in [ModelKind::Iqn, ModelKind::Dqn] {
        assert_eq!(train_fingerprint(kind, 3), train_fingerprint(kind, 3), "{kind:?}");
    }
}

#[test]
fn training_depends_on_seed() {
    assert_ne!(train_fingerprint(ModelKind::Iqn, 3).1, train_fingerprint(ModelKind::Iqn, 4).1);
}

#[test]
fn evaluation_reruns_match() {
    let iqn = Model::new(ModelKind::Iqn, NetworkShape::default(), &mut rng(1));
    let dqn = Model::new(ModelKind::Dqn, NetworkShape::default(), &mut rng(2));
    let runs = [
        (PolicyChoice::Apf, None),
        (PolicyChoice::Rvo, None),
        (PolicyChoice::Dqn, Some(&dqn)),
        (PolicyChoice::IqnGreedy, Some(&iqn)),
        (PolicyChoice::IqnAdaptive, Some(&iqn)),
    ];
    for (policy, model) in runs {
        assert_eq!(eval_fingerprint(policy, model, 8), eval_fingerprint(policy, model, 8), "{policy:?}");
    }
}
