//! Decentralized multi-robot collision avoidance among vortex currents and
//! static obstacles, with potential-field, reciprocal-velocity-obstacle, DQN
//! and risk-sensitive implicit-quantile policies.

// `!(x > 0.0)` is used on purpose so that NaN parameters are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod sim;
pub mod classical;
pub mod eval;
pub mod nn;
pub mod policy;
pub mod training;
