use serde::{Deserialize, Serialize};
use std::path::Path;

use super::{LayerSpec, Model, ModelKind, NetworkShape};
use crate::nn::Parameterized;

pub const CHECKPOINT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("checkpoint I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt checkpoint: {0}")]
    Corrupt(#[from] serde_json::Error),
    #[error("unsupported checkpoint format version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("checkpoint holds a {found:?} model, expected {expected:?}")]
    WrongKind { found: ModelKind, expected: ModelKind },
    #[error("checkpoint shape mismatch: {0}")]
    Shape(String),
}

/// On-disk model snapshot. `parameters` holds one flat array per tensor, in
/// the order of `layer_specs`, weights (row-major, out x in) before bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub model_kind: ModelKind,
    pub layer_specs: Vec<LayerSpec>,
    pub parameters: Vec<Vec<f64>>,
    pub training_step: u64,
    pub rng_seed: u64,
}

impl Checkpoint {
    pub fn from_model(model: &Model, training_step: u64, rng_seed: u64) -> Self {
        Checkpoint {
            format_version: CHECKPOINT_FORMAT_VERSION,
            model_kind: model.kind(),
            layer_specs: model.layer_specs(),
            parameters: model.param_slices().iter().map(|s| s.to_vec()).collect(),
            training_step,
            rng_seed,
        }
    }

    pub fn into_model(self) -> Result<Model, CheckpointError> {
        if self.format_version != CHECKPOINT_FORMAT_VERSION {
            return Err(CheckpointError::Version {
                found: self.format_version,
                expected: CHECKPOINT_FORMAT_VERSION,
            });
        }
        let find = |name: &str| {
            self.layer_specs
                .iter()
                .find(|s| s.name == name)
                .map(|s| s.outputs)
                .ok_or_else(|| CheckpointError::Shape(format!("missing layer {name}")))
        };
        let shape = NetworkShape {
            encoder_width: find("ego_encoder")?,
            head_width: find("head_hidden1")?,
        };
        let mut model = Model::zeros(self.model_kind, shape);
        if model.layer_specs() != self.layer_specs {
            return Err(CheckpointError::Shape(
                "layer specs do not describe a supported network".into(),
            ));
        }
        let mut slots = model.param_slices_mut();
        if slots.len() != self.parameters.len() {
            return Err(CheckpointError::Shape(format!(
                "{} parameter arrays, expected {}",
                self.parameters.len(),
                slots.len()
            )));
        }
        for (k, (dst, src)) in slots.iter_mut().zip(&self.parameters).enumerate() {
            if dst.len() != src.len() {
                return Err(CheckpointError::Shape(format!(
                    "parameter array {k} has {} values, expected {}",
                    src.len(),
                    dst.len()
                )));
            }
            dst.copy_from_slice(src);
        }
        Ok(model)
    }

    pub fn into_model_of_kind(self, expected: ModelKind) -> Result<Model, CheckpointError> {
        if self.model_kind != expected {
            return Err(CheckpointError::WrongKind {
                found: self.model_kind,
                expected,
            });
        }
        self.into_model()
    }
}

pub fn save_checkpoint(
    model: &Model,
    path: &Path,
    training_step: u64,
    rng_seed: u64,
) -> Result<(), CheckpointError> {
    if model.param_slices().iter().flat_map(|s| s.iter()).any(|v| !v.is_finite()) {
        return Err(CheckpointError::Shape("non-finite parameter".into()));
    }
    let text = serde_json::to_string(&Checkpoint::from_model(model, training_step, rng_seed))?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<(Model, Checkpoint), CheckpointError> {
    let text = std::fs::read_to_string(path)?;
    let ckpt: Checkpoint = serde_json::from_str(&text)?;
    let model = ckpt.clone().into_model()?;
    Ok((model, ckpt))
}
