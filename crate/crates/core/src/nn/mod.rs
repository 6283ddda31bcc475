//! Small dense-network toolkit with hand-written backpropagation.

mod adam;
mod embedding;
pub mod gradcheck;
mod layer;
mod loss;
mod matrix;

pub use adam::Adam;
pub use embedding::{cosine_embedding, COSINE_FEATURES};
pub use layer::{relu, relu_backward_in_place, relu_grad_mask, relu_in_place, LinearGrad, LinearLayer};
pub use loss::{dqn_loss, iqn_loss, quantile_huber, HUBER_KAPPA};
pub use matrix::Matrix;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum NnError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Anything that owns trainable parameters exposed as a fixed, ordered list
/// of flat slices.
pub trait Parameterized {
    fn param_slices(&self) -> Vec<&[f64]>;
    fn param_slices_mut(&mut self) -> Vec<&mut [f64]>;

    fn param_count(&self) -> usize {
        self.param_slices().iter().map(|s| s.len()).sum()
    }

    /// Copies every parameter from `other`, which must have the same layout.
    fn copy_params_from(&mut self, other: &Self) {
        for (dst, src) in self.param_slices_mut().into_iter().zip(other.param_slices()) {
            dst.copy_from_slice(src);
        }
    }
}

/// Gradients laid out exactly like [`Parameterized::param_slices`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients(pub Vec<Vec<f64>>);

impl Gradients {
    pub fn zeros_like<P: Parameterized + ?Sized>(model: &P) -> Self {
        Gradients(model.param_slices().iter().map(|s| vec![0.0; s.len()]).collect())
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.0.iter().flatten().copied().collect()
    }

    pub fn global_norm(&self) -> f64 {
        self.0.iter().flatten().map(|g| g * g).sum::<f64>().sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        self.0.iter_mut().flatten().for_each(|g| *g *= factor);
    }
}
