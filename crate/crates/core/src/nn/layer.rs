use rand::{Rng, RngExt};

use super::matrix::gemm;
use super::{Gradients, Matrix, NnError, Parameterized};

/// Fully connected layer `y = W x + b` with `W` stored `out x in`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearLayer {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearGrad {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl LinearLayer {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        LinearLayer {
            weights: Matrix::zeros(outputs, inputs),
            bias: vec![0.0; outputs],
        }
    }

    /// Weights uniform in `±1/sqrt(fan_in)`, biases zero.
    pub fn init<R: Rng + ?Sized>(inputs: usize, outputs: usize, rng: &mut R) -> Self {
        let bound = 1.0 / (inputs as f64).sqrt();
        let mut layer = LinearLayer::zeros(inputs, outputs);
        for w in layer.weights.as_mut_slice() {
            *w = rng.random_range(-bound..bound);
        }
        layer
    }

    pub fn inputs(&self) -> usize {
        self.weights.cols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.rows()
    }

    /// Forward pass over a batch stored one sample per row.
    pub fn forward(&self, input: &Matrix) -> Result<Matrix, NnError> {
        if input.cols() != self.inputs() {
            return Err(NnError::Shape(format!(
                "layer expects {} inputs, batch has {}",
                self.inputs(),
                input.cols()
            )));
        }
        let mut out = Matrix::zeros(input.rows(), self.outputs());
        for i in 0..out.rows() {
            out.row_mut(i).copy_from_slice(&self.bias);
        }
        gemm(1.0, input, false, &self.weights, true, 1.0, &mut out)?;
        Ok(out)
    }

    /// Parameter gradients, plus the input gradient when `want_input_grad`.
    pub fn backward(
        &self,
        input: &Matrix,
        upstream: &Matrix,
        want_input_grad: bool,
    ) -> Result<(LinearGrad, Option<Matrix>), NnError> {
        if input.rows() != upstream.rows()
            || input.cols() != self.inputs()
            || upstream.cols() != self.outputs()
        {
            return Err(NnError::Shape(format!(
                "backward through {}->{} layer with input {:?} and upstream {:?}",
                self.inputs(),
                self.outputs(),
                input.shape(),
                upstream.shape()
            )));
        }
        let mut dw = Matrix::zeros(self.outputs(), self.inputs());
        gemm(1.0, upstream, true, input, false, 0.0, &mut dw)?;
        let mut db = vec![0.0; self.outputs()];
        for i in 0..upstream.rows() {
            for (acc, g) in db.iter_mut().zip(upstream.row(i)) {
                *acc += g;
            }
        }
        let dx = if want_input_grad {
            let mut dx = Matrix::zeros(input.rows(), self.inputs());
            gemm(1.0, upstream, false, &self.weights, false, 0.0, &mut dx)?;
            Some(dx)
        } else {
            None
        };
        Ok((
            LinearGrad {
                weights: dw,
                bias: db,
            },
            dx,
        ))
    }
}

impl Parameterized for LinearLayer {
    fn param_slices(&self) -> Vec<&[f64]> {
        vec![self.weights.as_slice(), &self.bias]
    }

    fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        vec![self.weights.as_mut_slice(), &mut self.bias]
    }
}

impl LinearGrad {
    pub fn into_gradients(self) -> Gradients {
        Gradients(vec![self.weights.into_vec(), self.bias])
    }
}

pub fn relu(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| v.max(0.0)).collect()
}

/// Subgradient of ReLU, taking 0 at the origin.
pub fn relu_grad_mask(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| if v > 0.0 { 1.0 } else { 0.0 }).collect()
}

pub fn relu_in_place(m: &mut Matrix) {
    m.map_in_place(|v| v.max(0.0));
}

/// Zeroes `grad` wherever the ReLU output `activated` is not positive.
pub fn relu_backward_in_place(grad: &mut Matrix, activated: &Matrix) {
    debug_assert_eq!(grad.shape(), activated.shape());
    for (g, &a) in grad.as_mut_slice().iter_mut().zip(activated.as_slice()) {
        if a <= 0.0 {
            *g = 0.0;
        }
    }
}
