use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::nn::{
    cosine_embedding, relu_backward_in_place, relu_in_place, LinearGrad, LinearLayer, Matrix,
    NnError, Parameterized, COSINE_FEATURES,
};
use crate::sim::{ACTION_COUNT, DYNAMIC_FEATURES, DYNAMIC_SLOTS, EGO_FEATURES, OBS_DIM, STATIC_FEATURES, STATIC_SLOTS};

const STATIC_INPUTS: usize = STATIC_SLOTS * STATIC_FEATURES;
const DYNAMIC_INPUTS: usize = DYNAMIC_SLOTS * DYNAMIC_FEATURES;

/// Hidden widths. Each of the three observation encoders emits
/// `encoder_width` features; the head has two `head_width` hidden layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkShape {
    pub encoder_width: usize,
    pub head_width: usize,
}

impl Default for NetworkShape {
    fn default() -> Self {
        NetworkShape {
            encoder_width: 64,
            head_width: 128,
        }
    }
}

impl NetworkShape {
    pub fn feature_width(&self) -> usize {
        3 * self.encoder_width
    }
}

/// Name and dimensions of one fully connected layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub name: String,
    pub inputs: usize,
    pub outputs: usize,
}

fn push_layer<'a>(out: &mut Vec<&'a [f64]>, layer: &'a LinearLayer) {
    out.push(layer.weights.as_slice());
    out.push(&layer.bias);
}

fn push_layer_mut<'a>(out: &mut Vec<&'a mut [f64]>, layer: &'a mut LinearLayer) {
    out.push(layer.weights.as_mut_slice());
    out.push(&mut layer.bias);
}

fn push_grad(out: &mut Vec<Vec<f64>>, g: LinearGrad) {
    out.push(g.weights.into_vec());
    out.push(g.bias);
}

fn spec(name: &str, layer: &LinearLayer) -> LayerSpec {
    LayerSpec {
        name: name.to_string(),
        inputs: layer.inputs(),
        outputs: layer.outputs(),
    }
}

/// The three observation encoders, each a fully connected layer plus ReLU.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ObservationEncoder {
    pub ego: LinearLayer,
    pub statics: LinearLayer,
    pub dynamics: LinearLayer,
}

pub(crate) struct EncoderCache {
    inputs: [Matrix; 3],
    activations: [Matrix; 3],
    /// Concatenated activations, `batch x 3*width`.
    pub features: Matrix,
}

impl ObservationEncoder {
    fn new<R: Rng + ?Sized>(width: usize, rng: &mut R) -> Self {
        ObservationEncoder {
            ego: LinearLayer::init(EGO_FEATURES, width, rng),
            statics: LinearLayer::init(STATIC_INPUTS, width, rng),
            dynamics: LinearLayer::init(DYNAMIC_INPUTS, width, rng),
        }
    }

    fn zeros(width: usize) -> Self {
        ObservationEncoder {
            ego: LinearLayer::zeros(EGO_FEATURES, width),
            statics: LinearLayer::zeros(STATIC_INPUTS, width),
            dynamics: LinearLayer::zeros(DYNAMIC_INPUTS, width),
        }
    }

    fn layers(&self) -> [&LinearLayer; 3] {
        [&self.ego, &self.statics, &self.dynamics]
    }

    fn forward(&self, obs: &Matrix) -> Result<EncoderCache, NnError> {
        if obs.cols() != OBS_DIM {
            return Err(NnError::Shape(format!(
                "observation must have {OBS_DIM} values, got {}",
                obs.cols()
            )));
        }
        let inputs = [
            obs.columns(0, EGO_FEATURES),
            obs.columns(EGO_FEATURES, STATIC_INPUTS),
            obs.columns(EGO_FEATURES + STATIC_INPUTS, DYNAMIC_INPUTS),
        ];
        let mut activations = Vec::with_capacity(3);
        for (layer, x) in self.layers().into_iter().zip(&inputs) {
            let mut h = layer.forward(x)?;
            relu_in_place(&mut h);
            activations.push(h);
        }
        let activations: [Matrix; 3] = activations.try_into().expect("three encoders");
        let features = Matrix::hstack(&[&activations[0], &activations[1], &activations[2]])?;
        Ok(EncoderCache {
            inputs,
            activations,
            features,
        })
    }

    fn backward(&self, cache: &EncoderCache, d_features: &Matrix) -> Result<Vec<LinearGrad>, NnError> {
        let mut grads = Vec::with_capacity(3);
        let mut at = 0;
        for (k, layer) in self.layers().into_iter().enumerate() {
            let width = layer.outputs();
            let mut d = d_features.columns(at, width);
            at += width;
            relu_backward_in_place(&mut d, &cache.activations[k]);
            grads.push(layer.backward(&cache.inputs[k], &d, false)?.0);
        }
        Ok(grads)
    }
}

/// Two hidden layers with ReLU, then a linear layer with one output per action.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Head {
    pub hidden1: LinearLayer,
    pub hidden2: LinearLayer,
    pub output: LinearLayer,
}

pub(crate) struct HeadCache {
    input: Matrix,
    h1: Matrix,
    h2: Matrix,
}

impl Head {
    fn new<R: Rng + ?Sized>(inputs: usize, width: usize, rng: &mut R) -> Self {
        Head {
            hidden1: LinearLayer::init(inputs, width, rng),
            hidden2: LinearLayer::init(width, width, rng),
            output: LinearLayer::init(width, ACTION_COUNT, rng),
        }
    }

    fn zeros(inputs: usize, width: usize) -> Self {
        Head {
            hidden1: LinearLayer::zeros(inputs, width),
            hidden2: LinearLayer::zeros(width, width),
            output: LinearLayer::zeros(width, ACTION_COUNT),
        }
    }

    fn forward(&self, input: Matrix) -> Result<(Matrix, HeadCache), NnError> {
        let mut h1 = self.hidden1.forward(&input)?;
        relu_in_place(&mut h1);
        let mut h2 = self.hidden2.forward(&h1)?;
        relu_in_place(&mut h2);
        let out = self.output.forward(&h2)?;
        Ok((out, HeadCache { input, h1, h2 }))
    }

    fn backward(&self, cache: &HeadCache, d_out: &Matrix) -> Result<(Vec<LinearGrad>, Matrix), NnError> {
        let (g_out, d_h2) = self.output.backward(&cache.h2, d_out, true)?;
        let mut d_h2 = d_h2.expect("requested");
        relu_backward_in_place(&mut d_h2, &cache.h2);
        let (g2, d_h1) = self.hidden2.backward(&cache.h1, &d_h2, true)?;
        let mut d_h1 = d_h1.expect("requested");
        relu_backward_in_place(&mut d_h1, &cache.h1);
        let (g1, d_in) = self.hidden1.backward(&cache.input, &d_h1, true)?;
        Ok((vec![g1, g2, g_out], d_in.expect("requested")))
    }
}

/// Implicit quantile network: observation encoders, a cosine quantile
/// embedding scaled by the CVaR threshold, elementwise product of the two
/// feature vectors, and a head producing one return quantile per action.
#[derive(Debug, Clone, PartialEq)]
pub struct IqnModel {
    pub shape: NetworkShape,
    pub(crate) encoder: ObservationEncoder,
    pub(crate) quantile: LinearLayer,
    pub(crate) head: Head,
}

pub struct IqnCache {
    encoder: EncoderCache,
    cosines: Matrix,
    quantile_features: Matrix,
    head: HeadCache,
    quantiles_per_sample: usize,
}

impl IqnModel {
    pub fn new<R: Rng + ?Sized>(shape: NetworkShape, rng: &mut R) -> Self {
        IqnModel {
            shape,
            encoder: ObservationEncoder::new(shape.encoder_width, rng),
            quantile: LinearLayer::init(COSINE_FEATURES, shape.feature_width(), rng),
            head: Head::new(shape.feature_width(), shape.head_width, rng),
        }
    }

    /// All weights and biases zero.
    pub fn zeros(shape: NetworkShape) -> Self {
        IqnModel {
            shape,
            encoder: ObservationEncoder::zeros(shape.encoder_width),
            quantile: LinearLayer::zeros(COSINE_FEATURES, shape.feature_width()),
            head: Head::zeros(shape.feature_width(), shape.head_width),
        }
    }

    /// Bias of the final layer; with zero weights it is the model output.
    pub fn output_bias_mut(&mut self) -> &mut [f64] {
        &mut self.head.output.bias
    }

    pub fn layer_specs(&self) -> Vec<LayerSpec> {
        vec![
            spec("ego_encoder", &self.encoder.ego),
            spec("static_encoder", &self.encoder.statics),
            spec("dynamic_encoder", &self.encoder.dynamics),
            spec("quantile_encoder", &self.quantile),
            spec("head_hidden1", &self.head.hidden1),
            spec("head_hidden2", &self.head.hidden2),
            spec("head_output", &self.head.output),
        ]
    }

    /// Quantile returns for a batch. `obs` is `B x 39`, `taus` is `B x N` and
    /// `phis` holds one CVaR threshold per sample. Row `b * N + k` of the
    /// `(B*N) x 9` result holds the returns at fraction `phis[b] * taus[b][k]`.
    pub fn forward(&self, obs: &Matrix, taus: &Matrix, phis: &[f64]) -> Result<(Matrix, IqnCache), NnError> {
        let batch = obs.rows();
        if taus.rows() != batch || phis.len() != batch {
            return Err(NnError::Shape(format!(
                "{batch} observations, {} quantile rows, {} thresholds",
                taus.rows(),
                phis.len()
            )));
        }
        let n = taus.cols();
        let encoder = self.encoder.forward(obs)?;
        let mut cosines = Matrix::zeros(batch * n, COSINE_FEATURES);
        for (b, &phi) in phis.iter().enumerate().take(batch) {
            let rows = cosine_embedding(taus.row(b), phi)?;
            for k in 0..n {
                cosines.row_mut(b * n + k).copy_from_slice(rows.row(k));
            }
        }
        let mut quantile_features = self.quantile.forward(&cosines)?;
        relu_in_place(&mut quantile_features);
        let mut combined = quantile_features.clone();
        for b in 0..batch {
            let feat = encoder.features.row(b);
            for k in 0..n {
                for (c, f) in combined.row_mut(b * n + k).iter_mut().zip(feat) {
                    *c *= f;
                }
            }
        }
        let (out, head) = self.head.forward(combined)?;
        Ok((
            out,
            IqnCache {
                encoder,
                cosines,
                quantile_features,
                head,
                quantiles_per_sample: n,
            },
        ))
    }

    /// Parameter gradients given the loss gradient on every output entry.
    pub fn backward(&self, cache: &IqnCache, d_out: &Matrix) -> Result<crate::nn::Gradients, NnError> {
        let n = cache.quantiles_per_sample;
        let (head_grads, d_combined) = self.head.backward(&cache.head, d_out)?;
        let features = &cache.encoder.features;
        let batch = features.rows();
        let mut d_features = Matrix::zeros(batch, features.cols());
        let mut d_quantile = d_combined.clone();
        for b in 0..batch {
            let feat = features.row(b);
            for k in 0..n {
                let r = b * n + k;
                let q = cache.quantile_features.row(r);
                let dc = d_combined.row(r);
                for (acc, (g, qv)) in d_features.row_mut(b).iter_mut().zip(dc.iter().zip(q)) {
                    *acc += g * qv;
                }
                for (dq, f) in d_quantile.row_mut(r).iter_mut().zip(feat) {
                    *dq *= f;
                }
            }
        }
        relu_backward_in_place(&mut d_quantile, &cache.quantile_features);
        let (g_quantile, _) = self.quantile.backward(&cache.cosines, &d_quantile, false)?;
        let enc_grads = self.encoder.backward(&cache.encoder, &d_features)?;

        let mut out = Vec::with_capacity(14);
        for g in enc_grads {
            push_grad(&mut out, g);
        }
        push_grad(&mut out, g_quantile);
        for g in head_grads {
            push_grad(&mut out, g);
        }
        Ok(crate::nn::Gradients(out))
    }
}

impl Parameterized for IqnModel {
    fn param_slices(&self) -> Vec<&[f64]> {
        let mut out = Vec::with_capacity(14);
        for l in self.encoder.layers() {
            push_layer(&mut out, l);
        }
        push_layer(&mut out, &self.quantile);
        for l in [&self.head.hidden1, &self.head.hidden2, &self.head.output] {
            push_layer(&mut out, l);
        }
        out
    }

    fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::with_capacity(14);
        push_layer_mut(&mut out, &mut self.encoder.ego);
        push_layer_mut(&mut out, &mut self.encoder.statics);
        push_layer_mut(&mut out, &mut self.encoder.dynamics);
        push_layer_mut(&mut out, &mut self.quantile);
        push_layer_mut(&mut out, &mut self.head.hidden1);
        push_layer_mut(&mut out, &mut self.head.hidden2);
        push_layer_mut(&mut out, &mut self.head.output);
        out
    }
}

/// Action-value network: the same encoders and head without the quantile path.
#[derive(Debug, Clone, PartialEq)]
pub struct DqnModel {
    pub shape: NetworkShape,
    pub(crate) encoder: ObservationEncoder,
    pub(crate) head: Head,
}

pub struct DqnCache {
    encoder: EncoderCache,
    head: HeadCache,
}

impl DqnModel {
    pub fn new<R: Rng + ?Sized>(shape: NetworkShape, rng: &mut R) -> Self {
        DqnModel {
            shape,
            encoder: ObservationEncoder::new(shape.encoder_width, rng),
            head: Head::new(shape.feature_width(), shape.head_width, rng),
        }
    }

    pub fn zeros(shape: NetworkShape) -> Self {
        DqnModel {
            shape,
            encoder: ObservationEncoder::zeros(shape.encoder_width),
            head: Head::zeros(shape.feature_width(), shape.head_width),
        }
    }

    pub fn output_bias_mut(&mut self) -> &mut [f64] {
        &mut self.head.output.bias
    }

    pub fn layer_specs(&self) -> Vec<LayerSpec> {
        vec![
            spec("ego_encoder", &self.encoder.ego),
            spec("static_encoder", &self.encoder.statics),
            spec("dynamic_encoder", &self.encoder.dynamics),
            spec("head_hidden1", &self.head.hidden1),
            spec("head_hidden2", &self.head.hidden2),
            spec("head_output", &self.head.output),
        ]
    }

    /// Action values, `B x 9`.
    pub fn forward(&self, obs: &Matrix) -> Result<(Matrix, DqnCache), NnError> {
        let encoder = self.encoder.forward(obs)?;
        let (out, head) = self.head.forward(encoder.features.clone())?;
        Ok((out, DqnCache { encoder, head }))
    }

    pub fn backward(&self, cache: &DqnCache, d_out: &Matrix) -> Result<crate::nn::Gradients, NnError> {
        let (head_grads, d_features) = self.head.backward(&cache.head, d_out)?;
        let enc_grads = self.encoder.backward(&cache.encoder, &d_features)?;
        let mut out = Vec::with_capacity(12);
        for g in enc_grads.into_iter().chain(head_grads) {
            push_grad(&mut out, g);
        }
        Ok(crate::nn::Gradients(out))
    }
}

impl Parameterized for DqnModel {
    fn param_slices(&self) -> Vec<&[f64]> {
        let mut out = Vec::with_capacity(12);
        for l in self.encoder.layers() {
            push_layer(&mut out, l);
        }
        for l in [&self.head.hidden1, &self.head.hidden2, &self.head.output] {
            push_layer(&mut out, l);
        }
        out
    }

    fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::with_capacity(12);
        push_layer_mut(&mut out, &mut self.encoder.ego);
        push_layer_mut(&mut out, &mut self.encoder.statics);
        push_layer_mut(&mut out, &mut self.encoder.dynamics);
        push_layer_mut(&mut out, &mut self.head.hidden1);
        push_layer_mut(&mut out, &mut self.head.hidden2);
        push_layer_mut(&mut out, &mut self.head.output);
        out
    }
}
