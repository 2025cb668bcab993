//! Feed-forward detector: tanh hidden layers, two sigmoid output nodes ordered
//! `[normal, attack]`, binary cross-entropy loss and mini-batch SGD.
//!
//! Layer `i` computes `a_{i+1} = act(a_i · W_i + b_i)` with `W_i` of shape
//! `layer_dims[i] × layer_dims[i+1]`, one sample per row.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use sha2::Digest;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rng};

/// Hidden layer widths of the reference detector.
pub const HIDDEN_WIDTHS: [usize; 4] = [20, 60, 80, 90];
/// Output nodes: index 0 scores "normal", index 1 scores "attack".
pub const OUTPUT_NODES: usize = 2;
/// Probabilities are clamped to `[PROB_FLOOR, 1 - PROB_FLOOR]` before the logarithm.
pub const PROB_FLOOR: f64 = 1e-12;

const SHUFFLE_STREAM: u64 = 0x5348_5546;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Tanh,
    Sigmoid,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => libm::tanh(z),
            Activation::Sigmoid => sigmoid(z),
        }
    }

    /// Derivative expressed through the activation's output `a`.
    #[inline]
    fn derivative_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - a * a,
            Activation::Sigmoid => a * (1.0 - a),
        }
    }
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelParts", into = "ModelParts")]
pub struct MlpModel {
    layer_dims: Vec<usize>,
    weights: Vec<Matrix>,
    biases: Vec<Vec<f64>>,
    hidden_activation: Activation,
    output_activation: Activation,
}

/// Unvalidated wire form of [`MlpModel`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelParts {
    pub layer_dims: Vec<usize>,
    pub hidden_activation: Activation,
    pub output_activation: Activation,
    pub weights: Vec<Matrix>,
    pub biases: Vec<Vec<f64>>,
}

impl TryFrom<ModelParts> for MlpModel {
    type Error = Error;

    fn try_from(p: ModelParts) -> Result<Self> {
        MlpModel::from_parts(p)
    }
}

impl From<MlpModel> for ModelParts {
    fn from(m: MlpModel) -> Self {
        ModelParts {
            layer_dims: m.layer_dims,
            hidden_activation: m.hidden_activation,
            output_activation: m.output_activation,
            weights: m.weights,
            biases: m.biases,
        }
    }
}

/// Parameter and input gradients of the batch loss.
#[derive(Clone, Debug)]
pub struct Gradients {
    pub weights: Vec<Matrix>,
    pub biases: Vec<Vec<f64>>,
    pub input: Matrix,
}

/// Per-epoch learning rate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LrSchedule {
    Constant,
    /// `lr · (1 + cos(π · epoch / epochs)) / 2`.
    #[default]
    Cosine,
}

impl LrSchedule {
    pub fn rate(self, base: f64, epoch: usize, epochs: usize) -> f64 {
        match self {
            LrSchedule::Constant => base,
            LrSchedule::Cosine => {
                let t = epoch as f64 / epochs.max(1) as f64;
                base * 0.5 * (1.0 + libm::cos(core::f64::consts::PI * t))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    #[serde(default)]
    pub schedule: LrSchedule,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 20,
            batch_size: 32,
            learning_rate: 0.05,
            schedule: LrSchedule::Cosine,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub model: MlpModel,
    /// Mean loss over the full training set after each epoch.
    pub loss_trace: Vec<f64>,
}

struct Trace {
    /// `activations[0]` is the input; the last entry holds the output probabilities.
    activations: Vec<Matrix>,
    /// Pre-activation of the output layer, kept for a cancellation-free loss gradient.
    output_logits: Matrix,
}

impl MlpModel {
    /// Glorot-uniform weights, zero biases, tanh hidden layers, sigmoid outputs.
    pub fn new(layer_dims: &[usize], rng: &mut Rng) -> Result<Self> {
        check_dims(layer_dims)?;
        let mut weights = Vec::with_capacity(layer_dims.len() - 1);
        let mut biases = Vec::with_capacity(layer_dims.len() - 1);
        for pair in layer_dims.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let limit = libm::sqrt(6.0 / (fan_in + fan_out) as f64);
            let data = (0..fan_in * fan_out)
                .map(|_| rng.uniform(-limit, limit))
                .collect();
            weights.push(Matrix::new(fan_in, fan_out, data)?);
            biases.push(vec![0.0; fan_out]);
        }
        Ok(MlpModel {
            layer_dims: layer_dims.to_vec(),
            weights,
            biases,
            hidden_activation: Activation::Tanh,
            output_activation: Activation::Sigmoid,
        })
    }

    /// The reference detector: `input_dim → 20 → 60 → 80 → 90 → 2`.
    pub fn detector(input_dim: usize, rng: &mut Rng) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::InvalidDimension("input_dim must be positive".into()));
        }
        let mut dims = vec![input_dim];
        dims.extend_from_slice(&HIDDEN_WIDTHS);
        dims.push(OUTPUT_NODES);
        MlpModel::new(&dims, rng)
    }

    pub fn from_parts(p: ModelParts) -> Result<Self> {
        check_dims(&p.layer_dims)?;
        let layers = p.layer_dims.len() - 1;
        if p.weights.len() != layers || p.biases.len() != layers {
            return Err(Error::InvalidDimension(format!(
                "{} layers need {layers} weight matrices and bias vectors, got {} and {}",
                layers,
                p.weights.len(),
                p.biases.len()
            )));
        }
        for (i, (w, b)) in p.weights.iter().zip(&p.biases).enumerate() {
            let expected = (p.layer_dims[i], p.layer_dims[i + 1]);
            if w.shape() != expected || b.len() != expected.1 {
                return Err(Error::Shape {
                    op: "model layer",
                    left: expected,
                    right: w.shape(),
                });
            }
            if !w.is_finite() || b.iter().any(|v| !v.is_finite()) {
                return Err(Error::Numeric(format!(
                    "layer {i} has non-finite parameters"
                )));
            }
        }
        Ok(MlpModel {
            layer_dims: p.layer_dims,
            weights: p.weights,
            biases: p.biases,
            hidden_activation: p.hidden_activation,
            output_activation: p.output_activation,
        })
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn weights(&self) -> &[Matrix] {
        &self.weights
    }

    pub fn biases(&self) -> &[Vec<f64>] {
        &self.biases
    }

    pub fn weights_mut(&mut self) -> &mut [Matrix] {
        &mut self.weights
    }

    pub fn biases_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.biases
    }

    /// Hex SHA-256 over layer widths and parameter bits.
    pub fn content_hash(&self) -> alloc::string::String {
        crate::sha256_hex(|h| {
            for &d in &self.layer_dims {
                h.update((d as u64).to_le_bytes());
            }
            for (w, b) in self.weights.iter().zip(&self.biases) {
                for v in w.as_slice().iter().chain(b) {
                    h.update(v.to_bits().to_le_bytes());
                }
            }
        })
    }

    pub fn hidden_activation(&self) -> Activation {
        self.hidden_activation
    }

    pub fn output_activation(&self) -> Activation {
        self.output_activation
    }

    fn check_input(&self, x: &Matrix) -> Result<()> {
        if x.cols() != self.input_dim() {
            return Err(Error::Shape {
                op: "forward",
                left: x.shape(),
                right: self.weights[0].shape(),
            });
        }
        Ok(())
    }

    fn trace(&self, x: &Matrix) -> Result<Trace> {
        self.check_input(x)?;
        let last = self.weights.len() - 1;
        let mut activations = Vec::with_capacity(self.weights.len() + 1);
        activations.push(x.clone());
        let mut output_logits = None;
        for (i, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let mut z = activations[i].matmul(w)?;
            z.add_row_vector(b)?;
            let act = if i == last {
                self.output_activation
            } else {
                self.hidden_activation
            };
            let a = z.map(|v| act.apply(v));
            if i == last {
                output_logits = Some(z);
            }
            activations.push(a);
        }
        Ok(Trace {
            activations,
            output_logits: output_logits.expect("at least one layer"),
        })
    }

    /// Per-node output probabilities, one row per sample.
    pub fn forward(&self, x: &Matrix) -> Result<Matrix> {
        let mut t = self.trace(x)?;
        Ok(t.activations.pop().expect("non-empty trace"))
    }

    /// Class per row: 1 (attack) when the attack node strictly exceeds the
    /// normal node, otherwise 0.
    pub fn predict(&self, x: &Matrix) -> Result<Vec<u8>> {
        Ok(predict_from_outputs(&self.forward(x)?))
    }

    /// Binary cross-entropy of each sample, summed over both output nodes.
    pub fn per_sample_loss(&self, x: &Matrix, labels: &[u8]) -> Result<Vec<f64>> {
        check_labels(x, labels)?;
        let out = self.forward(x)?;
        Ok(out
            .row_iter()
            .zip(labels)
            .map(|(p, &y)| sample_loss(p, y))
            .collect())
    }

    /// Batch mean of [`per_sample_loss`](Self::per_sample_loss).
    pub fn loss(&self, x: &Matrix, labels: &[u8]) -> Result<f64> {
        let per = self.per_sample_loss(x, labels)?;
        Ok(per.iter().sum::<f64>() / per.len() as f64)
    }

    /// Backpropagates the mean batch loss to every weight, bias and input entry.
    pub fn gradients(&self, x: &Matrix, labels: &[u8]) -> Result<Gradients> {
        self.backward(x, labels, true)
    }

    /// `∂J/∂x`, same shape as `x`.
    pub fn input_gradient(&self, x: &Matrix, labels: &[u8]) -> Result<Matrix> {
        Ok(self.backward(x, labels, false)?.input)
    }

    fn backward(&self, x: &Matrix, labels: &[u8], with_params: bool) -> Result<Gradients> {
        check_labels(x, labels)?;
        let trace = self.trace(x)?;
        let n = x.rows() as f64;
        let layers = self.weights.len();

        // d(mean BCE)/dz for sigmoid outputs is (p - t) / n. Computing p - 1 as
        // -sigmoid(-z) keeps the gradient nonzero for confidently correct rows.
        let mut delta = trace.output_logits.clone();
        for (row, &y) in delta
            .as_mut_slice()
            .chunks_exact_mut(OUTPUT_NODES)
            .zip(labels)
        {
            for (k, z) in row.iter_mut().enumerate() {
                let target_is_one = (k == 1) == (y == 1);
                *z = (if target_is_one {
                    -sigmoid(-*z)
                } else {
                    sigmoid(*z)
                }) / n;
            }
        }
        if self.output_activation != Activation::Sigmoid {
            return Err(Error::Config("loss requires sigmoid output nodes".into()));
        }

        let mut w_grads = Vec::new();
        let mut b_grads = Vec::new();
        for i in (0..layers).rev() {
            if with_params {
                w_grads.push(trace.activations[i].t_matmul(&delta)?);
                b_grads.push(delta.column_sums());
            }
            let upstream = delta.matmul_t(&self.weights[i])?;
            if i == 0 {
                delta = upstream;
            } else {
                let act = self.hidden_activation;
                delta = upstream.zip_map(&trace.activations[i], |g, a| {
                    g * act.derivative_from_output(a)
                })?;
            }
        }
        w_grads.reverse();
        b_grads.reverse();
        Ok(Gradients {
            weights: w_grads,
            biases: b_grads,
            input: delta,
        })
    }

    fn sgd_step(&mut self, g: &Gradients, lr: f64) {
        for (w, gw) in self.weights.iter_mut().zip(&g.weights) {
            for (v, d) in w.as_mut_slice().iter_mut().zip(gw.as_slice()) {
                *v -= lr * d;
            }
        }
        for (b, gb) in self.biases.iter_mut().zip(&g.biases) {
            for (v, d) in b.iter_mut().zip(gb) {
                *v -= lr * d;
            }
        }
    }
}

/// Mini-batch SGD on `data`; the returned trace has one entry per epoch.
pub fn train(model: &MlpModel, data: &Dataset, cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyData("training set has no rows".into()));
    }
    let x = data.features();
    let y = data.labels();
    check_labels(x, y)?;
    model.check_input(x)?;

    let mut model = model.clone();
    let mut rng = Rng::stream(cfg.seed, SHUFFLE_STREAM);
    let mut order: Vec<usize> = (0..x.rows()).collect();
    let mut loss_trace = Vec::with_capacity(cfg.epochs);
    let mut batch_labels = Vec::with_capacity(cfg.batch_size);

    for epoch in 0..cfg.epochs {
        let lr = cfg.schedule.rate(cfg.learning_rate, epoch, cfg.epochs);
        rng.shuffle(&mut order);
        for chunk in order.chunks(cfg.batch_size) {
            let bx = x.select_rows(chunk)?;
            batch_labels.clear();
            batch_labels.extend(chunk.iter().map(|&i| y[i]));
            let g = model.gradients(&bx, &batch_labels)?;
            model.sgd_step(&g, lr);
        }
        let loss = model.loss(x, y)?;
        if !loss.is_finite() {
            return Err(Error::Numeric(format!("loss diverged at epoch {epoch}")));
        }
        loss_trace.push(loss);
    }
    Ok(TrainOutcome { model, loss_trace })
}

pub fn predict_from_outputs(outputs: &Matrix) -> Vec<u8> {
    outputs.row_iter().map(|p| u8::from(p[1] > p[0])).collect()
}

fn sample_loss(p: &[f64], y: u8) -> f64 {
    let mut s = 0.0;
    for (k, &pk) in p.iter().enumerate() {
        let pk = pk.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR);
        let t = if (k == 1) == (y == 1) { 1.0 } else { 0.0 };
        s -= t * libm::log(pk) + (1.0 - t) * libm::log(1.0 - pk);
    }
    s
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.len() < 2 {
        return Err(Error::InvalidDimension(
            "a model needs at least an input and an output layer".into(),
        ));
    }
    if dims.contains(&0) {
        return Err(Error::InvalidDimension(format!(
            "layer widths must be positive: {dims:?}"
        )));
    }
    if dims[dims.len() - 1] != OUTPUT_NODES {
        return Err(Error::InvalidDimension(format!(
            "output layer must have {OUTPUT_NODES} nodes, got {}",
            dims[dims.len() - 1]
        )));
    }
    Ok(())
}

fn check_labels(x: &Matrix, labels: &[u8]) -> Result<()> {
    if labels.len() != x.rows() {
        return Err(Error::Shape {
            op: "labels",
            left: x.shape(),
            right: (labels.len(), 1),
        });
    }
    match labels.iter().find(|&&y| y > 1) {
        Some(&bad) => Err(Error::InvalidLabel(bad)),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Dataset, Schema};

    fn toy() -> MlpModel {
        MlpModel::from_parts(ModelParts {
            layer_dims: vec![2, 2, 2],
            hidden_activation: Activation::Tanh,
            output_activation: Activation::Sigmoid,
            weights: vec![
                Matrix::from_rows(&[[0.5, -0.25], [0.1, 0.4]]).unwrap(),
                Matrix::from_rows(&[[1.0, -1.0], [0.5, 0.2]]).unwrap(),
            ],
            biases: vec![vec![0.0, 0.1], vec![0.2, -0.3]],
        })
        .unwrap()
    }

    fn zeroed(dims: &[usize]) -> MlpModel {
        let mut m = MlpModel::new(dims, &mut Rng::new(0)).unwrap();
        for w in m.weights_mut() {
            w.map_in_place(|_| 0.0);
        }
        m
    }

    #[test]
    fn detector_layer_dims() {
        let m = MlpModel::detector(10, &mut Rng::new(1)).unwrap();
        assert_eq!(m.layer_dims(), &[10, 20, 60, 80, 90, 2]);
        let m = MlpModel::detector(8, &mut Rng::new(1)).unwrap();
        assert_eq!(m.layer_dims(), &[8, 20, 60, 80, 90, 2]);
        assert_eq!(m.weights()[2].shape(), (60, 80));
        assert_eq!(m.biases()[3].len(), 90);
        assert_eq!(m.hidden_activation(), Activation::Tanh);
        assert_eq!(m.output_activation(), Activation::Sigmoid);
    }

    #[test]
    fn zero_input_dim_rejected() {
        assert!(matches!(
            MlpModel::detector(0, &mut Rng::new(1)),
            Err(Error::InvalidDimension(_))
        ));
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let a = MlpModel::detector(10, &mut Rng::new(5)).unwrap();
        let b = MlpModel::detector(10, &mut Rng::new(5)).unwrap();
        assert_eq!(a, b);
        let c = MlpModel::detector(10, &mut Rng::new(6)).unwrap();
        assert_ne!(a, c);
        let limit = libm::sqrt(6.0 / 30.0);
        assert!(a.weights()[0].as_slice().iter().all(|w| w.abs() <= limit));
        assert!(a.biases().iter().flatten().all(|&b| b == 0.0));
    }

    #[test]
    fn zero_model_outputs_half() {
        let m = zeroed(&[4, 5, 2]);
        let x = Matrix::filled(3, 4, 0.7);
        let out = m.forward(&x).unwrap();
        assert_eq!(out.shape(), (3, 2));
        assert!(out.as_slice().iter().all(|&p| p == 0.5));
        let single = m.forward(&Matrix::filled(1, 4, 0.1)).unwrap();
        assert_eq!(single.shape(), (1, 2));
    }

    #[test]
    fn toy_forward_matches_hand_computation() {
        let out = toy()
            .forward(&Matrix::from_rows(&[[1.0, 2.0]]).unwrap())
            .unwrap();
        assert!((out.get(0, 0) - 0.7484199007443062).abs() < 1e-12);
        assert!((out.get(0, 1) - 0.3121614154047197).abs() < 1e-12);
        let loss = toy()
            .loss(&Matrix::from_rows(&[[1.0, 2.0]]).unwrap(), &[1])
            .unwrap();
        assert!((loss - 2.544228721931411).abs() < 1e-12);
    }

    #[test]
    fn forward_rejects_wrong_width() {
        let m = toy();
        assert!(matches!(
            m.forward(&Matrix::zeros(1, 3)),
            Err(Error::Shape { .. })
        ));
        assert!(m.predict(&Matrix::zeros(1, 3)).is_err());
        assert!(m.input_gradient(&Matrix::zeros(1, 3), &[0]).is_err());
    }

    #[test]
    fn loss_limits() {
        let m = zeroed(&[3, 2]);
        let x = Matrix::filled(4, 3, 0.2);
        let l = m.loss(&x, &[0, 1, 0, 1]).unwrap();
        assert!((l - 2.0 * core::f64::consts::LN_2).abs() < 1e-15);

        let mut confident = zeroed(&[1, 2]);
        confident.biases_mut()[0] = vec![-40.0, 40.0];
        let l = confident.loss(&Matrix::filled(2, 1, 0.0), &[1, 1]).unwrap();
        assert!(l < 1e-6);
        // clamped, so a confidently wrong prediction stays finite
        let l = confident.loss(&Matrix::filled(2, 1, 0.0), &[0, 0]).unwrap();
        assert!(l.is_finite() && l > 50.0);
    }

    #[test]
    fn labels_validated() {
        let m = toy();
        let x = Matrix::zeros(2, 2);
        assert!(matches!(m.loss(&x, &[0, 2]), Err(Error::InvalidLabel(2))));
        assert!(matches!(m.loss(&x, &[0]), Err(Error::Shape { .. })));
    }

    #[test]
    fn loss_matches_scalar_loop() {
        let mut rng = Rng::new(21);
        let m = MlpModel::new(&[3, 4, 2], &mut rng).unwrap();
        let rows: Vec<[f64; 3]> = (0..6)
            .map(|_| [rng.next_f64(), rng.next_f64(), rng.next_f64()])
            .collect();
        let labels: Vec<u8> = (0..6).map(|i| (i % 2) as u8).collect();
        let x = Matrix::from_rows(&rows).unwrap();

        let mut total = 0.0;
        for (r, &y) in rows.iter().zip(&labels) {
            let mut hidden = [0.0; 4];
            for (j, h) in hidden.iter_mut().enumerate() {
                let mut z = m.biases()[0][j];
                for (k, v) in r.iter().enumerate() {
                    z += v * m.weights()[0].get(k, j);
                }
                *h = z.tanh();
            }
            for node in 0..2 {
                let mut z = m.biases()[1][node];
                for (j, h) in hidden.iter().enumerate() {
                    z += h * m.weights()[1].get(j, node);
                }
                let p = 1.0 / (1.0 + (-z).exp());
                let t = if node == y as usize { 1.0 } else { 0.0 };
                total -= t * p.ln() + (1.0 - t) * (1.0 - p).ln();
            }
        }
        let expected = total / rows.len() as f64;
        assert!((m.loss(&x, &labels).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn zero_model_has_zero_input_gradient() {
        let m = zeroed(&[3, 4, 2]);
        let g = m
            .input_gradient(&Matrix::filled(2, 3, 0.3), &[0, 1])
            .unwrap();
        assert_eq!(g.shape(), (2, 3));
        assert!(g.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn input_gradient_matches_central_differences() {
        let mut rng = Rng::new(4);
        let m = MlpModel::new(&[6, 5, 4, 2], &mut rng).unwrap();
        let data: Vec<f64> = (0..18).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let x = Matrix::new(3, 6, data).unwrap();
        let y = [1, 0, 1];
        let g = m.input_gradient(&x, &y).unwrap();
        assert_eq!(g.shape(), x.shape());
        let h = 1e-5;
        for i in 0..x.as_slice().len() {
            let mut plus = x.clone();
            plus.as_mut_slice()[i] += h;
            let mut minus = x.clone();
            minus.as_mut_slice()[i] -= h;
            let numeric = (m.loss(&plus, &y).unwrap() - m.loss(&minus, &y).unwrap()) / (2.0 * h);
            let analytic = g.as_slice()[i];
            let err = (numeric - analytic).abs();
            assert!(
                err <= 1e-7 || err / numeric.abs().max(analytic.abs()) <= 1e-4,
                "entry {i}: {analytic} vs {numeric}"
            );
        }
    }

    #[test]
    fn predict_argmax_and_ties() {
        let out = Matrix::from_rows(&[[0.1, 0.9], [0.9, 0.1], [0.5, 0.5]]).unwrap();
        assert_eq!(predict_from_outputs(&out), vec![1, 0, 0]);

        let mut m = zeroed(&[2, 2]);
        m.biases_mut()[0] = vec![-3.0, 3.0];
        assert_eq!(m.predict(&Matrix::zeros(1, 2)).unwrap(), vec![1]);
        m.biases_mut()[0] = vec![0.0, 0.0];
        assert_eq!(m.predict(&Matrix::zeros(1, 2)).unwrap(), vec![0]);
    }

    fn blobs(n: usize, seed: u64) -> Dataset {
        let mut rng = Rng::new(seed);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            let y = (i % 2) as u8;
            let c = if y == 1 { 0.75 } else { 0.25 };
            rows.push([c + 0.05 * rng.normal(), c + 0.05 * rng.normal()]);
            labels.push(y);
        }
        Dataset::new(
            Schema::synthetic(2),
            Matrix::from_rows(&rows).unwrap(),
            labels,
        )
        .unwrap()
    }

    #[test]
    fn learns_separable_blobs() {
        let data = blobs(400, 3);
        let model = MlpModel::detector(2, &mut Rng::new(8)).unwrap();
        let cfg = TrainConfig {
            epochs: 50,
            ..TrainConfig::default()
        };
        let out = train(&model, &data, &cfg).unwrap();
        assert_eq!(out.loss_trace.len(), 50);
        assert!(out.loss_trace.iter().all(|l| l.is_finite()));
        let pred = out.model.predict(data.features()).unwrap();
        let correct = pred
            .iter()
            .zip(data.labels())
            .filter(|(a, b)| a == b)
            .count();
        let acc = correct as f64 / data.len() as f64;
        assert!(acc >= 0.99, "accuracy {acc}");
    }

    #[test]
    fn zero_epochs_is_identity_and_training_is_deterministic() {
        let data = blobs(64, 1);
        let model = MlpModel::detector(2, &mut Rng::new(2)).unwrap();
        let cfg = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        let out = train(&model, &data, &cfg).unwrap();
        assert_eq!(out.model, model);
        assert!(out.loss_trace.is_empty());

        let cfg = TrainConfig {
            epochs: 3,
            batch_size: 16,
            ..TrainConfig::default()
        };
        let a = train(&model, &data, &cfg).unwrap();
        let b = train(&model, &data, &cfg).unwrap();
        assert_eq!(a.model, b.model);
        assert_eq!(a.loss_trace, b.loss_trace);
    }

    #[test]
    fn cosine_schedule() {
        let c = LrSchedule::Cosine;
        assert_eq!(c.rate(0.1, 0, 10), 0.1);
        assert!((c.rate(0.1, 5, 10) - 0.05).abs() < 1e-15);
        assert!(c.rate(0.1, 9, 10) > 0.0);
        assert!((1..10).all(|e| c.rate(0.1, e, 10) < c.rate(0.1, e - 1, 10)));
        assert_eq!(LrSchedule::Constant.rate(0.1, 9, 10), 0.1);
    }

    #[test]
    fn bad_train_config() {
        let data = blobs(8, 1);
        let model = MlpModel::detector(2, &mut Rng::new(2)).unwrap();
        let cfg = TrainConfig {
            batch_size: 0,
            ..TrainConfig::default()
        };
        assert!(matches!(train(&model, &data, &cfg), Err(Error::Config(_))));
        let cfg = TrainConfig {
            learning_rate: -1.0,
            ..TrainConfig::default()
        };
        assert!(matches!(train(&model, &data, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn parts_validation() {
        let mut parts: ModelParts = toy().into();
        parts.biases[1].push(0.0);
        assert!(MlpModel::from_parts(parts).is_err());
        let mut parts: ModelParts = toy().into();
        parts.weights[0].set(0, 0, f64::NAN);
        assert!(matches!(
            MlpModel::from_parts(parts),
            Err(Error::Numeric(_))
        ));
        let mut parts: ModelParts = toy().into();
        parts.layer_dims = vec![2, 2, 3];
        assert!(MlpModel::from_parts(parts).is_err());
    }
}
