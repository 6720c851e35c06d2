//! One-hidden-layer feed-forward binary classifier.
//!
//! The network computes `sigmoid(w2 · act(W1 x + b1) + b2)` and is trained
//! with mini-batch SGD on binary cross-entropy. The learning rate starts at
//! `initial_lr` and is halved after every epoch whose validation error is
//! worse than the best seen so far; training ends once it drops below
//! `lr_floor`. A hidden width of zero gives logistic regression,
//! `sigmoid(w2 · x + b2)`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::features::FeatureVector;
use crate::{Error, Result};

pub const HIDDEN_DIMS: [usize; 4] = [30, 50, 100, 150];

/// Hidden-layer activation. Declaration order is the grid-search tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    HardTanh,
    Sigmoid,
    Relu,
}

impl Activation {
    pub const ALL: [Activation; 4] = [Activation::Tanh, Activation::HardTanh, Activation::Sigmoid, Activation::Relu];

    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::HardTanh => z.clamp(-1.0, 1.0),
            Activation::Sigmoid => sigmoid(z),
            Activation::Relu => z.max(0.0),
        }
    }

    /// Derivative at pre-activation `z`, given `a = apply(z)`. Zero at the relu/hardtanh kinks.
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - a * a,
            Activation::HardTanh => {
                if z > -1.0 && z < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::HardTanh => "hardtanh",
            Activation::Sigmoid => "sigmoid",
            Activation::Relu => "relu",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Activation::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown activation {s:?}")))
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Binary cross-entropy of a logit against a 0/1 target.
fn bce_from_logit(z: f64, y: f64) -> f64 {
    softplus(z) - y * z
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FfnnConfig {
    /// Hidden units; 0 selects logistic regression.
    pub hidden_dim: usize,
    pub activation: Activation,
    pub initial_lr: f64,
    pub lr_floor: f64,
    pub batch_size: usize,
    pub seed: u64,
    pub max_epochs: usize,
    /// Fraction of each class held out for validation.
    pub validation_fraction: f64,
}

impl Default for FfnnConfig {
    fn default() -> Self {
        FfnnConfig {
            hidden_dim: 30,
            activation: Activation::Tanh,
            initial_lr: 0.4,
            lr_floor: 0.001,
            batch_size: 64,
            seed: 0,
            max_epochs: 500,
            validation_fraction: 0.1,
        }
    }
}

impl FfnnConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr_floor > 0.0 && self.initial_lr > self.lr_floor && self.initial_lr.is_finite()) {
            return Err(Error::Config(format!(
                "need initial_lr > lr_floor > 0, got {} and {}",
                self.initial_lr, self.lr_floor
            )));
        }
        if self.batch_size == 0 || self.max_epochs == 0 {
            return Err(Error::Config("batch_size and max_epochs must be positive".into()));
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return Err(Error::Config("validation_fraction must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// The 16 activation x width configurations, other fields copied from `self`.
    pub fn grid(&self) -> Vec<FfnnConfig> {
        Activation::ALL
            .into_iter()
            .flat_map(|activation| {
                HIDDEN_DIMS.into_iter().map(move |hidden_dim| FfnnConfig {
                    hidden_dim,
                    activation,
                    ..self.clone()
                })
            })
            .collect()
    }
}

/// Network parameters. `w1` is row-major `hidden_dim x input_dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FfnnModel {
    pub input_dim: usize,
    pub config: FfnnConfig,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    /// Length `hidden_dim`, or `input_dim` for logistic regression.
    pub w2: Vec<f64>,
    pub b2: f64,
}

/// Gradient of the loss, laid out like [`FfnnModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

impl Gradients {
    fn zeros_like(model: &FfnnModel) -> Self {
        Gradients {
            w1: vec![0.0; model.w1.len()],
            b1: vec![0.0; model.b1.len()],
            w2: vec![0.0; model.w2.len()],
            b2: 0.0,
        }
    }

    /// Flattened in [`FfnnModel::parameters`] order.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.w1.len() + self.b1.len() + self.w2.len() + 1);
        out.extend_from_slice(&self.w1);
        out.extend_from_slice(&self.b1);
        out.extend_from_slice(&self.w2);
        out.push(self.b2);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: Label,
    pub probability: f64,
}

const MODEL_FORMAT: &str = "cognate-ffnn";
const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    model: FfnnModel,
}

impl FfnnModel {
    /// All-zero parameters.
    pub fn zeros(input_dim: usize, config: FfnnConfig) -> Self {
        let h = config.hidden_dim;
        let w2_len = if h == 0 { input_dim } else { h };
        FfnnModel {
            input_dim,
            w1: vec![0.0; h * input_dim],
            b1: vec![0.0; h],
            w2: vec![0.0; w2_len],
            b2: 0.0,
            config,
        }
    }

    /// Weights uniform in `±sqrt(6 / (fan_in + fan_out))`, biases zero.
    pub fn init<R: Rng>(input_dim: usize, config: FfnnConfig, rng: &mut R) -> Self {
        let mut model = Self::zeros(input_dim, config);
        let h = model.config.hidden_dim;
        let fill = |w: &mut [f64], fan_in: usize, fan_out: usize, rng: &mut R| {
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            w.iter_mut().for_each(|x| *x = rng.random_range(-bound..bound));
        };
        if h == 0 {
            fill(&mut model.w2, input_dim, 1, rng);
        } else {
            fill(&mut model.w1, input_dim, h, rng);
            fill(&mut model.w2, h, 1, rng);
        }
        model
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::Dimension {
                expected: self.input_dim,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Hidden pre-activations and activations, then the output logit.
    fn hidden_and_logit(&self, x: &[f64], pre: &mut Vec<f64>, act: &mut Vec<f64>) -> f64 {
        let h = self.config.hidden_dim;
        pre.clear();
        act.clear();
        if h == 0 {
            return self.b2 + dot(&self.w2, x);
        }
        for (row, b) in self.w1.chunks_exact(self.input_dim).zip(&self.b1) {
            let z = b + dot(row, x);
            pre.push(z);
            act.push(self.config.activation.apply(z));
        }
        self.b2 + dot(&self.w2, act)
    }

    fn logit(&self, x: &[f64]) -> f64 {
        self.hidden_and_logit(x, &mut Vec::new(), &mut Vec::new())
    }

    /// Probability of the cognate class, strictly inside (0, 1).
    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let p = sigmoid(self.logit(x));
        Ok(p.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0))
    }

    /// Label 1 iff the probability is at least 0.5.
    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        let probability = self.forward(x)?;
        let label = if probability >= 0.5 { Label::Cognate } else { Label::NonCognate };
        Ok(Prediction { label, probability })
    }

    /// Binary cross-entropy for one example.
    pub fn loss(&self, x: &[f64], y: Label) -> Result<f64> {
        self.check_dim(x)?;
        Ok(bce_from_logit(self.logit(x), y.as_f64()))
    }

    /// Loss and its gradient for one example.
    pub fn loss_and_gradient(&self, x: &[f64], y: Label) -> Result<(f64, Gradients)> {
        self.check_dim(x)?;
        let mut grad = Gradients::zeros_like(self);
        let mut scratch = Scratch::default();
        let loss = self.accumulate(x, y.as_f64(), &mut grad, &mut scratch);
        Ok((loss, grad))
    }

    /// Add this example's gradient into `grad`, return its loss.
    fn accumulate(&self, x: &[f64], y: f64, grad: &mut Gradients, s: &mut Scratch) -> f64 {
        let z = self.hidden_and_logit(x, &mut s.pre, &mut s.act);
        let delta = sigmoid(z) - y;
        grad.b2 += delta;
        if self.config.hidden_dim == 0 {
            axpy(&mut grad.w2, delta, x);
            return bce_from_logit(z, y);
        }
        axpy(&mut grad.w2, delta, &s.act);
        for j in 0..self.config.hidden_dim {
            let dh = delta * self.w2[j] * self.config.activation.derivative(s.pre[j], s.act[j]);
            if dh != 0.0 {
                grad.b1[j] += dh;
                axpy(&mut grad.w1[j * self.input_dim..(j + 1) * self.input_dim], dh, x);
            }
        }
        bce_from_logit(z, y)
    }

    fn step(&mut self, grad: &Gradients, scale: f64) {
        axpy(&mut self.w1, -scale, &grad.w1);
        axpy(&mut self.b1, -scale, &grad.b1);
        axpy(&mut self.w2, -scale, &grad.w2);
        self.b2 -= scale * grad.b2;
    }

    /// All parameters flattened as `w1, b1, w2, b2`.
    pub fn parameters(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.w1.len() + self.b1.len() + self.w2.len() + 1);
        out.extend_from_slice(&self.w1);
        out.extend_from_slice(&self.b1);
        out.extend_from_slice(&self.w2);
        out.push(self.b2);
        out
    }

    /// Inverse of [`FfnnModel::parameters`].
    pub fn set_parameters(&mut self, params: &[f64]) -> Result<()> {
        let expected = self.w1.len() + self.b1.len() + self.w2.len() + 1;
        if params.len() != expected {
            return Err(Error::Dimension {
                expected,
                found: params.len(),
            });
        }
        let (w1, rest) = params.split_at(self.w1.len());
        let (b1, rest) = rest.split_at(self.b1.len());
        let (w2, rest) = rest.split_at(self.w2.len());
        self.w1.copy_from_slice(w1);
        self.b1.copy_from_slice(b1);
        self.w2.copy_from_slice(w2);
        self.b2 = rest[0];
        Ok(())
    }

    fn is_finite(&self) -> bool {
        self.parameters().iter().all(|x| x.is_finite())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            model: self.clone(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.format != MODEL_FORMAT || file.version != MODEL_VERSION {
            return Err(Error::InvalidInput(format!(
                "unsupported model file {} v{}",
                file.format, file.version
            )));
        }
        let m = file.model;
        let h = m.config.hidden_dim;
        let w2_len = if h == 0 { m.input_dim } else { h };
        if m.w1.len() != h * m.input_dim || m.b1.len() != h || m.w2.len() != w2_len {
            return Err(Error::InvalidInput("model parameter shapes do not match its config".into()));
        }
        Ok(m)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[derive(Default)]
struct Scratch {
    pre: Vec<f64>,
    act: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    LrFloor,
    MaxEpochs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean per-example loss over the epoch's training batches.
    pub train_loss: f64,
    /// `1 - accuracy` on the validation split after the epoch.
    pub val_error: f64,
    /// Learning rate used during the epoch.
    pub lr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    pub epochs: Vec<EpochRecord>,
    pub stop_reason: StopReason,
    /// Learning rate after the last update of the schedule.
    pub final_lr: f64,
    /// Epoch whose parameters were returned.
    pub best_epoch: usize,
    pub best_val_error: f64,
}

impl TrainingTrace {
    pub fn best_val_accuracy(&self) -> f64 {
        1.0 - self.best_val_error
    }
}

/// Seeded stratified holdout: `(train, validation)` indices, at least one
/// validation and one training example per class.
fn stratified_holdout<R: Rng>(labels: &[Label], fraction: f64, rng: &mut R) -> (Vec<usize>, Vec<usize>) {
    let mut train = Vec::new();
    let mut val = Vec::new();
    for class in [Label::Cognate, Label::NonCognate] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(rng);
        let n_val = ((idx.len() as f64 * fraction).round() as usize).clamp(1, idx.len() - 1);
        val.extend_from_slice(&idx[..n_val]);
        train.extend_from_slice(&idx[n_val..]);
    }
    train.sort_unstable();
    val.sort_unstable();
    (train, val)
}

fn error_rate(model: &FfnnModel, data: &[FeatureVector], idx: &[usize]) -> f64 {
    let wrong = idx
        .iter()
        .filter(|&&i| {
            let p = sigmoid(model.logit(&data[i].values));
            let predicted = if p >= 0.5 { Label::Cognate } else { Label::NonCognate };
            predicted != data[i].label
        })
        .count();
    wrong as f64 / idx.len() as f64
}

/// Train one network. Returns the parameters from the epoch with the lowest
/// validation error (latest such epoch on ties).
pub fn train(data: &[FeatureVector], config: &FfnnConfig) -> Result<(FfnnModel, TrainingTrace)> {
    config.validate()?;
    let input_dim = data
        .first()
        .map(|v| v.values.len())
        .ok_or_else(|| Error::Training("empty training set".into()))?;
    if let Some(bad) = data.iter().find(|v| v.values.len() != input_dim) {
        return Err(Error::Dimension {
            expected: input_dim,
            found: bad.values.len(),
        });
    }
    let labels: Vec<Label> = data.iter().map(|v| v.label).collect();
    let positives = labels.iter().filter(|&&l| l == Label::Cognate).count();
    let negatives = labels.len() - positives;
    if positives < 2 || negatives < 2 {
        return Err(Error::Training(format!(
            "need at least 2 examples of each class, got {positives} cognates and {negatives} non-cognates"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = FfnnModel::init(input_dim, config.clone(), &mut rng);
    let (mut train_idx, val_idx) = stratified_holdout(&labels, config.validation_fraction, &mut rng);

    let mut lr = config.initial_lr;
    let mut best = (f64::INFINITY, 0usize, model.clone());
    let mut epochs = Vec::new();
    let mut grad = Gradients::zeros_like(&model);
    let mut scratch = Scratch::default();
    let stop_reason = loop {
        let epoch = epochs.len() + 1;
        train_idx.shuffle(&mut rng);
        let mut total_loss = 0.0;
        for batch in train_idx.chunks(config.batch_size) {
            grad.w1.fill(0.0);
            grad.b1.fill(0.0);
            grad.w2.fill(0.0);
            grad.b2 = 0.0;
            for &i in batch {
                total_loss += model.accumulate(&data[i].values, data[i].label.as_f64(), &mut grad, &mut scratch);
            }
            model.step(&grad, lr / batch.len() as f64);
        }
        let train_loss = total_loss / train_idx.len() as f64;
        if !train_loss.is_finite() || !model.is_finite() {
            return Err(Error::Training(format!(
                "non-finite loss at epoch {epoch} (lr {lr}, loss {train_loss})"
            )));
        }

        let val_error = error_rate(&model, data, &val_idx);
        epochs.push(EpochRecord {
            epoch,
            train_loss,
            val_error,
            lr,
        });
        if val_error > best.0 {
            lr /= 2.0;
        }
        if val_error <= best.0 {
            best = (val_error, epoch, model.clone());
        }
        if lr < config.lr_floor {
            break StopReason::LrFloor;
        }
        if epoch >= config.max_epochs {
            break StopReason::MaxEpochs;
        }
    };

    let (best_val_error, best_epoch, best_model) = best;
    Ok((
        best_model,
        TrainingTrace {
            epochs,
            stop_reason,
            final_lr: lr,
            best_epoch,
            best_val_error,
        },
    ))
}

/// Outcome of [`grid_search`].
#[derive(Debug, Clone)]
pub struct GridSearchResult {
    pub best: FfnnConfig,
    pub model: FfnnModel,
    pub trace: TrainingTrace,
    /// Validation accuracy of every configuration, in grid order.
    pub accuracies: Vec<(FfnnConfig, f64)>,
}

/// Train every configuration (same seed, hence the same validation split)
/// and keep the one with the best validation accuracy. Ties go to the
/// smaller hidden layer, then to the earlier activation in
/// tanh < hardtanh < sigmoid < relu.
pub fn grid_search(data: &[FeatureVector], grid: &[FfnnConfig]) -> Result<GridSearchResult> {
    if grid.is_empty() {
        return Err(Error::Config("empty hyper-parameter grid".into()));
    }
    let runs: Vec<(FfnnModel, TrainingTrace)> = grid.par_iter().map(|c| train(data, c)).collect::<Result<_>>()?;
    let best = (0..grid.len())
        .min_by(|&a, &b| {
            let acc = |i: usize| runs[i].1.best_val_accuracy();
            acc(b)
                .total_cmp(&acc(a))
                .then(grid[a].hidden_dim.cmp(&grid[b].hidden_dim))
                .then(grid[a].activation.cmp(&grid[b].activation))
        })
        .expect("grid is non-empty");
    let accuracies = grid
        .iter()
        .zip(&runs)
        .map(|(c, (_, t))| (c.clone(), t.best_val_accuracy()))
        .collect();
    let (model, trace) = runs.into_iter().nth(best).expect("index in range");
    Ok(GridSearchResult {
        best: grid[best].clone(),
        model,
        trace,
        accuracies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(values: Vec<f64>, label: Label) -> FeatureVector {
        FeatureVector {
            feature_set: "test".into(),
            values,
            label,
            pair_id: 0,
        }
    }

    /// Two well separated clusters on the diagonal.
    fn blobs(n: usize, seed: u64) -> Vec<FeatureVector> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|i| {
                let (c, label) = if i % 2 == 0 { (1.5, Label::Cognate) } else { (-1.5, Label::NonCognate) };
                fv(
                    vec![c + rng.random_range(-0.5..0.5), c + rng.random_range(-0.5..0.5)],
                    label,
                )
            })
            .collect()
    }

    #[test]
    fn zero_parameters_give_one_half() {
        for hidden_dim in [0, 5] {
            let cfg = FfnnConfig {
                hidden_dim,
                ..FfnnConfig::default()
            };
            let m = FfnnModel::zeros(3, cfg);
            assert_eq!(m.forward(&[1.0, -2.0, 3.0]).unwrap(), 0.5);
        }
    }

    #[test]
    fn scalar_relu_network() {
        let cfg = FfnnConfig {
            hidden_dim: 1,
            activation: Activation::Relu,
            ..FfnnConfig::default()
        };
        let mut m = FfnnModel::zeros(1, cfg);
        m.w1 = vec![1.0];
        m.w2 = vec![1.0];
        let expected = 1.0 / (1.0 + (-2.0f64).exp());
        assert!((m.forward(&[2.0]).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.8808).abs() < 1e-4);
    }

    #[test]
    fn forward_rejects_wrong_dimension() {
        let m = FfnnModel::zeros(3, FfnnConfig::default());
        assert!(matches!(m.forward(&[1.0]), Err(Error::Dimension { expected: 3, found: 1 })));
        assert!(m.predict(&[1.0; 4]).is_err());
    }

    #[test]
    fn probabilities_stay_strictly_inside_unit_interval() {
        let mut m = FfnnModel::zeros(1, FfnnConfig { hidden_dim: 0, ..FfnnConfig::default() });
        m.w2 = vec![1.0];
        for x in [-1e4, -50.0, 0.0, 50.0, 1e4] {
            let p = m.forward(&[x]).unwrap();
            assert!(p > 0.0 && p < 1.0, "{x} -> {p}");
        }
    }

    #[test]
    fn prediction_threshold_is_inclusive() {
        let mut m = FfnnModel::zeros(1, FfnnConfig { hidden_dim: 0, ..FfnnConfig::default() });
        assert_eq!(m.predict(&[0.0]).unwrap().label, Label::Cognate);
        // logit(0.2) = ln(0.25)
        m.b2 = (0.25f64).ln();
        let p = m.predict(&[0.0]).unwrap();
        assert!((p.probability - 0.2).abs() < 1e-12);
        assert_eq!(p.label, Label::NonCognate);
        m.b2 = 9f64.ln();
        assert_eq!(m.predict(&[0.0]).unwrap().label, Label::Cognate);
    }

    #[test]
    fn bce_matches_naive_formula() {
        for z in [-3.0, -0.1, 0.0, 0.7, 4.0] {
            let p = sigmoid(z);
            for y in [0.0, 1.0] {
                let naive = -(y * p.ln() + (1.0 - y) * (1.0 - p).ln());
                assert!((bce_from_logit(z, y) - naive).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn logistic_regression_separates_blobs() {
        let data = blobs(200, 3);
        let cfg = FfnnConfig {
            hidden_dim: 0,
            seed: 11,
            ..FfnnConfig::default()
        };
        let (model, trace) = train(&data, &cfg).unwrap();
        assert_eq!(error_rate(&model, &data, &(0..data.len()).collect::<Vec<_>>()), 0.0);
        assert_eq!(trace.best_val_error, 0.0);
    }

    #[test]
    fn schedule_only_halves() {
        let data = blobs(60, 5);
        let cfg = FfnnConfig {
            hidden_dim: 5,
            seed: 2,
            max_epochs: 200,
            ..FfnnConfig::default()
        };
        let (_, trace) = train(&data, &cfg).unwrap();
        let mut expected = 0.4;
        for e in &trace.epochs {
            while e.lr < expected {
                expected /= 2.0;
            }
            assert_eq!(e.lr, expected);
        }
        if trace.stop_reason == StopReason::LrFloor {
            assert!(trace.final_lr < 0.001);
        } else {
            assert_eq!(trace.epochs.len(), 200);
        }
    }

    #[test]
    fn noisy_labels_drive_lr_to_the_floor() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let data: Vec<_> = (0..200)
            .map(|i| {
                let label = if i % 2 == 0 { Label::Cognate } else { Label::NonCognate };
                fv(vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)], label)
            })
            .collect();
        let cfg = FfnnConfig {
            hidden_dim: 30,
            seed: 3,
            ..FfnnConfig::default()
        };
        let (_, trace) = train(&data, &cfg).unwrap();
        let lrs: Vec<f64> = trace.epochs.iter().map(|e| e.lr).collect();
        let halvings = lrs.windows(2).filter(|w| w[1] != w[0]).count();
        assert!(lrs.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] / 2.0));
        assert!(halvings >= 1);
        if trace.stop_reason == StopReason::LrFloor {
            assert!(trace.final_lr < cfg.lr_floor);
            assert_eq!(trace.final_lr, 0.4 / f64::powi(2.0, 9));
        }
    }

    #[test]
    fn single_class_is_rejected() {
        let data: Vec<_> = (0..10).map(|i| fv(vec![i as f64], Label::Cognate)).collect();
        assert!(matches!(train(&data, &FfnnConfig::default()), Err(Error::Training(_))));
        assert!(matches!(train(&[], &FfnnConfig::default()), Err(Error::Training(_))));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let data = blobs(20, 1);
        let bad = FfnnConfig {
            initial_lr: 0.0005,
            ..FfnnConfig::default()
        };
        assert!(matches!(train(&data, &bad), Err(Error::Config(_))));
        assert!(matches!(grid_search(&data, &[]), Err(Error::Config(_))));
    }

    #[test]
    fn holdout_is_stratified_and_disjoint() {
        let labels: Vec<Label> = (0..50)
            .map(|i| if i < 30 { Label::Cognate } else { Label::NonCognate })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (train, val) = stratified_holdout(&labels, 0.1, &mut rng);
        assert_eq!(train.len() + val.len(), 50);
        assert_eq!(val.iter().filter(|&&i| labels[i] == Label::Cognate).count(), 3);
        assert_eq!(val.iter().filter(|&&i| labels[i] == Label::NonCognate).count(), 2);
        assert!(val.iter().all(|i| !train.contains(i)));
    }

    #[test]
    fn grid_of_one_returns_it() {
        let data = blobs(40, 9);
        let cfg = FfnnConfig {
            hidden_dim: 3,
            activation: Activation::Sigmoid,
            max_epochs: 20,
            ..FfnnConfig::default()
        };
        let result = grid_search(&data, std::slice::from_ref(&cfg)).unwrap();
        assert_eq!(result.best, cfg);
        assert_eq!(result.accuracies.len(), 1);
    }

    #[test]
    fn grid_ties_prefer_smaller_width_then_activation_order() {
        // Easy data: every configuration reaches perfect validation accuracy.
        let data = blobs(40, 4);
        let base = FfnnConfig {
            max_epochs: 30,
            ..FfnnConfig::default()
        };
        let grid = vec![
            FfnnConfig {
                hidden_dim: 50,
                activation: Activation::Tanh,
                ..base.clone()
            },
            FfnnConfig {
                hidden_dim: 30,
                activation: Activation::Relu,
                ..base.clone()
            },
            FfnnConfig {
                hidden_dim: 30,
                activation: Activation::HardTanh,
                ..base.clone()
            },
        ];
        let result = grid_search(&data, &grid).unwrap();
        assert!(result.accuracies.iter().all(|(_, a)| *a == 1.0));
        assert_eq!((result.best.hidden_dim, result.best.activation), (30, Activation::HardTanh));
    }

    #[test]
    fn full_grid_has_sixteen_configs() {
        let grid = FfnnConfig::default().grid();
        assert_eq!(grid.len(), 16);
        assert_eq!(grid[0].activation, Activation::Tanh);
        assert_eq!(grid[15].hidden_dim, 150);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = FfnnModel::init(7, FfnnConfig { hidden_dim: 4, ..FfnnConfig::default() }, &mut rng);
        let back = FfnnModel::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
        assert!(FfnnModel::from_json(&m.to_json().unwrap().replace("cognate-ffnn", "other")).is_err());
    }

    #[test]
    fn parses_activation_names() {
        assert_eq!("HardTanh".parse::<Activation>().unwrap(), Activation::HardTanh);
        assert!("gelu".parse::<Activation>().is_err());
    }
}
