//! Sparse linear sentence classifiers.
//!
//! Two objectives over L2-regularized losses, both trained by stochastic
//! (sub)gradient descent on shuffled examples:
//!
//! * `logistic`: log loss with a fixed learning rate;
//! * `svm`: hinge loss with the schedule `eta_t = 1 / (lambda * t)` when
//!   `l2_lambda > 0`, else the fixed rate.
//!
//! Training is deterministic given the seed. `predict_proba` applies the
//! sigmoid to the margin for both kinds; for `svm` that is a monotone
//! squashing, not a calibrated probability.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::FeatureVector;

const MODEL_FORMAT_VERSION: u32 = 1;

/// Fold the lazy weight scale back into the weights when it gets this small.
const MIN_SCALE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Logistic,
    Svm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: u32,
    pub learning_rate: f64,
    pub l2_lambda: f64,
    pub seed: u64,
    pub shuffle: bool,
    /// Weight examples inversely to their class frequency.
    pub balance_classes: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 20,
            learning_rate: 0.1,
            l2_lambda: 1e-4,
            seed: 0,
            shuffle: true,
            balance_classes: false,
        }
    }
}

/// Sentence-level evaluation metrics with `EC` as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
}

/// A trained linear model over sparse feature columns.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub kind: ModelKind,
    pub weights: BTreeMap<u32, f64>,
    pub bias: f64,
    pub train_config: TrainConfig,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + exp(z))` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

struct ScaledWeights {
    raw: Vec<f64>,
    scale: f64,
}

impl ScaledWeights {
    fn new(dim: usize) -> Self {
        ScaledWeights {
            raw: vec![0.0; dim],
            scale: 1.0,
        }
    }

    fn margin(&self, fv: &FeatureVector) -> f64 {
        self.scale * fv.dot_dense(&self.raw)
    }

    /// Multiplies every weight by `factor` (L2 decay). A factor of zero,
    /// reached by the svm schedule on its first step, resets the weights.
    fn decay(&mut self, factor: f64) {
        if factor <= 0.0 {
            self.raw.fill(0.0);
            self.scale = 1.0;
            return;
        }
        self.scale *= factor;
        if self.scale < MIN_SCALE {
            for w in &mut self.raw {
                *w *= self.scale;
            }
            self.scale = 1.0;
        }
    }

    /// Adds `coeff * x` to the effective weights.
    fn add(&mut self, fv: &FeatureVector, coeff: f64) {
        for &(col, x) in fv.entries() {
            self.raw[col as usize] += coeff * x / self.scale;
        }
    }

    fn finalize(self) -> BTreeMap<u32, f64> {
        self.raw
            .into_iter()
            .enumerate()
            .filter(|&(_, w)| w != 0.0)
            .map(|(col, w)| (col as u32, self.scale * w))
            .collect()
    }
}

/// Trains a linear model. Fails on an empty or single-class training set and
/// on non-finite final weights (diverged configuration).
pub fn train(
    kind: ModelKind,
    examples: &[(FeatureVector, Label)],
    cfg: &TrainConfig,
) -> Result<LinearModel> {
    if examples.is_empty() {
        return Err(Error::EmptyInput("training examples"));
    }
    if cfg.epochs == 0 || cfg.learning_rate <= 0.0 || cfg.l2_lambda < 0.0 {
        return Err(Error::Invalid(format!(
            "invalid training config: epochs {}, learning_rate {}, l2_lambda {}",
            cfg.epochs, cfg.learning_rate, cfg.l2_lambda
        )));
    }
    let positives = examples.iter().filter(|(_, l)| *l == Label::Ec).count();
    if positives == 0 || positives == examples.len() {
        return Err(Error::DegenerateTraining);
    }

    let n = examples.len();
    let dim = examples
        .iter()
        .flat_map(|(fv, _)| fv.entries().iter().map(|&(col, _)| col as usize + 1))
        .max()
        .unwrap_or(0);
    let (pos_weight, neg_weight) = if cfg.balance_classes {
        let negatives = n - positives;
        (
            n as f64 / (2.0 * positives as f64),
            n as f64 / (2.0 * negatives as f64),
        )
    } else {
        (1.0, 1.0)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut weights = ScaledWeights::new(dim);
    let mut bias = 0.0;
    let lambda = cfg.l2_lambda;
    let mut t: u64 = 0;

    for _ in 0..cfg.epochs {
        if cfg.shuffle {
            order.shuffle(&mut rng);
        }
        for &idx in &order {
            t += 1;
            let (fv, label) = &examples[idx];
            let example_weight = match label {
                Label::Ec => pos_weight,
                Label::Content => neg_weight,
            };
            let z = weights.margin(fv) + bias;
            match kind {
                ModelKind::Logistic => {
                    let eta = cfg.learning_rate;
                    let y = if *label == Label::Ec { 1.0 } else { 0.0 };
                    let g = (sigmoid(z) - y) * example_weight;
                    weights.decay(1.0 - eta * lambda);
                    weights.add(fv, -eta * g);
                    bias -= eta * g;
                }
                ModelKind::Svm => {
                    let eta = if lambda > 0.0 {
                        1.0 / (lambda * t as f64)
                    } else {
                        cfg.learning_rate
                    };
                    let y = if *label == Label::Ec { 1.0 } else { -1.0 };
                    weights.decay(1.0 - eta * lambda);
                    if y * z < 1.0 {
                        weights.add(fv, eta * y * example_weight);
                        bias += eta * y * example_weight;
                    }
                }
            }
        }
    }

    let weights = weights.finalize();
    if !bias.is_finite() || weights.values().any(|w| !w.is_finite()) {
        return Err(Error::Invalid(
            "training diverged: non-finite weights (lower the learning rate)".into(),
        ));
    }
    Ok(LinearModel {
        kind,
        weights,
        bias,
        train_config: *cfg,
    })
}

impl LinearModel {
    /// Raw decision value `w . x + b`.
    pub fn decision(&self, fv: &FeatureVector) -> f64 {
        let dot: f64 = fv
            .entries()
            .iter()
            .map(|&(col, x)| self.weights.get(&col).copied().unwrap_or(0.0) * x)
            .sum();
        dot + self.bias
    }

    /// `sigmoid(w . x + b)`. Calibrated for `logistic`; a monotone squashing
    /// of the margin for `svm`.
    pub fn predict_proba(&self, fv: &FeatureVector) -> f64 {
        sigmoid(self.decision(fv))
    }

    pub fn predict(&self, fv: &FeatureVector) -> Label {
        if self.predict_proba(fv) >= 0.5 {
            Label::Ec
        } else {
            Label::Content
        }
    }

    /// True when `predict_proba` is a calibrated probability.
    pub fn calibrated(&self) -> bool {
        self.kind == ModelKind::Logistic
    }

    pub fn to_json(&self) -> String {
        let file = LinearModelFile {
            version: MODEL_FORMAT_VERSION,
            kind: self.kind,
            weights: self.weights.iter().map(|(&c, &w)| (c, w)).collect(),
            bias: self.bias,
            config: self.train_config,
        };
        serde_json::to_string(&file).expect("linear model serializes")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let file: LinearModelFile = serde_json::from_str(json)
            .map_err(|e| Error::Invalid(format!("malformed model file: {e}")))?;
        if file.version != MODEL_FORMAT_VERSION {
            return Err(Error::ModelVersion {
                found: file.version,
            });
        }
        Ok(LinearModel {
            kind: file.kind,
            weights: file.weights.into_iter().collect(),
            bias: file.bias,
            train_config: file.config,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct LinearModelFile {
    version: u32,
    kind: ModelKind,
    weights: Vec<(u32, f64)>,
    bias: f64,
    config: TrainConfig,
}

/// Full-batch L2-regularized log loss:
/// `sum_i [softplus(z_i) - y_i * z_i] + (lambda / 2) * ||w||^2`.
pub fn logistic_objective(
    weights: &[f64],
    bias: f64,
    examples: &[(FeatureVector, Label)],
    l2_lambda: f64,
) -> f64 {
    let mut loss = 0.0;
    for (fv, label) in examples {
        let z = fv.dot_dense(weights) + bias;
        let y = if *label == Label::Ec { 1.0 } else { 0.0 };
        loss += softplus(z) - y * z;
    }
    loss + 0.5 * l2_lambda * weights.iter().map(|w| w * w).sum::<f64>()
}

/// Gradient of [`logistic_objective`] with respect to the weights and bias.
pub fn logistic_gradient(
    weights: &[f64],
    bias: f64,
    examples: &[(FeatureVector, Label)],
    l2_lambda: f64,
) -> (Vec<f64>, f64) {
    let mut grad = vec![0.0; weights.len()];
    let mut bias_grad = 0.0;
    for (fv, label) in examples {
        let z = fv.dot_dense(weights) + bias;
        let y = if *label == Label::Ec { 1.0 } else { 0.0 };
        let residual = sigmoid(z) - y;
        for &(col, x) in fv.entries() {
            grad[col as usize] += residual * x;
        }
        bias_grad += residual;
    }
    for (g, w) in grad.iter_mut().zip(weights) {
        *g += l2_lambda * w;
    }
    (grad, bias_grad)
}

/// Precision/recall/F1/accuracy with `EC` positive. Ratios with a zero
/// denominator are reported as 0.
pub fn evaluate(predicted: &[Label], gold: &[Label]) -> Result<Metrics> {
    if predicted.len() != gold.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: gold.len(),
        });
    }
    if predicted.is_empty() {
        return Err(Error::EmptyInput("labels"));
    }
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fne = 0usize;
    let mut tn = 0usize;
    for (p, g) in predicted.iter().zip(gold) {
        match (p, g) {
            (Label::Ec, Label::Ec) => tp += 1,
            (Label::Ec, Label::Content) => fp += 1,
            (Label::Content, Label::Ec) => fne += 1,
            (Label::Content, Label::Content) => tn += 1,
        }
    }
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fne);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    let accuracy = ratio(tp + tn, predicted.len());
    Ok(Metrics {
        precision,
        recall,
        f1,
        accuracy,
    })
}
