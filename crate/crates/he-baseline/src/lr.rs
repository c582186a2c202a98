//! Plaintext logistic-regression training and prediction.
//!
//! Full-batch gradient descent on the mean cross-entropy with an L2 penalty.
//! Weights start at zero, so a run is a pure function of the training split
//! and the configuration. Ties at probability one half resolve to ham.

use text_pipeline::{DatasetSplit, FeatureVector, Label};

use crate::error::HeError;

/// Plaintext logistic-regression coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct LRWeights {
    pub w: Vec<f64>,
    pub b: f64,
}

/// Gradient-descent settings for [`train_lr`].
#[derive(Debug, Clone, PartialEq)]
pub struct LRTrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
}

impl Default for LRTrainConfig {
    fn default() -> LRTrainConfig {
        LRTrainConfig {
            epochs: 300,
            learning_rate: 0.05,
            l2: 1e-4,
        }
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

/// Trains on `split.train` with full-batch gradient descent.
pub fn train_lr(split: &DatasetSplit, cfg: &LRTrainConfig) -> Result<LRWeights, HeError> {
    if split.train.is_empty() {
        return Err(HeError::EmptyTrainingSet);
    }
    let n = split.train[0].0.len();
    for (x, _) in &split.train {
        if x.len() != n {
            return Err(HeError::DimensionMismatch {
                expected: n,
                found: x.len(),
            });
        }
    }

    let m = split.train.len() as f64;
    let mut weights = LRWeights {
        w: vec![0.0; n],
        b: 0.0,
    };
    let mut grad_w = vec![0.0f64; n];
    for epoch in 0..cfg.epochs {
        grad_w.fill(0.0);
        let mut grad_b = 0.0f64;
        for (x, label) in &split.train {
            let error = sigmoid(score(&weights, x)?) - f64::from(label.index() as u32);
            for (g, &count) in grad_w.iter_mut().zip(&x.counts) {
                *g += error * f64::from(count);
            }
            grad_b += error;
        }
        for (w, g) in weights.w.iter_mut().zip(&grad_w) {
            *w -= cfg.learning_rate * (g / m + cfg.l2 * *w);
        }
        weights.b -= cfg.learning_rate * grad_b / m;
        if !weights.b.is_finite() || weights.w.iter().any(|w| !w.is_finite()) {
            return Err(HeError::Divergence { epoch });
        }
    }
    Ok(weights)
}

/// Raw score w.x + b of one email.
pub fn score(weights: &LRWeights, x: &FeatureVector) -> Result<f64, HeError> {
    if x.len() != weights.w.len() {
        return Err(HeError::DimensionMismatch {
            expected: weights.w.len(),
            found: x.len(),
        });
    }
    let dot: f64 = weights
        .w
        .iter()
        .zip(&x.counts)
        .map(|(w, &count)| w * f64::from(count))
        .sum();
    Ok(dot + weights.b)
}

/// Label for a raw score: spam strictly above the tie point, else ham.
pub fn label_for_score(raw: f64) -> Label {
    if raw > 0.0 {
        Label::Spam
    } else {
        Label::Ham
    }
}

/// Predicted label for one email.
pub fn predict(weights: &LRWeights, x: &FeatureVector) -> Result<Label, HeError> {
    Ok(label_for_score(score(weights, x)?))
}

/// Fraction of `data` the model labels correctly.
pub fn accuracy(weights: &LRWeights, data: &[(FeatureVector, Label)]) -> Result<f64, HeError> {
    if data.is_empty() {
        return Ok(0.0);
    }
    let mut correct = 0usize;
    for (x, label) in data {
        if predict(weights, x)? == *label {
            correct += 1;
        }
    }
    Ok(correct as f64 / data.len() as f64)
}
