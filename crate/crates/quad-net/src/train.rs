//! SGD training with momentum, plus batch forward/backward helpers shared
//! with the gradient checker and the leakage experiments.

use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};
use text_pipeline::types::{DatasetSplit, FeatureVector, Label};

use crate::error::QuadNetError;
use crate::forward::sigmoid;
use crate::params::QuadNetParams;
use crate::quantize::QuantizedEncryptedPart;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub momentum: f64,
    pub seed: u64,
    /// Encrypted-part hidden width.
    pub d: usize,
    /// Encrypted-part output width.
    pub t: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 40,
            learning_rate: 0.05,
            batch_size: 32,
            momentum: 0.9,
            seed: 42,
            d: 40,
            t: 20,
        }
    }
}

impl TrainConfig {
    /// Hex digest of the full configuration, stored in model files.
    pub fn digest(&self) -> String {
        let canonical = format!(
            "epochs={};lr={};batch={};momentum={};seed={};d={};t={}",
            self.epochs,
            self.learning_rate,
            self.batch_size,
            self.momentum,
            self.seed,
            self.d,
            self.t
        );
        hex(&Sha256::digest(canonical.as_bytes()))
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub params: QuadNetParams,
    /// Mean training loss per epoch.
    pub epoch_losses: Vec<f64>,
}

/// Gradients for every parameter array, in the same shapes.
pub struct Gradients {
    pub p: Array2<f64>,
    pub w2: Array2<f64>,
    pub w3: Array2<f64>,
    pub b3: Array1<f64>,
    pub w4: Array2<f64>,
    pub b4: Array1<f64>,
}

/// Stacks feature vectors into a design matrix with the bias slot, one row
/// per example.
pub fn design_matrix(examples: &[(FeatureVector, Label)]) -> (Array2<f64>, Array2<f64>) {
    let n = examples.first().map(|(x, _)| x.counts.len()).unwrap_or(0);
    let mut x = Array2::zeros((examples.len(), n + 1));
    let mut y = Array2::zeros((examples.len(), 2));
    for (row, (fv, label)) in examples.iter().enumerate() {
        x[(row, 0)] = 1.0;
        for (i, &c) in fv.counts.iter().enumerate() {
            x[(row, i + 1)] = c as f64;
        }
        y[(row, label.index())] = 1.0;
    }
    (x, y)
}

/// Encrypted-part forward over a batch: returns (H, U, Q) where
/// H = X P^T, U = H squared elementwise, Q = U W2^T.
pub fn encrypted_part_forward_batch(
    params: &QuadNetParams,
    xb: &Array2<f64>,
) -> (Array2<f64>, Array2<f64>, Array2<f64>) {
    let h = xb.dot(&params.p.t());
    let u = h.mapv(|v| v * v);
    let q = u.dot(&params.w2.t());
    (h, u, q)
}

/// Backpropagates an intermediate gradient dQ through the encrypted part.
pub fn encrypted_part_backward_batch(
    params: &QuadNetParams,
    xb: &Array2<f64>,
    h: &Array2<f64>,
    u: &Array2<f64>,
    dq: &Array2<f64>,
) -> (Array2<f64>, Array2<f64>) {
    let dw2 = dq.t().dot(u);
    let du = dq.dot(&params.w2);
    let dh = 2.0 * h * &du;
    let dp = dh.t().dot(xb);
    (dp, dw2)
}

/// Full forward/backward over a batch with one-hot (or soft) targets.
///
/// Loss is binary cross-entropy summed over the two sigmoid outputs and
/// averaged over the batch.
pub fn forward_backward(
    params: &QuadNetParams,
    xb: &Array2<f64>,
    yb: &Array2<f64>,
) -> (f64, Gradients) {
    let m = xb.nrows() as f64;
    let pt = &params.plaintext;
    let (h, u, q) = encrypted_part_forward_batch(params, xb);
    let pre3 = q.dot(&pt.w3.t()) + &pt.b3;
    let a3 = pre3.mapv(|v| v.max(0.0));
    let z = a3.dot(&pt.w4.t()) + &pt.b4;
    let probs = z.mapv(sigmoid);
    let loss = bce_loss(&probs, yb);

    let dz = (&probs - yb) / m;
    let dw4 = dz.t().dot(&a3);
    let db4 = dz.sum_axis(Axis(0));
    let da3 = dz.dot(&pt.w4);
    let relu_mask = pre3.mapv(|v| if v > 0.0 { 1.0 } else { 0.0 });
    let dpre3 = da3 * &relu_mask;
    let dw3 = dpre3.t().dot(&q);
    let db3 = dpre3.sum_axis(Axis(0));
    let dq = dpre3.dot(&pt.w3);
    let (dp, dw2) = encrypted_part_backward_batch(params, xb, &h, &u, &dq);
    (loss, Gradients { p: dp, w2: dw2, w3: dw3, b3: db3, w4: dw4, b4: db4 })
}

/// Loss only, for finite-difference checks.
pub fn batch_loss(params: &QuadNetParams, xb: &Array2<f64>, yb: &Array2<f64>) -> f64 {
    let pt = &params.plaintext;
    let (_, _, q) = encrypted_part_forward_batch(params, xb);
    let a3 = (q.dot(&pt.w3.t()) + &pt.b3).mapv(|v| v.max(0.0));
    let probs = (a3.dot(&pt.w4.t()) + &pt.b4).mapv(sigmoid);
    bce_loss(&probs, yb)
}

fn bce_loss(probs: &Array2<f64>, yb: &Array2<f64>) -> f64 {
    let m = probs.nrows() as f64;
    let mut loss = 0.0;
    for (p, y) in probs.iter().zip(yb.iter()) {
        let p = p.clamp(1e-12, 1.0 - 1e-12);
        loss -= y * p.ln() + (1.0 - y) * (1.0 - p).ln();
    }
    loss / m
}

struct Momentum {
    p: Array2<f64>,
    w2: Array2<f64>,
    w3: Array2<f64>,
    b3: Array1<f64>,
    w4: Array2<f64>,
    b4: Array1<f64>,
}

impl Momentum {
    fn zeros(params: &QuadNetParams) -> Momentum {
        Momentum {
            p: Array2::zeros(params.p.raw_dim()),
            w2: Array2::zeros(params.w2.raw_dim()),
            w3: Array2::zeros(params.plaintext.w3.raw_dim()),
            b3: Array1::zeros(params.plaintext.b3.raw_dim()),
            w4: Array2::zeros(params.plaintext.w4.raw_dim()),
            b4: Array1::zeros(params.plaintext.b4.raw_dim()),
        }
    }
}

macro_rules! sgd_step {
    ($vel:expr, $param:expr, $grad:expr, $cfg:expr) => {
        $vel.mapv_inplace(|v| v * $cfg.momentum);
        $vel.scaled_add(-$cfg.learning_rate, &$grad);
        $param.scaled_add(1.0, &$vel);
    };
}

/// Trains a fresh network on the split's training partition.
///
/// Deterministic under `cfg.seed`: initialization and batch order both
/// derive from it. Zero epochs returns the seeded initialization unchanged.
pub fn train(split: &DatasetSplit, cfg: &TrainConfig) -> Result<TrainedModel, QuadNetError> {
    assert!(!split.train.is_empty(), "training partition is empty");
    assert!(cfg.batch_size > 0 && cfg.learning_rate > 0.0, "config values must be positive");
    let n = split.train[0].0.counts.len();
    let mut params = QuadNetParams::init(n, cfg.d, cfg.t, cfg.seed);
    let (x, y) = design_matrix(&split.train);
    let losses = sgd_loop(cfg, &x, &y, &mut params)?;
    Ok(TrainedModel { params, epoch_losses: losses })
}

fn sgd_loop(
    cfg: &TrainConfig,
    x: &Array2<f64>,
    y: &Array2<f64>,
    params: &mut QuadNetParams,
) -> Result<Vec<f64>, QuadNetError> {
    let mut velocity = Momentum::zeros(params);
    let mut order: Vec<usize> = (0..x.nrows()).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1));
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let xb = x.select(Axis(0), chunk);
            let yb = y.select(Axis(0), chunk);
            let (loss, grads) = forward_backward(params, &xb, &yb);
            epoch_loss += loss * chunk.len() as f64;
            sgd_step!(velocity.p, params.p, grads.p, cfg);
            sgd_step!(velocity.w2, params.w2, grads.w2, cfg);
            sgd_step!(velocity.w3, params.plaintext.w3, grads.w3, cfg);
            sgd_step!(velocity.b3, params.plaintext.b3, grads.b3, cfg);
            sgd_step!(velocity.w4, params.plaintext.w4, grads.w4, cfg);
            sgd_step!(velocity.b4, params.plaintext.b4, grads.b4, cfg);
        }
        epoch_loss /= x.nrows() as f64;
        if !epoch_loss.is_finite() {
            return Err(QuadNetError::Divergence { epoch, loss: epoch_loss });
        }
        epoch_losses.push(epoch_loss);
    }
    Ok(epoch_losses)
}

/// Retrains only the plaintext part against the quantized encrypted part's
/// dequantized outputs, leaving P and W2 untouched. Returns per-epoch loss.
pub fn retrain_plaintext_part(
    params: &mut QuadNetParams,
    qp: &QuantizedEncryptedPart,
    train_set: &[(FeatureVector, Label)],
    cfg: &TrainConfig,
) -> Result<Vec<f64>, QuadNetError> {
    assert!(!train_set.is_empty(), "training partition is empty");
    let factor = qp.scale_p * qp.scale_p * qp.scale_w2;
    let t = qp.w2_q.nrows();
    let mut q = Array2::zeros((train_set.len(), t));
    let mut y = Array2::zeros((train_set.len(), 2));
    for (row, (fv, label)) in train_set.iter().enumerate() {
        let q_int = crate::forward::forward_encryptedpart_int(fv, qp)?;
        for (j, &v) in q_int.iter().enumerate() {
            q[(row, j)] = v as f64 * factor;
        }
        y[(row, label.index())] = 1.0;
    }

    let mut vel_w3 = Array2::zeros(params.plaintext.w3.raw_dim());
    let mut vel_b3 = Array1::zeros(params.plaintext.b3.raw_dim());
    let mut vel_w4 = Array2::zeros(params.plaintext.w4.raw_dim());
    let mut vel_b4 = Array1::zeros(params.plaintext.b4.raw_dim());
    let mut order: Vec<usize> = (0..q.nrows()).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(2));
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let qb = q.select(Axis(0), chunk);
            let yb = y.select(Axis(0), chunk);
            let m = qb.nrows() as f64;
            let pt = &params.plaintext;
            let pre3 = qb.dot(&pt.w3.t()) + &pt.b3;
            let a3 = pre3.mapv(|v| v.max(0.0));
            let probs = (a3.dot(&pt.w4.t()) + &pt.b4).mapv(sigmoid);
            epoch_loss += bce_loss(&probs, &yb) * m;

            let dz = (&probs - &yb) / m;
            let dw4 = dz.t().dot(&a3);
            let db4 = dz.sum_axis(Axis(0));
            let da3 = dz.dot(&pt.w4);
            let mask = pre3.mapv(|v| if v > 0.0 { 1.0 } else { 0.0 });
            let dpre3 = da3 * &mask;
            let dw3 = dpre3.t().dot(&qb);
            let db3 = dpre3.sum_axis(Axis(0));
            sgd_step!(vel_w3, params.plaintext.w3, dw3, cfg);
            sgd_step!(vel_b3, params.plaintext.b3, db3, cfg);
            sgd_step!(vel_w4, params.plaintext.w4, dw4, cfg);
            sgd_step!(vel_b4, params.plaintext.b4, db4, cfg);
        }
        epoch_loss /= q.nrows() as f64;
        if !epoch_loss.is_finite() {
            return Err(QuadNetError::Divergence { epoch, loss: epoch_loss });
        }
        epoch_losses.push(epoch_loss);
    }
    Ok(epoch_losses)
}
