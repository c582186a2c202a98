//! Dense classifier heads over the encrypted part's output vector.
//!
//! Both the adversary and the retrainable public head are small
//! fully-connected ReLU networks ending in softmax cross-entropy. A head
//! owns an optional input standardizer fitted on its training rows; the
//! standardizer counts as head state, so freezing a head freezes it too.

use ndarray::{Array1, Array2, Axis};
use rand::distributions::{Distribution, Uniform};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use quad_net::params::{PlaintextPart, OUTPUTS, PLAINTEXT_HIDDEN};
use sha2::{Digest, Sha256};

use crate::error::{dimension, LeakError};

/// Per-column affine normalization fitted on training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    mean: Array1<f64>,
    /// Standard deviation floored at 1e-8 so constant columns stay finite.
    std: Array1<f64>,
}

impl Standardizer {
    pub fn fit(x: &Array2<f64>) -> Standardizer {
        let n = x.nrows().max(1) as f64;
        let mean = x.sum_axis(Axis(0)) / n;
        let mut var: Array1<f64> = Array1::zeros(x.ncols());
        for row in x.rows() {
            let centered = &row - &mean;
            var = var + centered.mapv(|v| v * v);
        }
        let std = (var / n).mapv(|v| v.sqrt().max(1e-8));
        Standardizer { mean, std }
    }

    pub fn apply(&self, x: &Array2<f64>) -> Array2<f64> {
        (x - &self.mean) / &self.std
    }
}

/// Training hyperparameters for one head.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadConfig {
    pub hidden: Vec<usize>,
    pub classes: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    /// Fraction of rows held out for evaluation, in (0, 1).
    pub holdout: f64,
    pub standardize: bool,
    pub seed: u64,
}

impl HeadConfig {
    /// The adversary: two hidden layers (32, 16) with ReLU.
    pub fn adversary(classes: usize, seed: u64) -> HeadConfig {
        HeadConfig {
            hidden: vec![32, 16],
            classes,
            epochs: 80,
            learning_rate: 0.05,
            batch_size: 32,
            holdout: 0.25,
            standardize: true,
            seed,
        }
    }

    /// A public head shaped like the plaintext part: one hidden layer of
    /// width 10 over two output classes.
    pub fn public_clone(seed: u64) -> HeadConfig {
        HeadConfig {
            hidden: vec![PLAINTEXT_HIDDEN],
            classes: OUTPUTS,
            epochs: 80,
            learning_rate: 0.05,
            batch_size: 32,
            holdout: 0.25,
            standardize: true,
            seed,
        }
    }
}

/// A fully-connected ReLU network with softmax cross-entropy outputs.
/// Weight matrix `l` is out-by-in; biases match the out side.
#[derive(Debug, Clone, PartialEq)]
pub struct Head {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
    pub scaler: Option<Standardizer>,
}

impl Head {
    /// Seeded uniform initialization over plus/minus 1/sqrt(fan_in).
    pub fn init(input: usize, hidden: &[usize], classes: usize, seed: u64) -> Head {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut widths = vec![input];
        widths.extend_from_slice(hidden);
        widths.push(classes);
        let mut weights = Vec::with_capacity(widths.len() - 1);
        let mut biases = Vec::with_capacity(widths.len() - 1);
        for pair in widths.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let bound = 1.0 / (fan_in as f64).sqrt();
            let dist = Uniform::new_inclusive(-bound, bound);
            weights.push(Array2::from_shape_fn((fan_out, fan_in), |_| dist.sample(&mut rng)));
            biases.push(Array1::zeros(fan_out));
        }
        Head { weights, biases, scaler: None }
    }

    /// A head carrying the plaintext part's weights verbatim.
    pub fn clone_of_plaintext(part: &PlaintextPart) -> Head {
        Head {
            weights: vec![part.w3.clone(), part.w4.clone()],
            biases: vec![part.b3.clone(), part.b4.clone()],
            scaler: None,
        }
    }

    pub fn input_width(&self) -> usize {
        self.weights[0].ncols()
    }

    pub fn classes(&self) -> usize {
        self.weights.last().unwrap().nrows()
    }

    /// Raw class scores for a batch, one row per input row.
    pub fn logits(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut a = match &self.scaler {
            Some(s) => s.apply(x),
            None => x.clone(),
        };
        let last = self.weights.len() - 1;
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let z = a.dot(&w.t()) + b;
            a = if l < last { z.mapv(relu) } else { z };
        }
        a
    }

    /// Mean cross-entropy of `labels` under the head's softmax outputs.
    pub fn loss(&self, x: &Array2<f64>, labels: &[usize]) -> Result<f64, LeakError> {
        self.loss_and_input_grad(x, labels).map(|(l, _)| l)
    }

    /// Loss plus its gradient with respect to the raw (pre-standardizer)
    /// inputs, which is what collateral training backpropagates into the
    /// encrypted part.
    pub fn loss_and_input_grad(
        &self,
        x: &Array2<f64>,
        labels: &[usize],
    ) -> Result<(f64, Array2<f64>), LeakError> {
        let (loss, _, _, dx) = self.backward(x, labels)?;
        Ok((loss, dx))
    }

    /// Full backward pass: loss, weight gradients, bias gradients, and the
    /// gradient at the raw inputs.
    #[allow(clippy::type_complexity)]
    pub(crate) fn backward(
        &self,
        x: &Array2<f64>,
        labels: &[usize],
    ) -> Result<(f64, Vec<Array2<f64>>, Vec<Array1<f64>>, Array2<f64>), LeakError> {
        self.check_batch(x, labels)?;
        let a0 = match &self.scaler {
            Some(s) => s.apply(x),
            None => x.clone(),
        };
        let last = self.weights.len() - 1;
        let mut activations = vec![a0];
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let z = activations[l].dot(&w.t()) + b;
            let a = if l < last { z.mapv(relu) } else { z };
            activations.push(a);
        }

        let logits = activations.last().unwrap();
        let probs = softmax_rows(logits);
        let batch = x.nrows() as f64;
        let mut loss = 0.0;
        let mut delta = probs;
        for (row, &label) in labels.iter().enumerate() {
            let p = delta[(row, label)];
            let clamped = if p.is_nan() { f64::NAN } else { p.max(1e-300) };
            loss -= clamped.ln();
            delta[(row, label)] -= 1.0;
        }
        loss /= batch;
        delta /= batch;

        let mut d_weights = vec![Array2::zeros((0, 0)); self.weights.len()];
        let mut d_biases = vec![Array1::zeros(0); self.weights.len()];
        for l in (0..self.weights.len()).rev() {
            d_weights[l] = delta.t().dot(&activations[l]);
            d_biases[l] = delta.sum_axis(Axis(0));
            delta = delta.dot(&self.weights[l]);
            if l > 0 {
                delta = delta * activations[l].mapv(|v| if v > 0.0 { 1.0 } else { 0.0 });
            }
        }
        let dx = match &self.scaler {
            Some(s) => delta / &s.std,
            None => delta,
        };
        Ok((loss, d_weights, d_biases, dx))
    }

    pub fn predict(&self, x: &Array2<f64>) -> Vec<usize> {
        self.logits(x)
            .rows()
            .into_iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .map(|(i, _)| i)
                    .unwrap()
            })
            .collect()
    }

    pub fn accuracy(&self, x: &Array2<f64>, labels: &[usize]) -> f64 {
        if labels.is_empty() {
            return 0.0;
        }
        let hits = self
            .predict(x)
            .iter()
            .zip(labels)
            .filter(|(p, l)| p == l)
            .count();
        hits as f64 / labels.len() as f64
    }

    /// Concatenated parameter bytes, standardizer included.
    pub fn param_bytes(&self) -> Vec<u8> {
        let mut bytes = Vec::new();
        for w in &self.weights {
            for &v in w.iter() {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
        }
        for b in &self.biases {
            for &v in b.iter() {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
        }
        if let Some(s) = &self.scaler {
            for v in s.mean.iter().chain(s.std.iter()) {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
        }
        bytes
    }

    /// SHA-256 of [`Head::param_bytes`], the freeze-integrity witness.
    pub fn digest(&self) -> String {
        quad_net::train::hex(&Sha256::digest(self.param_bytes()))
    }

    fn check_batch(&self, x: &Array2<f64>, labels: &[usize]) -> Result<(), LeakError> {
        if x.ncols() != self.input_width() {
            return Err(dimension("head input width", self.input_width(), x.ncols()));
        }
        if labels.len() != x.nrows() {
            return Err(dimension("head label count", x.nrows(), labels.len()));
        }
        let classes = self.classes();
        if let Some(&bad) = labels.iter().find(|&&l| l >= classes) {
            return Err(dimension("head class index", classes, bad));
        }
        Ok(())
    }
}

/// ReLU that lets non-finite values through instead of masking them, so a
/// diverged upstream computation surfaces as a non-finite loss.
fn relu(v: f64) -> f64 {
    if v > 0.0 || v.is_nan() {
        v
    } else {
        0.0
    }
}

fn softmax_rows(logits: &Array2<f64>) -> Array2<f64> {
    let mut out = logits.clone();
    for mut row in out.rows_mut() {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
    out
}

/// Minibatch SGD on the head's own parameters.
pub fn train_head(
    head: &mut Head,
    x: &Array2<f64>,
    labels: &[usize],
    cfg: &HeadConfig,
) -> Result<(), LeakError> {
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let mut order: Vec<usize> = (0..x.nrows()).collect();
    let batch = cfg.batch_size.max(1);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(batch) {
            let xb = x.select(Axis(0), chunk);
            let yb: Vec<usize> = chunk.iter().map(|&i| labels[i]).collect();
            let (loss, dw, db, _) = head.backward(&xb, &yb)?;
            if !loss.is_finite() {
                return Err(LeakError::Divergence { epoch, loss });
            }
            for (w, g) in head.weights.iter_mut().zip(&dw) {
                *w -= &(cfg.learning_rate * g);
            }
            for (b, g) in head.biases.iter_mut().zip(&db) {
                *b -= &(cfg.learning_rate * g);
            }
        }
    }
    Ok(())
}

/// Shuffled train/held-out row split. Both sides are non-empty whenever the
/// input has at least two rows.
pub fn holdout_split(rows: usize, holdout: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..rows).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(seed.wrapping_add(2));
    order.shuffle(&mut rng);
    let mut held = ((rows as f64) * holdout).round() as usize;
    held = held.clamp(usize::from(rows >= 2), rows.saturating_sub(1));
    let eval = order.split_off(rows - held);
    (order, eval)
}

/// Trains a fresh head on a shuffled split of the rows and reports held-out
/// accuracy.
pub fn train_and_eval(
    x: &Array2<f64>,
    labels: &[usize],
    cfg: &HeadConfig,
) -> Result<(Head, f64), LeakError> {
    if labels.len() != x.nrows() {
        return Err(dimension("training label count", x.nrows(), labels.len()));
    }
    let (train_rows, eval_rows) = holdout_split(x.nrows(), cfg.holdout, cfg.seed);
    let x_train = x.select(Axis(0), &train_rows);
    let y_train: Vec<usize> = train_rows.iter().map(|&i| labels[i]).collect();
    let mut head = Head::init(x.ncols(), &cfg.hidden, cfg.classes, cfg.seed);
    if cfg.standardize {
        head.scaler = Some(Standardizer::fit(&x_train));
    }
    train_head(&mut head, &x_train, &y_train, cfg)?;
    let x_eval = x.select(Axis(0), &eval_rows);
    let y_eval: Vec<usize> = eval_rows.iter().map(|&i| labels[i]).collect();
    let acc = head.accuracy(&x_eval, &y_eval);
    Ok((head, acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn softmax_rows_are_distributions() {
        let probs = softmax_rows(&array![[1.0, 2.0, 3.0], [1000.0, 1000.0, 0.0]]);
        for row in probs.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-12);
            assert!(row.iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn head_learns_a_linearly_separable_task() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let dist = Uniform::new(-1.0, 1.0);
        let x = Array2::from_shape_fn((200, 4), |_| dist.sample(&mut rng));
        let labels: Vec<usize> = x
            .rows()
            .into_iter()
            .map(|r| usize::from(r[0] + r[1] > 0.0))
            .collect();
        let cfg = HeadConfig::adversary(2, 9);
        let (_, acc) = train_and_eval(&x, &labels, &cfg).unwrap();
        assert!(acc > 0.9, "held-out accuracy {acc}");
    }

    #[test]
    fn weight_gradients_match_finite_differences() {
        let x = array![[0.4, -1.2, 0.7], [2.0, 0.1, -0.3], [-0.5, 0.9, 1.1]];
        let labels = [0usize, 1, 0];
        let mut head = Head::init(3, &[5], 2, 21);
        head.scaler = Some(Standardizer::fit(&x));
        let (_, dw, db, dx) = head.backward(&x, &labels).unwrap();

        let eps = 1e-6;
        for (l, coord, expected) in [
            (0usize, (2usize, 1usize), dw[0][(2, 1)]),
            (1, (1, 3), dw[1][(1, 3)]),
        ] {
            let mut plus = head.clone();
            plus.weights[l][coord] += eps;
            let mut minus = head.clone();
            minus.weights[l][coord] -= eps;
            let numeric =
                (plus.loss(&x, &labels).unwrap() - minus.loss(&x, &labels).unwrap()) / (2.0 * eps);
            assert!((numeric - expected).abs() < 1e-6, "weight grad {l} {coord:?}");
        }
        {
            let mut plus = head.clone();
            plus.biases[0][2] += eps;
            let mut minus = head.clone();
            minus.biases[0][2] -= eps;
            let numeric =
                (plus.loss(&x, &labels).unwrap() - minus.loss(&x, &labels).unwrap()) / (2.0 * eps);
            assert!((numeric - db[0][2]).abs() < 1e-6, "bias grad");
        }
        {
            let mut xp = x.clone();
            xp[(1, 2)] += eps;
            let mut xm = x.clone();
            xm[(1, 2)] -= eps;
            let numeric =
                (head.loss(&xp, &labels).unwrap() - head.loss(&xm, &labels).unwrap()) / (2.0 * eps);
            assert!((numeric - dx[(1, 2)]).abs() < 1e-6, "input grad");
        }
    }

    #[test]
    fn plaintext_clone_matches_the_source_shapes() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let part = PlaintextPart::init(20, &mut rng);
        let head = Head::clone_of_plaintext(&part);
        assert_eq!(head.input_width(), 20);
        assert_eq!(head.classes(), OUTPUTS);
        assert_eq!(head.weights[0], part.w3);
        assert_eq!(head.biases[1], part.b4);
    }

    #[test]
    fn dimension_mismatches_are_reported() {
        let head = Head::init(3, &[4], 2, 0);
        let x = array![[1.0, 2.0]];
        assert!(matches!(
            head.loss(&x, &[0]).unwrap_err(),
            LeakError::Dimension { context: "head input width", .. }
        ));
        let x3 = array![[1.0, 2.0, 3.0]];
        assert!(matches!(
            head.loss(&x3, &[5]).unwrap_err(),
            LeakError::Dimension { context: "head class index", .. }
        ));
    }

    #[test]
    fn holdout_split_partitions_the_rows() {
        let (train, eval) = holdout_split(10, 0.3, 4);
        assert_eq!(train.len() + eval.len(), 10);
        assert_eq!(eval.len(), 3);
        let mut all: Vec<usize> = train.iter().chain(&eval).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
    }
}
