//! Finite-difference validation of the analytic gradients.

use ndarray::Array2;
use text_pipeline::types::FeatureVector;

use crate::params::QuadNetParams;
use crate::train::{batch_loss, forward_backward};

/// Central-difference step.
pub const DEFAULT_EPSILON: f64 = 1e-4;

/// Compares analytic gradients against central finite differences on a
/// small batch with soft targets, returning the maximum relative error over
/// every parameter of every layer.
///
/// Relative error uses a floored denominator, |a - n| / max(|a|, |n|, 1e-3),
/// so near-zero gradients compare by absolute error.
pub fn gradient_check(
    params: &QuadNetParams,
    batch: &[(FeatureVector, [f64; 2])],
    epsilon: f64,
) -> f64 {
    assert!(!batch.is_empty(), "gradient check needs at least one example");
    let n = batch[0].0.counts.len();
    let mut xb = Array2::zeros((batch.len(), n + 1));
    let mut yb = Array2::zeros((batch.len(), 2));
    for (row, (fv, target)) in batch.iter().enumerate() {
        xb[(row, 0)] = 1.0;
        for (i, &c) in fv.counts.iter().enumerate() {
            xb[(row, i + 1)] = c as f64;
        }
        yb[(row, 0)] = target[0];
        yb[(row, 1)] = target[1];
    }

    let (_, grads) = forward_backward(params, &xb, &yb);
    let analytic = [
        grads.p.iter().copied().collect::<Vec<f64>>(),
        grads.w2.iter().copied().collect(),
        grads.w3.iter().copied().collect(),
        grads.b3.iter().copied().collect(),
        grads.w4.iter().copied().collect(),
        grads.b4.iter().copied().collect(),
    ]
    .concat();

    let mut numeric = Vec::with_capacity(analytic.len());
    let mut scratch = params.clone();
    for which in 0..6 {
        let len = array_len(&scratch, which);
        for idx in 0..len {
            let original = get(&scratch, which, idx);
            set(&mut scratch, which, idx, original + epsilon);
            let plus = batch_loss(&scratch, &xb, &yb);
            set(&mut scratch, which, idx, original - epsilon);
            let minus = batch_loss(&scratch, &xb, &yb);
            set(&mut scratch, which, idx, original);
            numeric.push((plus - minus) / (2.0 * epsilon));
        }
    }

    analytic
        .iter()
        .zip(numeric.iter())
        .map(|(&a, &n)| (a - n).abs() / a.abs().max(n.abs()).max(1e-3))
        .fold(0.0, f64::max)
}

/// Analytic gradient magnitudes, exposed for the zero-loss sanity check.
pub fn max_analytic_gradient(
    params: &QuadNetParams,
    batch: &[(FeatureVector, [f64; 2])],
) -> f64 {
    let n = batch[0].0.counts.len();
    let mut xb = Array2::zeros((batch.len(), n + 1));
    let mut yb = Array2::zeros((batch.len(), 2));
    for (row, (fv, target)) in batch.iter().enumerate() {
        xb[(row, 0)] = 1.0;
        for (i, &c) in fv.counts.iter().enumerate() {
            xb[(row, i + 1)] = c as f64;
        }
        yb[(row, 0)] = target[0];
        yb[(row, 1)] = target[1];
    }
    let (_, grads) = forward_backward(params, &xb, &yb);
    [
        grads.p.iter().fold(0.0f64, |m, &v| m.max(v.abs())),
        grads.w2.iter().fold(0.0f64, |m, &v| m.max(v.abs())),
        grads.w3.iter().fold(0.0f64, |m, &v| m.max(v.abs())),
        grads.b3.iter().fold(0.0f64, |m, &v| m.max(v.abs())),
        grads.w4.iter().fold(0.0f64, |m, &v| m.max(v.abs())),
        grads.b4.iter().fold(0.0f64, |m, &v| m.max(v.abs())),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

fn array_len(p: &QuadNetParams, which: usize) -> usize {
    match which {
        0 => p.p.len(),
        1 => p.w2.len(),
        2 => p.plaintext.w3.len(),
        3 => p.plaintext.b3.len(),
        4 => p.plaintext.w4.len(),
        _ => p.plaintext.b4.len(),
    }
}

fn get(p: &QuadNetParams, which: usize, idx: usize) -> f64 {
    match which {
        0 => p.p.as_slice().expect("contiguous")[idx],
        1 => p.w2.as_slice().expect("contiguous")[idx],
        2 => p.plaintext.w3.as_slice().expect("contiguous")[idx],
        3 => p.plaintext.b3[idx],
        4 => p.plaintext.w4.as_slice().expect("contiguous")[idx],
        _ => p.plaintext.b4[idx],
    }
}

fn set(p: &mut QuadNetParams, which: usize, idx: usize, value: f64) {
    match which {
        0 => p.p.as_slice_mut().expect("contiguous")[idx] = value,
        1 => p.w2.as_slice_mut().expect("contiguous")[idx] = value,
        2 => p.plaintext.w3.as_slice_mut().expect("contiguous")[idx] = value,
        3 => p.plaintext.b3[idx] = value,
        4 => p.plaintext.w4.as_slice_mut().expect("contiguous")[idx] = value,
        _ => p.plaintext.b4[idx] = value,
    }
}
