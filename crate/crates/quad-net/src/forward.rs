//! Forward passes: float path, exact integer encrypted-part path, and the
//! recipient-side tail that turns intermediate outputs into a label.

use ndarray::Array1;
use text_pipeline::types::{FeatureVector, Label};

use crate::error::QuadNetError;
use crate::params::QuadNetParams;
use crate::quantize::QuantizedEncryptedPart;

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: Label,
    pub probs: [f64; 2],
}

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Builds x-tilde = (1, x_1, ..., x_n).
fn with_bias(x: &FeatureVector) -> Array1<f64> {
    let mut xt = Array1::zeros(x.counts.len() + 1);
    xt[0] = 1.0;
    for (i, &c) in x.counts.iter().enumerate() {
        xt[i + 1] = c as f64;
    }
    xt
}

/// Float evaluation of the whole network.
///
/// h = P x-tilde, q_j = sum_k W2[j,k] h_k^2, then the plaintext part.
pub fn forward_float(x: &FeatureVector, params: &QuadNetParams) -> Result<Prediction, QuadNetError> {
    if x.counts.len() != params.n() {
        return Err(QuadNetError::shape(
            "forward_float input",
            format!("{} features", params.n()),
            format!("{} features", x.counts.len()),
        ));
    }
    params.check_shapes()?;
    let xt = with_bias(x);
    let h = params.p.dot(&xt);
    let hh = h.mapv(|v| v * v);
    let q = params.w2.dot(&hh);
    Ok(apply_plaintext_part(q.as_slice().expect("contiguous"), params))
}

/// Exact integer evaluation of the quantized encrypted part.
///
/// This is the reference the FE decryption path must match bit for bit.
/// All accumulation is checked 128-bit arithmetic; admissible inputs
/// (n <= 5000, counts <= 100, 8-bit weights) stay far below the overflow
/// boundary: |h_k| <= 127 * 5001 * 100 < 2^27, so |q_j| < 40 * 127 * 2^54 <
/// 2^67.
pub fn forward_encryptedpart_int(
    x: &FeatureVector,
    qp: &QuantizedEncryptedPart,
) -> Result<Vec<i128>, QuadNetError> {
    if x.counts.len() + 1 != qp.p_q.ncols() {
        return Err(QuadNetError::shape(
            "forward_encryptedpart_int input",
            format!("{} features", qp.p_q.ncols() - 1),
            format!("{} features", x.counts.len()),
        ));
    }
    let d = qp.p_q.nrows();
    let mut h = vec![0i128; d];
    for (k, h_k) in h.iter_mut().enumerate() {
        let row = qp.p_q.row(k);
        let mut acc: i128 = row[0] as i128;
        for (i, &c) in x.counts.iter().enumerate() {
            let term = (row[i + 1] as i128)
                .checked_mul(c as i128)
                .ok_or(QuadNetError::Overflow)?;
            acc = acc.checked_add(term).ok_or(QuadNetError::Overflow)?;
        }
        *h_k = acc;
    }
    let mut q = vec![0i128; qp.w2_q.nrows()];
    for (j, q_j) in q.iter_mut().enumerate() {
        let row = qp.w2_q.row(j);
        let mut acc: i128 = 0;
        for (k, &h_k) in h.iter().enumerate() {
            let sq = h_k.checked_mul(h_k).ok_or(QuadNetError::Overflow)?;
            let term = (row[k] as i128).checked_mul(sq).ok_or(QuadNetError::Overflow)?;
            acc = acc.checked_add(term).ok_or(QuadNetError::Overflow)?;
        }
        *q_j = acc;
    }
    Ok(q)
}

/// Recipient-side tail: dequantize the integer intermediate vector and run
/// the plaintext part. Ties in the output argmax resolve to ham.
pub fn predict_from_intermediate(
    q_int: &[i128],
    scales: (f64, f64),
    params: &QuadNetParams,
) -> Result<Prediction, QuadNetError> {
    if q_int.len() != params.t() {
        return Err(QuadNetError::shape(
            "predict_from_intermediate input",
            format!("{} outputs", params.t()),
            format!("{} outputs", q_int.len()),
        ));
    }
    let (scale_p, scale_w2) = scales;
    let factor = scale_p * scale_p * scale_w2;
    let q: Vec<f64> = q_int.iter().map(|&v| v as f64 * factor).collect();
    Ok(apply_plaintext_part(&q, params))
}

/// Runs the plaintext part on an intermediate vector q.
pub fn apply_plaintext_part(q: &[f64], params: &QuadNetParams) -> Prediction {
    let q = Array1::from_vec(q.to_vec());
    let pt = &params.plaintext;
    let a3 = (pt.w3.dot(&q) + &pt.b3).mapv(|v| v.max(0.0));
    let z = pt.w4.dot(&a3) + &pt.b4;
    let probs = [sigmoid(z[0]), sigmoid(z[1])];
    let label = if probs[1] > probs[0] { Label::Spam } else { Label::Ham };
    Prediction { label, probs }
}
