//! Post-training quantization of the encrypted part.

use ndarray::Array2;

use crate::params::QuadNetParams;

/// Integer form of the encrypted part plus dequantization scales.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedEncryptedPart {
    pub p_q: Array2<i32>,
    pub w2_q: Array2<i32>,
    pub scale_p: f64,
    pub scale_w2: f64,
    pub bit_width: u8,
}

impl QuantizedEncryptedPart {
    /// Largest representable magnitude for the configured bit width.
    pub fn max_level(bit_width: u8) -> i32 {
        (1 << (bit_width - 1)) - 1
    }
}

/// Symmetric per-matrix quantization with round-half-away-from-zero.
///
/// scale = max|w| / (2^(bit_width-1) - 1); all-zero matrices quantize to
/// zeros with scale 1. Only the encrypted part is quantized; the plaintext
/// part stays float.
pub fn quantize(params: &QuadNetParams, bit_width: u8) -> QuantizedEncryptedPart {
    assert!(bit_width == 4 || bit_width == 8, "supported bit widths are 4 and 8");
    let levels = QuantizedEncryptedPart::max_level(bit_width) as f64;
    let (p_q, scale_p) = quantize_matrix(&params.p, levels);
    let (w2_q, scale_w2) = quantize_matrix(&params.w2, levels);
    QuantizedEncryptedPart { p_q, w2_q, scale_p, scale_w2, bit_width }
}

fn quantize_matrix(m: &Array2<f64>, levels: f64) -> (Array2<i32>, f64) {
    let max_abs = m.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    if max_abs == 0.0 {
        return (Array2::zeros(m.raw_dim()), 1.0);
    }
    let scale = max_abs / levels;
    let q = m.mapv(|v| (v / scale).round() as i32);
    (q, scale)
}
