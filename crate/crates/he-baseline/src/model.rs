//! Encrypted model container and the three-party scoring flow.
//!
//! The model owner fixes a fixed-point scale, encodes every coefficient as
//! round(w * 2^scale_bits) and encrypts the encodings. A client multiplies
//! the encrypted coefficients by its plaintext term counts and adds in the
//! encrypted bias, producing one ciphertext that only the owner can open.
//! The owner decodes the fixed-point score, applies the sigmoid and returns
//! the label. Scoring sees only public-key material, so emails can be scored
//! from many threads against one shared model.

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rand::RngCore;
use text_pipeline::{FeatureVector, Label};

use crate::error::HeError;
use crate::lr::{label_for_score, sigmoid, LRWeights};
use crate::paillier::{
    add, decrypt, encode_signed, encrypt, scalar_mul, AdditiveHEKeys, HePublicKey,
};

/// Smallest accepted fixed-point scale.
pub const MIN_SCALE_BITS: u32 = 16;
/// Largest accepted fixed-point scale.
pub const MAX_SCALE_BITS: u32 = 64;
/// Default fixed-point scale.
pub const DEFAULT_SCALE_BITS: u32 = 16;

/// Logistic-regression coefficients encrypted coefficient-wise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncryptedLRModel {
    pub n: usize,
    pub scale_bits: u32,
    pub key_bits: u64,
    pub enc_w: Vec<BigUint>,
    pub enc_b: BigUint,
}

/// Owner-side decryption result for one scored email.
#[derive(Debug, Clone, PartialEq)]
pub struct HePrediction {
    pub label: Label,
    pub score: f64,
    pub probability: f64,
}

fn encrypt_value(
    pk: &HePublicKey,
    value: f64,
    scale_bits: u32,
    rng: &mut impl RngCore,
) -> Result<BigUint, HeError> {
    if !value.is_finite() {
        return Err(HeError::EncodingOverflow {
            value: value.to_string(),
            capacity: pk.plaintext_capacity().to_string(),
        });
    }
    let encoded = encode_signed(pk, &encode_weight(value, scale_bits))?;
    encrypt(pk, &encoded, rng)
}

/// Fixed-point encoding of one coefficient at a scale of at most
/// [`MAX_SCALE_BITS`] bits.
pub fn encode_weight(value: f64, scale_bits: u32) -> BigInt {
    let scaled = (value * f64::powi(2.0, scale_bits as i32)).round();
    BigInt::from(scaled as i128)
}

/// Encrypts every coefficient of `weights` at the given scale.
pub fn encrypt_model(
    keys: &AdditiveHEKeys,
    weights: &LRWeights,
    scale_bits: u32,
    rng: &mut impl RngCore,
) -> Result<EncryptedLRModel, HeError> {
    if scale_bits < MIN_SCALE_BITS {
        return Err(HeError::ScaleTooSmall {
            scale_bits,
            min: MIN_SCALE_BITS,
        });
    }
    if scale_bits > MAX_SCALE_BITS {
        return Err(HeError::EncodingOverflow {
            value: format!("scale of {scale_bits} bits"),
            capacity: format!("{MAX_SCALE_BITS} bits"),
        });
    }
    let pk = &keys.public;
    let mut enc_w = Vec::with_capacity(weights.w.len());
    for &value in &weights.w {
        enc_w.push(encrypt_value(pk, value, scale_bits, rng)?);
    }
    let enc_b = encrypt_value(pk, weights.b, scale_bits, rng)?;
    Ok(EncryptedLRModel {
        n: weights.w.len(),
        scale_bits,
        key_bits: pk.key_bits,
        enc_w,
        enc_b,
    })
}

/// Client-side scoring: Enc(sum w_i x_i + b) from plaintext counts.
///
/// Zero counts contribute nothing and are skipped, so the cost scales with
/// the number of distinct terms actually present in the email.
pub fn client_score(
    pk: &HePublicKey,
    model: &EncryptedLRModel,
    x: &FeatureVector,
) -> Result<BigUint, HeError> {
    if x.len() != model.n {
        return Err(HeError::DimensionMismatch {
            expected: model.n,
            found: x.len(),
        });
    }
    let mut acc = model.enc_b.clone();
    for (enc_w, &count) in model.enc_w.iter().zip(&x.counts) {
        if count == 0 {
            continue;
        }
        let term = scalar_mul(pk, enc_w, i64::from(count))?;
        acc = add(pk, &acc, &term)?;
    }
    Ok(acc)
}

/// Owner-side decryption: decode the fixed-point score and threshold it.
pub fn owner_decrypt_and_predict(
    keys: &AdditiveHEKeys,
    enc_score: &BigUint,
    scale_bits: u32,
) -> Result<HePrediction, HeError> {
    let decoded = crate::paillier::decode_signed(&keys.public, &decrypt(keys, enc_score)?);
    let score = decoded.to_f64().ok_or_else(|| HeError::InvalidCiphertext {
        reason: "decrypted score does not fit a float".into(),
    })? / f64::powi(2.0, scale_bits as i32);
    Ok(HePrediction {
        label: label_for_score(score),
        score,
        probability: sigmoid(score),
    })
}
