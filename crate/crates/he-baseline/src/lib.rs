//! Additively homomorphic logistic-regression baseline.
//!
//! The model owner trains a logistic regression on plaintext emails, then
//! encrypts the coefficients under a Paillier key pair. A client scores its
//! own plaintext email against the encrypted coefficients, which yields an
//! encrypted score that only the owner can decrypt. The owner returns the
//! thresholded label, so neither side sees the other's data: the client
//! never learns the weights and the owner never sees the email.
//!
//! The crate covers key generation, training, fixed-point encoding,
//! encrypted scoring, the encrypted-model file format and a timing harness
//! for the full round trip.

mod bench;
mod error;
mod lr;
mod model;
mod paillier;
mod serial;

pub use bench::{affine_r_squared, bench_roundtrip, HeBenchRow};
pub use error::HeError;
pub use lr::{
    accuracy, label_for_score, predict, score, sigmoid, train_lr, LRTrainConfig, LRWeights,
};
pub use model::{
    client_score, encode_weight, encrypt_model, owner_decrypt_and_predict, EncryptedLRModel,
    HePrediction, DEFAULT_SCALE_BITS, MAX_SCALE_BITS, MIN_SCALE_BITS,
};
pub use paillier::{
    add, decode_signed, decrypt, encode_signed, encrypt, keygen, scalar_mul, AdditiveHEKeys,
    HePrivateKey, HePublicKey, REAL_KEY_BITS, TEST_KEY_BITS,
};
pub use serial::{decode_model, encode_model, load_model, save_model};
