//! Functional encryption for quadratic forms over feature vectors.
//!
//! Setup fixes the vector length and input range and produces master key
//! material. Anyone holding the public key can encrypt a feature vector;
//! the holder of the master secret derives one functional key per output
//! row of a factored quadratic form. Decrypting a ciphertext with such a
//! key reveals exactly that output value and nothing else about the vector.
//!
//! Values are recovered from the pairing target group by a bounded
//! baby-step giant-step search, so every functional key carries a certified
//! bound on its output, computed from the form's integer weights and the
//! input range fixed at setup.
//!
//! Two backends share the interface: the pairing backend over BLS12-381,
//! and a sealed-evaluation backend that skips group arithmetic entirely for
//! fast pipeline testing.

mod api;
mod dlog;
mod error;
mod form;
mod group;
mod keys;
mod oracle;
mod serial;
mod sgp;

pub use api::{
    decrypt_all, decrypt_eval, derive_key, derive_keys, encode_value, encrypt, setup,
    DecryptionResult, Evaluation,
};
pub use dlog::{dlog_recover, dlog_recover_timed, precompute_table, DlogTable, TABLE_SCALE};
pub use error::FeError;
pub use form::{IntMatrix, QuadraticForm};
pub use group::{
    Backend, CurveId, GroupParams, DEFAULT_DLOG_CAPACITY, DEFAULT_TABLE_DISK_BUDGET,
};
pub use keys::{CiphertextVec, EvalOutput, FunctionalKey, MasterKeys, PublicKey, SecretKey};
pub use serial::{
    decode_ciphertext, decode_functional_key, decode_public_key, decode_secret_key, decode_table,
    encode_ciphertext, encode_functional_key, encode_public_key, encode_secret_key, encode_table,
    table_encoded_size,
};
