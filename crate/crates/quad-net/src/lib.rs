//! Partially encrypted quadratic network.
//!
//! The model splits into an encrypted part that a server can evaluate under
//! functional encryption, Dense(n+1, d) followed by an elementwise square
//! and a bias-free Dense(d, t), and a plaintext part, Dense(t, 10) with
//! ReLU into Dense(10, 2) with sigmoid outputs. Training runs entirely on
//! plaintext data; the encrypted part is post-training quantized to small
//! integers so its outputs can be recovered by discrete logarithms.

pub mod error;
pub mod forward;
pub mod grad_check;
pub mod model_io;
pub mod params;
pub mod quantize;
pub mod train;

pub use error::QuadNetError;
pub use forward::{
    forward_encryptedpart_int, forward_float, predict_from_intermediate, Prediction,
};
pub use params::{PlaintextPart, QuadNetParams};
pub use quantize::{quantize, QuantizedEncryptedPart};
pub use train::{train, retrain_plaintext_part, TrainConfig, TrainedModel};
