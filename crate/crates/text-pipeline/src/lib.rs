//! Text preprocessing pipeline for the encrypted spam filter.
//!
//! Turns raw emails into fixed-length integer feature vectors:
//! tokenization and Porter stemming, vocabulary construction with
//! per-class document frequencies, information-gain feature selection,
//! count vectorization and stratified train/test splitting. Also ships
//! the plain-text artifact formats for corpora and vocabularies and a
//! deterministic synthetic corpus generator used by the benchmarks.

pub mod artifacts;
pub mod corpus;
pub mod error;
pub mod porter;
pub mod preprocess;
pub mod split;
pub mod synth;
pub mod types;
pub mod vocab;

pub use error::PipelineError;
pub use preprocess::{preprocess, render_tokens, MAX_TOKENS, MIN_TOKENS};
pub use split::split_stratified;
pub use types::{DatasetSplit, FeatureVector, Label, RawEmail, TokenizedEmail};
pub use vocab::{build_vocabulary, vectorize, Vocabulary};
