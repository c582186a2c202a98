//! Leakage measurement and the collateral-learning defense.
//!
//! The partially encrypted network decrypts its quadratic layer's output
//! before the plaintext tail runs, and that t-vector can carry more than
//! the public task needs. This crate quantifies the leak and counters it:
//!
//! - [`make_private_labels`] defines what the adversary tries to infer,
//!   either presence of a high-information-gain word or the planted
//!   category of the synthetic dual-label corpus from [`synth_dual`].
//! - [`train_adversary`] fits a dense head on the frozen encrypted part's
//!   outputs and reports how well the private label can be read off.
//! - [`collateral_train`] retrains the encrypted part to keep the public
//!   task while ascending the frozen adversary's loss, and [`run_defense`]
//!   alternates that with adversary refits until no fresh head recovers
//!   the private signal.
//! - [`recovery_eval`] measures what a fresh adversary can still learn
//!   afterwards, and [`alpha_sweep`] maps the trade-off curve.

pub mod collateral;
pub mod error;
pub mod heads;
pub mod labels;
pub mod sweep;
pub mod synth_dual;

pub use collateral::{
    collateral_gradients, collateral_loss, collateral_train, encrypted_part_bytes,
    encrypted_part_digest, recovery_eval, run_defense, train_adversary, CollateralConfig,
    CollateralOutcome, DefenseConfig, DefenseOutcome, EpochStats, RecoveryReport, RoundStats,
};
pub use error::LeakError;
pub use heads::{holdout_split, train_and_eval, train_head, Head, HeadConfig, Standardizer};
pub use labels::{
    majority_rate, make_private_labels, rank_by_information_gain, PrivateLabeling, PrivateScheme,
};
pub use sweep::{
    alpha_sweep, read_sweep_table, write_manifest, write_sweep_table, SweepConfig, SweepReport,
    SweepRow,
};
pub use synth_dual::{
    generate_dual, mutual_information_bits, private_class_of, private_marker_pool,
    public_marker_pool, DualLabelConfig, DualLabelCorpus,
};
