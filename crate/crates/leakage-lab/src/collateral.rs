//! Adversary training and the collateral-learning defense.
//!
//! The defense retrains the encrypted part against two frozen heads at
//! once, descending the public loss while ascending the adversary's loss:
//! the training objective is L_pub minus alpha times L_pri. Freezing is
//! structural here: heads are borrowed immutably and their parameter
//! digests are asserted unchanged around every training op, as is the
//! plaintext part of the network.

use ndarray::{Array2, Axis};
use quad_net::params::QuadNetParams;
use quad_net::train::{encrypted_part_backward_batch, encrypted_part_forward_batch, hex};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::error::{dimension, LeakError};
use crate::heads::{train_and_eval, Head, HeadConfig};
use crate::labels::PrivateLabeling;

/// Hyperparameters for one collateral-training run. Heads are frozen
/// unconditionally; only the encrypted part (`p`, `w2`) trains.
#[derive(Debug, Clone, PartialEq)]
pub struct CollateralConfig {
    /// Weight of the negated adversary loss. Zero recovers plain public
    /// fine-tuning.
    pub alpha: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    /// Global L2 bound on the (dp, dw2) gradient pair per batch.
    pub clip_norm: f64,
    pub seed: u64,
}

impl Default for CollateralConfig {
    fn default() -> CollateralConfig {
        CollateralConfig {
            alpha: 1.0,
            epochs: 60,
            learning_rate: 0.02,
            batch_size: 32,
            clip_norm: 5.0,
            seed: 11,
        }
    }
}

/// Combined loss and its two components after one epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub loss: f64,
    pub l_pub: f64,
    pub l_pri: f64,
}

/// Result of a collateral-training run.
#[derive(Debug, Clone)]
pub struct CollateralOutcome {
    pub params: QuadNetParams,
    pub epochs: Vec<EpochStats>,
}

/// Held-out accuracies of freshly trained heads over a frozen encrypted part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryReport {
    pub pub_acc: f64,
    pub adv_acc: f64,
}

/// Little-endian bytes of the encrypted part's parameters (p, then w2).
pub fn encrypted_part_bytes(params: &QuadNetParams) -> Vec<u8> {
    let mut bytes = Vec::new();
    for m in [&params.p, &params.w2] {
        for &v in m.iter() {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    bytes
}

/// SHA-256 over [`encrypted_part_bytes`], the freeze witness for the
/// encrypted part.
pub fn encrypted_part_digest(params: &QuadNetParams) -> String {
    hex(&Sha256::digest(encrypted_part_bytes(params)))
}

fn check_inputs(
    params: &QuadNetParams,
    pub_head: &Head,
    adv_head: &Head,
    x: &Array2<f64>,
    y_pub: &[usize],
    y_pri: &[usize],
) -> Result<(), LeakError> {
    if x.ncols() != params.n() + 1 {
        return Err(dimension("design matrix width", params.n() + 1, x.ncols()));
    }
    if pub_head.input_width() != params.t() {
        return Err(dimension("public head input", params.t(), pub_head.input_width()));
    }
    if adv_head.input_width() != params.t() {
        return Err(dimension("adversary head input", params.t(), adv_head.input_width()));
    }
    if y_pub.len() != x.nrows() {
        return Err(dimension("public label count", x.nrows(), y_pub.len()));
    }
    if y_pri.len() != x.nrows() {
        return Err(dimension("private label count", x.nrows(), y_pri.len()));
    }
    Ok(())
}

/// Combined loss over a batch, with its components: (loss, l_pub, l_pri)
/// where loss = l_pub - alpha * l_pri.
pub fn collateral_loss(
    params: &QuadNetParams,
    pub_head: &Head,
    adv_head: &Head,
    x: &Array2<f64>,
    y_pub: &[usize],
    y_pri: &[usize],
    alpha: f64,
) -> Result<(f64, f64, f64), LeakError> {
    check_inputs(params, pub_head, adv_head, x, y_pub, y_pri)?;
    let (_, _, q) = encrypted_part_forward_batch(params, x);
    let l_pub = pub_head.loss(&q, y_pub)?;
    let l_pri = adv_head.loss(&q, y_pri)?;
    Ok((l_pub - alpha * l_pri, l_pub, l_pri))
}

/// Combined loss and its gradient with respect to the encrypted part,
/// unclipped: (loss, dp, dw2).
pub fn collateral_gradients(
    params: &QuadNetParams,
    pub_head: &Head,
    adv_head: &Head,
    x: &Array2<f64>,
    y_pub: &[usize],
    y_pri: &[usize],
    alpha: f64,
) -> Result<(f64, Array2<f64>, Array2<f64>), LeakError> {
    check_inputs(params, pub_head, adv_head, x, y_pub, y_pri)?;
    let (h, u, q) = encrypted_part_forward_batch(params, x);
    let (l_pub, dq_pub) = pub_head.loss_and_input_grad(&q, y_pub)?;
    let (l_pri, dq_pri) = adv_head.loss_and_input_grad(&q, y_pri)?;
    let dq = dq_pub - alpha * &dq_pri;
    let (dp, dw2) = encrypted_part_backward_batch(params, x, &h, &u, &dq);
    Ok((l_pub - alpha * l_pri, dp, dw2))
}

/// Retrains the encrypted part against the two frozen heads.
#[allow(clippy::too_many_arguments)]
pub fn collateral_train(
    params: &QuadNetParams,
    pub_head: &Head,
    adv_head: &Head,
    x: &Array2<f64>,
    y_pub: &[usize],
    y_pri: &[usize],
    cfg: &CollateralConfig,
) -> Result<CollateralOutcome, LeakError> {
    check_inputs(params, pub_head, adv_head, x, y_pub, y_pri)?;
    let pub_before = pub_head.digest();
    let adv_before = adv_head.digest();
    let plaintext_before = hex(&Sha256::digest(params.plaintext.param_bytes()));

    let mut out = params.clone();
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed.wrapping_add(3));
    let mut order: Vec<usize> = (0..x.nrows()).collect();
    let batch = cfg.batch_size.max(1);
    let mut epochs = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(batch) {
            let xb = x.select(Axis(0), chunk);
            let yb_pub: Vec<usize> = chunk.iter().map(|&i| y_pub[i]).collect();
            let yb_pri: Vec<usize> = chunk.iter().map(|&i| y_pri[i]).collect();
            let (loss, dp, dw2) =
                collateral_gradients(&out, pub_head, adv_head, &xb, &yb_pub, &yb_pri, cfg.alpha)?;
            if !loss.is_finite() {
                return Err(LeakError::Divergence { epoch, loss });
            }
            let norm = (dp.iter().map(|g| g * g).sum::<f64>()
                + dw2.iter().map(|g| g * g).sum::<f64>())
            .sqrt();
            if !norm.is_finite() {
                return Err(LeakError::Divergence { epoch, loss: norm });
            }
            let scale = if norm > cfg.clip_norm {
                cfg.clip_norm / norm
            } else {
                1.0
            };
            out.p -= &(cfg.learning_rate * scale * &dp);
            out.w2 -= &(cfg.learning_rate * scale * &dw2);
        }
        let (loss, l_pub, l_pri) =
            collateral_loss(&out, pub_head, adv_head, x, y_pub, y_pri, cfg.alpha)?;
        if !loss.is_finite() {
            return Err(LeakError::Divergence { epoch, loss });
        }
        epochs.push(EpochStats { loss, l_pub, l_pri });
    }

    assert_eq!(pub_head.digest(), pub_before, "public head changed during collateral training");
    assert_eq!(adv_head.digest(), adv_before, "adversary head changed during collateral training");
    assert_eq!(
        hex(&Sha256::digest(out.plaintext.param_bytes())),
        plaintext_before,
        "plaintext part changed during collateral training"
    );
    Ok(CollateralOutcome { params: out, epochs })
}

/// Settings for [`run_defense`]: how many alternation rounds to play and
/// how each round's pieces train.
#[derive(Debug, Clone, PartialEq)]
pub struct DefenseConfig {
    /// Alternation rounds. Each round refits both heads on the current
    /// encrypted-part outputs (round zero uses the provided pretrained
    /// heads), then runs one collateral training phase against them.
    pub rounds: usize,
    /// Per-round encrypted-part phase; `epochs` counts within one round.
    pub collateral: CollateralConfig,
    /// Template for the public heads refit between rounds; the seed
    /// advances by one per round.
    pub pub_head: HeadConfig,
    /// Template for the adversary heads refit between rounds.
    pub adv_head: HeadConfig,
}

impl DefenseConfig {
    pub fn new(classes: usize, seed: u64) -> DefenseConfig {
        DefenseConfig {
            rounds: 10,
            collateral: CollateralConfig { epochs: 1, seed, ..CollateralConfig::default() },
            pub_head: HeadConfig::public_clone(seed.wrapping_add(100)),
            adv_head: HeadConfig::adversary(classes, seed.wrapping_add(200)),
        }
    }
}

/// Trace of one defense round, measured before its encrypted-part phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundStats {
    pub round: usize,
    /// The round's public head accuracy over the full corpus.
    pub pub_acc: f64,
    /// The round's adversary accuracy over the full corpus.
    pub adv_acc: f64,
    /// Combined loss after the round's last epoch.
    pub loss: f64,
}

/// Result of a full defense run.
#[derive(Debug, Clone)]
pub struct DefenseOutcome {
    pub params: QuadNetParams,
    pub rounds: Vec<RoundStats>,
}

/// The operational defense: alternates head fitting with collateral
/// training of the encrypted part.
///
/// A single collateral phase against one frozen adversary cannot remove
/// information: ascending a fixed head's loss moves the private classes to
/// where that head misreads them, which a freshly trained head decodes
/// again (often better, since the ascent is unbounded). Refitting the
/// adversary between phases closes that loophole; whatever signal the new
/// head finds is suppressed next round, and the process settles where no
/// head beats chance while the public term keeps the public task intact.
#[allow(clippy::too_many_arguments)]
pub fn run_defense(
    fe: &QuadNetParams,
    pretrained_pub: &Head,
    pretrained_adv: &Head,
    x: &Array2<f64>,
    y_pub: &[usize],
    y_pri: &[usize],
    cfg: &DefenseConfig,
) -> Result<DefenseOutcome, LeakError> {
    assert!(cfg.collateral.epochs >= 1, "defense rounds need at least one epoch");
    let mut params = fe.clone();
    let mut rounds = Vec::with_capacity(cfg.rounds);
    for round in 0..cfg.rounds {
        let (_, _, q) = encrypted_part_forward_batch(&params, x);
        let (pub_head, adv_head) = if round == 0 {
            (pretrained_pub.clone(), pretrained_adv.clone())
        } else {
            let r = round as u64;
            let pub_cfg = HeadConfig { seed: cfg.pub_head.seed.wrapping_add(r), ..cfg.pub_head.clone() };
            let adv_cfg = HeadConfig { seed: cfg.adv_head.seed.wrapping_add(r), ..cfg.adv_head.clone() };
            let (pub_head, _) = train_and_eval(&q, y_pub, &pub_cfg)?;
            let (adv_head, _) = train_and_eval(&q, y_pri, &adv_cfg)?;
            (pub_head, adv_head)
        };
        let phase = CollateralConfig {
            seed: cfg.collateral.seed.wrapping_add(round as u64),
            ..cfg.collateral.clone()
        };
        let outcome = collateral_train(&params, &pub_head, &adv_head, x, y_pub, y_pri, &phase)?;
        rounds.push(RoundStats {
            round,
            pub_acc: pub_head.accuracy(&q, y_pub),
            adv_acc: adv_head.accuracy(&q, y_pri),
            loss: outcome.epochs.last().map_or(f64::NAN, |e| e.loss),
        });
        params = outcome.params;
    }
    Ok(DefenseOutcome { params, rounds })
}

/// Trains an adversary head against the frozen encrypted part and reports
/// held-out accuracy on the private labels.
pub fn train_adversary(
    frozen_fe: &QuadNetParams,
    x: &Array2<f64>,
    labeling: &PrivateLabeling,
    cfg: &HeadConfig,
) -> Result<(Head, f64), LeakError> {
    if x.ncols() != frozen_fe.n() + 1 {
        return Err(dimension("design matrix width", frozen_fe.n() + 1, x.ncols()));
    }
    if cfg.classes != labeling.classes {
        return Err(dimension("adversary classes", labeling.classes, cfg.classes));
    }
    let before = encrypted_part_digest(frozen_fe);
    let (_, _, q) = encrypted_part_forward_batch(frozen_fe, x);
    let result = train_and_eval(&q, &labeling.labels, cfg)?;
    assert_eq!(
        encrypted_part_digest(frozen_fe),
        before,
        "encrypted part changed during adversary training"
    );
    Ok(result)
}

/// Trains fresh public and adversary heads from scratch over a frozen
/// encrypted part and reports both held-out accuracies.
pub fn recovery_eval(
    new_fe: &QuadNetParams,
    x: &Array2<f64>,
    y_pub: &[usize],
    y_pri: &[usize],
    pub_cfg: &HeadConfig,
    adv_cfg: &HeadConfig,
) -> Result<RecoveryReport, LeakError> {
    if x.ncols() != new_fe.n() + 1 {
        return Err(dimension("design matrix width", new_fe.n() + 1, x.ncols()));
    }
    let before = encrypted_part_digest(new_fe);
    let (_, _, q) = encrypted_part_forward_batch(new_fe, x);
    let (_, pub_acc) = train_and_eval(&q, y_pub, pub_cfg)?;
    let (_, adv_acc) = train_and_eval(&q, y_pri, adv_cfg)?;
    assert_eq!(
        encrypted_part_digest(new_fe),
        before,
        "encrypted part changed during recovery evaluation"
    );
    Ok(RecoveryReport { pub_acc, adv_acc })
}
