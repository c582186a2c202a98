//! Recovery-phase evaluation and the alpha sweep.

mod common;

use std::fs;

use common::{context, ADV_SEED, PUB_SEED};
use leakage_lab::{
    alpha_sweep, holdout_split, majority_rate, read_sweep_table, recovery_eval, write_manifest,
    write_sweep_table, HeadConfig, SweepConfig,
};

#[test]
fn recovery_on_the_original_part_matches_the_baseline() {
    let ctx = context();
    let report = recovery_eval(
        &ctx.fe,
        &ctx.x,
        &ctx.y_pub,
        &ctx.y_pri,
        &HeadConfig::public_clone(PUB_SEED),
        &HeadConfig::adversary(3, ADV_SEED),
    )
    .unwrap();
    assert!(
        (report.adv_acc - ctx.adv_baseline).abs() <= 0.02,
        "adversary {:.3} vs baseline {:.3}",
        report.adv_acc,
        ctx.adv_baseline
    );
    assert!(
        (report.pub_acc - ctx.pub_baseline).abs() <= 0.02,
        "public {:.3} vs baseline {:.3}",
        report.pub_acc,
        ctx.pub_baseline
    );
}

fn expected_constant_accuracy(labels: &[usize], cfg: &HeadConfig) -> f64 {
    let (train_rows, eval_rows) = holdout_split(labels.len(), cfg.holdout, cfg.seed);
    let classes = labels.iter().max().unwrap() + 1;
    let mut counts = vec![0usize; classes];
    for &i in &train_rows {
        counts[labels[i]] += 1;
    }
    let majority = counts.iter().enumerate().max_by_key(|&(_, c)| *c).unwrap().0;
    let hits = eval_rows.iter().filter(|&&i| labels[i] == majority).count();
    hits as f64 / eval_rows.len() as f64
}

#[test]
fn constant_output_part_scores_at_the_majority_rate() {
    let ctx = context();
    let mut zeroed = ctx.fe.clone();
    zeroed.p.fill(0.0);
    let n = ctx.x.nrows();
    let y_pub: Vec<usize> = (0..n).map(|i| usize::from(i % 10 >= 7)).collect();
    let y_pri: Vec<usize> = (0..n)
        .map(|i| match i % 10 {
            0..=4 => 0,
            5..=7 => 1,
            _ => 2,
        })
        .collect();
    let pub_cfg = HeadConfig::public_clone(PUB_SEED);
    let adv_cfg = HeadConfig::adversary(3, ADV_SEED);
    let report = recovery_eval(&zeroed, &ctx.x, &y_pub, &y_pri, &pub_cfg, &adv_cfg).unwrap();
    assert_eq!(report.pub_acc, expected_constant_accuracy(&y_pub, &pub_cfg));
    assert_eq!(report.adv_acc, expected_constant_accuracy(&y_pri, &adv_cfg));
    assert!((report.pub_acc - majority_rate(&y_pub)).abs() <= 0.05);
    assert!((report.adv_acc - majority_rate(&y_pri)).abs() <= 0.05);
}

#[test]
fn identical_seeds_produce_identical_sweep_tables() {
    let ctx = context();
    let mut cfg = SweepConfig::new(vec![0.0, 1.0], 3, 11);
    cfg.defense.rounds = 3;
    let run = || {
        alpha_sweep(&ctx.fe, &ctx.pub_head, &ctx.adv_head, &ctx.x, &ctx.y_pub, &ctx.y_pri, &cfg)
            .unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn alpha_sweep_orders_the_tradeoff_and_round_trips() {
    let ctx = context();
    let cfg = SweepConfig::new(vec![0.0, 0.5, 1.0, 4.0], 3, 11);
    let report = alpha_sweep(
        &ctx.fe,
        &ctx.pub_head,
        &ctx.adv_head,
        &ctx.x,
        &ctx.y_pub,
        &ctx.y_pri,
        &cfg,
    )
    .unwrap();

    let zero_row = report.rows[0];
    assert_eq!(zero_row.alpha, 0.0);
    assert_eq!(report.epochs, cfg.defense.rounds * cfg.defense.collateral.epochs);
    for row in &report.rows {
        assert!(
            zero_row.pub_acc + 0.02 >= row.pub_acc,
            "alpha=0 public accuracy {:.3} beaten at alpha={} ({:.3})",
            zero_row.pub_acc,
            row.alpha,
            row.pub_acc
        );
    }
    let one_row = report.rows.iter().find(|r| r.alpha == 1.0).unwrap();
    assert!(
        one_row.adv_acc < zero_row.adv_acc,
        "adversary at alpha=1 ({:.3}) not below alpha=0 ({:.3})",
        one_row.adv_acc,
        zero_row.adv_acc
    );

    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("sweep.tsv");
    write_sweep_table(&table, &report).unwrap();
    assert_eq!(read_sweep_table(&table).unwrap(), report);

    let manifest = dir.path().join("manifest.txt");
    write_manifest(
        &manifest,
        &[
            ("alphas", "0,0.5,1,4".to_string()),
            ("rounds", cfg.defense.rounds.to_string()),
            ("epochs_per_round", cfg.defense.collateral.epochs.to_string()),
            ("collateral_lr", cfg.defense.collateral.learning_rate.to_string()),
            ("clip_norm", cfg.defense.collateral.clip_norm.to_string()),
            ("seed", cfg.defense.collateral.seed.to_string()),
        ],
    )
    .unwrap();
    let text = fs::read_to_string(&manifest).unwrap();
    assert!(text.contains("alphas=0,0.5,1,4"));
    assert!(text.contains("clip_norm=5"));
}
