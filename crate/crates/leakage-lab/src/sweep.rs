//! Alpha sweeps and their on-disk table format.

use std::fs;
use std::path::Path;

use ndarray::Array2;
use quad_net::params::QuadNetParams;

use crate::collateral::{recovery_eval, run_defense, CollateralConfig, DefenseConfig};
use crate::error::{io_err, LeakError};
use crate::heads::{Head, HeadConfig};

/// One sweep cell: the trade-off reached at a given alpha.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub pub_acc: f64,
    pub adv_acc: f64,
}

/// A full sweep with the settings shared by every row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub seed: u64,
    pub epochs: usize,
}

/// Settings for [`alpha_sweep`]: the alphas to compare, the defense run
/// at each one, and the fresh heads used to score the defended network.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub alphas: Vec<f64>,
    pub defense: DefenseConfig,
    pub recovery_pub: HeadConfig,
    pub recovery_adv: HeadConfig,
}

impl SweepConfig {
    pub fn new(alphas: Vec<f64>, classes: usize, seed: u64) -> SweepConfig {
        SweepConfig {
            alphas,
            defense: DefenseConfig::new(classes, seed),
            recovery_pub: HeadConfig::public_clone(seed.wrapping_add(300)),
            recovery_adv: HeadConfig::adversary(classes, seed.wrapping_add(400)),
        }
    }
}

/// Runs the full defense plus a recovery evaluation per alpha. Every cell
/// starts from the same encrypted part, the same pretrained heads, and the
/// same seeds, so rows differ only in alpha.
pub fn alpha_sweep(
    fe: &QuadNetParams,
    pub_head: &Head,
    adv_head: &Head,
    x: &Array2<f64>,
    y_pub: &[usize],
    y_pri: &[usize],
    cfg: &SweepConfig,
) -> Result<SweepReport, LeakError> {
    assert!(!cfg.alphas.is_empty(), "alpha sweep needs at least one value");
    assert!(cfg.alphas.iter().all(|&a| a >= 0.0), "alphas must be non-negative");
    let mut rows = Vec::with_capacity(cfg.alphas.len());
    for &alpha in &cfg.alphas {
        let defense = DefenseConfig {
            collateral: CollateralConfig { alpha, ..cfg.defense.collateral.clone() },
            ..cfg.defense.clone()
        };
        let outcome = run_defense(fe, pub_head, adv_head, x, y_pub, y_pri, &defense)?;
        let report =
            recovery_eval(&outcome.params, x, y_pub, y_pri, &cfg.recovery_pub, &cfg.recovery_adv)?;
        rows.push(SweepRow { alpha, pub_acc: report.pub_acc, adv_acc: report.adv_acc });
    }
    Ok(SweepReport {
        rows,
        seed: cfg.defense.collateral.seed,
        epochs: cfg.defense.rounds * cfg.defense.collateral.epochs,
    })
}

/// Writes the sweep as a tab-separated table with a header row. Floats use
/// their shortest round-tripping form, so reading the file back reproduces
/// the report exactly.
pub fn write_sweep_table(path: &Path, report: &SweepReport) -> Result<(), LeakError> {
    let mut out = String::from("alpha\tpub_acc\tadv_acc\tseed\tepochs\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            row.alpha, row.pub_acc, row.adv_acc, report.seed, report.epochs
        ));
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Reads a table produced by [`write_sweep_table`].
pub fn read_sweep_table(path: &Path) -> Result<SweepReport, LeakError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l).unwrap_or_default();
    if header != "alpha\tpub_acc\tadv_acc\tseed\tepochs" {
        return Err(LeakError::Table { line: 1, reason: "bad header".to_string() });
    }
    let mut rows = Vec::new();
    let mut seed_epochs: Option<(u64, usize)> = None;
    for (i, line) in lines {
        let line_no = i + 1;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(LeakError::Table {
                line: line_no,
                reason: format!("expected 5 fields, found {}", fields.len()),
            });
        }
        let bad = |what: &str| LeakError::Table {
            line: line_no,
            reason: format!("unparseable {what}"),
        };
        let row = SweepRow {
            alpha: fields[0].parse().map_err(|_| bad("alpha"))?,
            pub_acc: fields[1].parse().map_err(|_| bad("pub_acc"))?,
            adv_acc: fields[2].parse().map_err(|_| bad("adv_acc"))?,
        };
        let seed: u64 = fields[3].parse().map_err(|_| bad("seed"))?;
        let epochs: usize = fields[4].parse().map_err(|_| bad("epochs"))?;
        if let Some(prev) = seed_epochs {
            if prev != (seed, epochs) {
                return Err(LeakError::Table {
                    line: line_no,
                    reason: "seed/epochs differ across rows".to_string(),
                });
            }
        }
        seed_epochs = Some((seed, epochs));
        rows.push(row);
    }
    let (seed, epochs) = seed_epochs.unwrap_or((0, 0));
    Ok(SweepReport { rows, seed, epochs })
}

/// Writes an experiment manifest as `key=value` lines in the given order.
pub fn write_manifest(path: &Path, entries: &[(&str, String)]) -> Result<(), LeakError> {
    let mut out = String::new();
    for (key, value) in entries {
        out.push_str(&format!("{key}={value}\n"));
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_round_trip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.tsv");
        let report = SweepReport {
            rows: vec![
                SweepRow { alpha: 0.0, pub_acc: 0.98, adv_acc: 0.9533333333333334 },
                SweepRow { alpha: 1.0, pub_acc: 0.96, adv_acc: 0.41 },
            ],
            seed: 11,
            epochs: 60,
        };
        write_sweep_table(&path, &report).unwrap();
        assert_eq!(read_sweep_table(&path).unwrap(), report);
    }

    #[test]
    fn malformed_tables_are_rejected_with_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.tsv");
        fs::write(&path, "alpha\tpub_acc\tadv_acc\tseed\tepochs\n0.5\tx\t0.4\t1\t2\n").unwrap();
        let err = read_sweep_table(&path).unwrap_err();
        assert!(matches!(err, LeakError::Table { line: 2, .. }));

        fs::write(&path, "alpha,pub_acc\n").unwrap();
        assert!(matches!(read_sweep_table(&path).unwrap_err(), LeakError::Table { line: 1, .. }));
    }

    #[test]
    fn manifests_list_entries_in_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.txt");
        write_manifest(&path, &[("alpha", "1".to_string()), ("seed", "7".to_string())]).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "alpha=1\nseed=7\n");
    }
}
