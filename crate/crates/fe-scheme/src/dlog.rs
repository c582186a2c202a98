//! Discrete-log recovery in the target group.
//!
//! Decryption produces `e(g1, g2)^z` with `|z|` below a certified bound
//! `B`. The shifted value `z + B` lies in `[0, 2B]`, which baby-step
//! giant-step searches with `m` baby steps and at most `ceil((2B+1)/m)`
//! giant steps. A precomputed table oversamples the baby steps so the
//! giant-step scan at recovery time shrinks accordingly; a cold recovery
//! builds the minimal square-root table on the fly.

use std::path::Path;
use std::time::Instant;

use ark_ff::Zero;
use sha2::{Digest, Sha256};

use crate::error::FeError;
use crate::group::{element_bytes, gt_generator, CurveId, GroupParams, Gt};
use crate::keys::EvalOutput;
use crate::serial;
use crate::sgp::pow_small;

/// Oversampling factor for precomputed tables: `scale` times more baby
/// steps than the square-root optimum, shrinking the per-recovery scan by
/// the same factor.
pub const TABLE_SCALE: u64 = 16;

/// Sorted baby-step table keyed by truncated hashes of target-group
/// elements.
#[derive(Debug)]
pub struct DlogTable {
    pub(crate) curve: CurveId,
    pub(crate) base: Gt,
    pub(crate) m: u64,
    /// `(key, exponent)` pairs sorted by key; `key` identifies `base^exponent`.
    pub(crate) entries: Vec<(u128, u64)>,
}

pub(crate) fn gt_key(elem: &Gt) -> u128 {
    let bytes = element_bytes(elem);
    let mut hasher = Sha256::new();
    hasher.update(b"gt-key");
    hasher.update(&bytes);
    let full = hasher.finalize();
    u128::from_le_bytes(full[..16].try_into().expect("sha256 yields 32 bytes"))
}

/// Number of baby steps used for an interval of width `2*bound + 1`.
fn baby_steps(bound: u128, scale: u64) -> u64 {
    if bound == 0 {
        return 0;
    }
    let span = 2 * bound + 1;
    let root = span.isqrt();
    let minimal = if root * root == span { root } else { root + 1 };
    let scaled = minimal.saturating_mul(u128::from(scale));
    scaled.min(span).min(u128::from(u64::MAX)) as u64
}

impl DlogTable {
    /// Builds the table in memory for recoveries up to `bound`.
    pub fn build(params: &GroupParams, bound: u128) -> Result<Self, FeError> {
        Self::build_scaled(params, bound, TABLE_SCALE)
    }

    pub(crate) fn build_scaled(
        params: &GroupParams,
        bound: u128,
        scale: u64,
    ) -> Result<Self, FeError> {
        if bound > params.dlog_capacity {
            return Err(FeError::BoundOverflow {
                bound: bound.to_string(),
                capacity: params.dlog_capacity,
            });
        }
        let base = gt_generator();
        let m = baby_steps(bound, scale);
        let mut entries = Vec::with_capacity(m as usize);
        let mut current = Gt::zero();
        for exponent in 0..m {
            entries.push((gt_key(&current), exponent));
            current += base;
        }
        entries.sort_unstable();
        Ok(DlogTable {
            curve: params.curve,
            base,
            m,
            entries,
        })
    }

    /// Number of baby steps the table covers.
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn curve(&self) -> CurveId {
        self.curve
    }

    /// Content address of the table: tables are interchangeable exactly when
    /// their curve, base element, and baby-step count agree.
    pub fn content_address(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(b"dlog-table");
        hasher.update([self.curve.code()]);
        hasher.update(element_bytes(&self.base));
        hasher.update(self.m.to_le_bytes());
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Exponents whose baby step hashes to `key`. Collisions are possible in
    /// principle, so every candidate is verified by the caller.
    pub(crate) fn candidates(&self, key: u128) -> &[(u128, u64)] {
        let start = self.entries.partition_point(|&(k, _)| k < key);
        let end = self.entries[start..].partition_point(|&(k, _)| k == key) + start;
        &self.entries[start..end]
    }

    /// Writes the table to disk. Fails without touching the file if the
    /// encoded size would exceed the configured budget.
    pub fn save(&self, params: &GroupParams, path: &Path) -> Result<(), FeError> {
        let required = serial::table_encoded_size(self.entries.len());
        if required > params.table_disk_budget {
            return Err(FeError::DiskBudgetExceeded {
                required,
                budget: params.table_disk_budget,
            });
        }
        let bytes = serial::encode_table(self);
        std::fs::write(path, bytes).map_err(|e| FeError::io(path, e))
    }

    /// Reads a table back from disk.
    pub fn load(path: &Path) -> Result<Self, FeError> {
        let bytes = std::fs::read(path).map_err(|e| FeError::io(path, e))?;
        serial::decode_table(&bytes)
    }
}

/// Builds a lookup table sized for `bound` and persists it at `path`.
pub fn precompute_table(
    params: &GroupParams,
    bound: u128,
    path: &Path,
) -> Result<DlogTable, FeError> {
    let m = baby_steps(bound, TABLE_SCALE);
    let required = serial::table_encoded_size(m as usize);
    if required > params.table_disk_budget {
        return Err(FeError::DiskBudgetExceeded {
            required,
            budget: params.table_disk_budget,
        });
    }
    let table = DlogTable::build(params, bound)?;
    table.save(params, path)?;
    Ok(table)
}

/// Recovers the signed exponent of an evaluated output within `[-bound, bound]`.
///
/// With a table the scan reuses its baby steps; without one a minimal table
/// is built for this single call. Every candidate match is verified by
/// re-exponentiation before being returned.
pub fn dlog_recover(
    params: &GroupParams,
    output: &EvalOutput,
    bound: u128,
    table: Option<&DlogTable>,
) -> Result<i128, FeError> {
    match output {
        EvalOutput::Oracle(value) => {
            if value.unsigned_abs() > bound {
                Err(FeError::NotInRange { bound })
            } else {
                Ok(*value)
            }
        }
        EvalOutput::Pairing(elem) => {
            if bound == 0 {
                return if elem.is_zero() {
                    Ok(0)
                } else {
                    Err(FeError::NotInRange { bound })
                };
            }
            if bound > params.dlog_capacity {
                return Err(FeError::BoundOverflow {
                    bound: bound.to_string(),
                    capacity: params.dlog_capacity,
                });
            }
            match table {
                Some(t) => {
                    if t.curve != params.curve {
                        return Err(FeError::invalid(format!(
                            "table built for curve {}, parameters use {}",
                            t.curve.name(),
                            params.curve.name()
                        )));
                    }
                    if t.base != gt_generator() {
                        return Err(FeError::invalid("table base element"));
                    }
                    scan(t, elem, bound)
                }
                None => {
                    let ephemeral = DlogTable::build_scaled(params, bound, 1)?;
                    scan(&ephemeral, elem, bound)
                }
            }
        }
    }
}

fn scan(table: &DlogTable, elem: &Gt, bound: u128) -> Result<i128, FeError> {
    debug_assert!(bound > 0 && table.m > 0);
    let base = table.base;
    let span = 2 * bound + 1;
    let m = u128::from(table.m);
    let giant_count = span.div_ceil(m);
    let neg_giant = -pow_small(base, m);
    let mut current = *elem + pow_small(base, bound);
    for i in 0..giant_count {
        let key = gt_key(&current);
        for &(_, j) in table.candidates(key) {
            let shifted = i * m + u128::from(j);
            if shifted > 2 * bound {
                continue;
            }
            let z = shifted as i128 - bound as i128;
            if verify(&base, z, elem) {
                return Ok(z);
            }
        }
        current += neg_giant;
    }
    Err(FeError::NotInRange { bound })
}

fn verify(base: &Gt, z: i128, elem: &Gt) -> bool {
    let mut power = pow_small(*base, z.unsigned_abs());
    if z < 0 {
        power = -power;
    }
    power == *elem
}

/// Timed discrete-log recovery, for benchmark decompositions.
pub fn dlog_recover_timed(
    params: &GroupParams,
    output: &EvalOutput,
    bound: u128,
    table: Option<&DlogTable>,
) -> Result<(i128, std::time::Duration), FeError> {
    let start = Instant::now();
    let value = dlog_recover(params, output, bound, table)?;
    Ok((value, start.elapsed()))
}
