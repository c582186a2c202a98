//! Deterministic stratified train/test splitting.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::PipelineError;
use crate::types::Label;

/// Splits labeled items into train and test partitions.
///
/// The overall train size is `round(len * ratio)`, distributed over the
/// classes by largest remainder so class proportions survive within one
/// document. Each class is shuffled with its own seeded generator, so the
/// same `(items, ratio, seed)` always yields identical partitions,
/// including order.
pub fn split_stratified<T>(
    items: Vec<(T, Label)>,
    ratio: f64,
    seed: u64,
) -> Result<(Vec<(T, Label)>, Vec<(T, Label)>), PipelineError> {
    assert!(ratio > 0.0 && ratio < 1.0, "split ratio must be in (0, 1)");
    let total = items.len();
    let mut per_class: [Vec<(T, Label)>; 2] = [Vec::new(), Vec::new()];
    for (item, label) in items {
        per_class[label.index()].push((item, label));
    }

    let total_train = ((total as f64) * ratio).round() as usize;
    let quotas: Vec<f64> = per_class.iter().map(|b| b.len() as f64 * ratio).collect();
    let mut take: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut leftover = total_train.saturating_sub(take.iter().sum::<usize>());
    let mut by_fraction: Vec<usize> = (0..take.len()).collect();
    by_fraction.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.partial_cmp(&fa).expect("finite fractions").then(a.cmp(&b))
    });
    for &c in &by_fraction {
        if leftover == 0 {
            break;
        }
        if !per_class[c].is_empty() {
            take[c] += 1;
            leftover -= 1;
        }
    }

    let mut train = Vec::new();
    let mut test = Vec::new();
    for (class, mut bucket) in per_class.into_iter().enumerate() {
        if bucket.is_empty() {
            continue;
        }
        let n = bucket.len();
        let n_train = take[class];
        if n_train == 0 || n_train >= n {
            let label = Label::from_index(class).expect("class index is 0 or 1");
            return Err(PipelineError::DegenerateSplit {
                class: label.as_str().to_string(),
                count: n,
                ratio,
            });
        }
        let mut rng = ChaCha20Rng::seed_from_u64(seed ^ (class as u64).wrapping_mul(0x9e37_79b9));
        bucket.shuffle(&mut rng);
        test.extend(bucket.split_off(n_train));
        train.extend(bucket);
    }
    Ok((train, test))
}
