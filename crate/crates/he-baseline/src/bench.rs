//! Round-trip timing across feature sizes.
//!
//! For each requested size the harness encrypts a weight vector of that
//! size, scores sample emails against it and decrypts the scores, recording
//! wall-clock time per stage. The two network legs of the deployed flow are
//! reported as zero: every stage runs on one host here.

use std::time::{Duration, Instant};

use rand::RngCore;
use text_pipeline::{DatasetSplit, FeatureVector};

use crate::error::HeError;
use crate::lr::LRWeights;
use crate::model::{client_score, encrypt_model, owner_decrypt_and_predict, DEFAULT_SCALE_BITS};
use crate::paillier::AdditiveHEKeys;

/// Timings for one feature size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeBenchRow {
    pub features: usize,
    pub emails: usize,
    pub encrypt_model: Duration,
    pub score_per_email: Duration,
    pub decrypt_per_email: Duration,
    pub network_to_owner: Duration,
    pub network_to_client: Duration,
}

impl HeBenchRow {
    /// Per-email cost with the one-off model encryption amortized away.
    pub fn prediction_per_email(&self) -> Duration {
        self.score_per_email
            + self.decrypt_per_email
            + self.network_to_owner
            + self.network_to_client
    }
}

fn resize_counts(x: &FeatureVector, n: usize) -> FeatureVector {
    let mut counts = Vec::with_capacity(n);
    for i in 0..n {
        counts.push(x.counts[i % x.counts.len()]);
    }
    FeatureVector { counts }
}

/// Times the encrypt/score/decrypt round trip at each size in `sizes`.
///
/// Emails are drawn from the split's test partition, falling back to the
/// training partition, and their count vectors are cycled or truncated to
/// the requested width. At most `emails_per_size` emails are scored per
/// size. An empty `sizes` list yields an empty report.
pub fn bench_roundtrip(
    keys: &AdditiveHEKeys,
    split: &DatasetSplit,
    sizes: &[usize],
    emails_per_size: usize,
    rng: &mut impl RngCore,
) -> Result<Vec<HeBenchRow>, HeError> {
    let pool = if split.test.is_empty() {
        &split.train
    } else {
        &split.test
    };
    if pool.is_empty() {
        return Err(HeError::EmptyTrainingSet);
    }
    let emails = emails_per_size.max(1).min(pool.len());

    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let weights = LRWeights {
            w: (0..n)
                .map(|i| if i % 2 == 0 { 0.25 } else { -0.125 })
                .collect(),
            b: 0.0625,
        };

        let start = Instant::now();
        let model = encrypt_model(keys, &weights, DEFAULT_SCALE_BITS, rng)?;
        let encrypt_time = start.elapsed();

        let mut score_total = Duration::ZERO;
        let mut decrypt_total = Duration::ZERO;
        for (x, _) in pool.iter().take(emails) {
            let email = resize_counts(x, n);

            let start = Instant::now();
            let enc_score = client_score(&keys.public, &model, &email)?;
            score_total += start.elapsed();

            let start = Instant::now();
            owner_decrypt_and_predict(keys, &enc_score, model.scale_bits)?;
            decrypt_total += start.elapsed();
        }

        rows.push(HeBenchRow {
            features: n,
            emails,
            encrypt_model: encrypt_time,
            score_per_email: score_total / emails as u32,
            decrypt_per_email: decrypt_total / emails as u32,
            network_to_owner: Duration::ZERO,
            network_to_client: Duration::ZERO,
        });
    }
    Ok(rows)
}

/// Coefficient of determination of the best-fit line through the points.
///
/// Returns 1.0 for a perfectly flat response, since the fit is then exact.
pub fn affine_r_squared(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return 1.0;
    }
    let mean_x = points.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for &(x, y) in points {
        cov += (x - mean_x) * (y - mean_y);
        var_x += (x - mean_x) * (x - mean_x);
        var_y += (y - mean_y) * (y - mean_y);
    }
    if var_y == 0.0 {
        return 1.0;
    }
    if var_x == 0.0 {
        return 0.0;
    }
    (cov * cov) / (var_x * var_y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r_squared_is_one_on_a_line() {
        let points: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 3.0 * i as f64 + 2.0)).collect();
        assert!((affine_r_squared(&points) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn r_squared_drops_on_a_parabola() {
        let points: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, (i * i) as f64)).collect();
        let r2 = affine_r_squared(&points);
        assert!(r2 < 0.97, "{r2}");
    }
}
