#![allow(dead_code)]

use he_baseline::{keygen, AdditiveHEKeys, TEST_KEY_BITS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use text_pipeline::{DatasetSplit, FeatureVector, Label};

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn test_keys(seed: u64) -> AdditiveHEKeys {
    keygen(TEST_KEY_BITS, &mut rng(seed))
}

/// Linearly separable synthetic dataset: spam emails draw their marker words
/// from the first half of the vocabulary, ham from the second half.
pub fn planted_split(n: usize, emails: usize, seed: u64) -> DatasetSplit {
    let mut r = rng(seed);
    let mut items = Vec::with_capacity(emails);
    for i in 0..emails {
        let label = if i % 2 == 0 { Label::Spam } else { Label::Ham };
        let mut counts = vec![0u32; n];
        for _ in 0..8 {
            let idx = match label {
                Label::Spam => r.gen_range(0..n / 2),
                Label::Ham => r.gen_range(n / 2..n),
            };
            counts[idx] += 1;
        }
        for _ in 0..4 {
            let idx = r.gen_range(0..n);
            counts[idx] += 1;
        }
        items.push((FeatureVector { counts }, label));
    }
    DatasetSplit::new(items, 0.7, seed).unwrap()
}
