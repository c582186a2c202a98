#![allow(dead_code)]

use fe_scheme::{GroupParams, IntMatrix, QuadraticForm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn params() -> GroupParams {
    GroupParams::default()
}

/// Random factored form with entries in `[-weight_mag, weight_mag]`.
pub fn random_form(
    rng: &mut ChaCha20Rng,
    n: usize,
    d: usize,
    outputs: usize,
    weight_mag: i64,
    x_max: u32,
) -> QuadraticForm {
    let p_rows: Vec<Vec<i64>> = (0..d)
        .map(|_| {
            (0..=n)
                .map(|_| rng.gen_range(-weight_mag..=weight_mag))
                .collect()
        })
        .collect();
    let w2_rows: Vec<Vec<i64>> = (0..outputs)
        .map(|_| {
            (0..d)
                .map(|_| rng.gen_range(-weight_mag..=weight_mag))
                .collect()
        })
        .collect();
    QuadraticForm::new(
        IntMatrix::from_rows(&p_rows).unwrap(),
        IntMatrix::from_rows(&w2_rows).unwrap(),
        x_max,
    )
    .unwrap()
}

pub fn random_x(rng: &mut ChaCha20Rng, n: usize, x_max: u32) -> Vec<u32> {
    (0..n).map(|_| rng.gen_range(0..=x_max)).collect()
}
