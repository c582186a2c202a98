//! Model parameters and initialization.

use ndarray::{Array1, Array2};
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::QuadNetError;

/// Width of the plaintext hidden layer.
pub const PLAINTEXT_HIDDEN: usize = 10;
/// Number of output labels.
pub const OUTPUTS: usize = 2;

/// The plaintext tail of the network: Dense(t, 10) + ReLU, Dense(10, 2) +
/// sigmoid. Kept separate so the leakage experiments can clone and retrain
/// it against frozen encrypted-part outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaintextPart {
    pub w3: Array2<f64>,
    pub b3: Array1<f64>,
    pub w4: Array2<f64>,
    pub b4: Array1<f64>,
}

impl PlaintextPart {
    pub fn init(t: usize, rng: &mut ChaCha20Rng) -> PlaintextPart {
        PlaintextPart {
            w3: uniform_matrix(PLAINTEXT_HIDDEN, t, rng),
            b3: Array1::zeros(PLAINTEXT_HIDDEN),
            w4: uniform_matrix(OUTPUTS, PLAINTEXT_HIDDEN, rng),
            b4: Array1::zeros(OUTPUTS),
        }
    }

    pub fn t(&self) -> usize {
        self.w3.ncols()
    }

    /// Concatenated parameter bytes in a fixed order, for digests and
    /// bit-reproducibility checks.
    pub fn param_bytes(&self) -> Vec<u8> {
        let mut bytes = Vec::new();
        for m in [&self.w3, &self.w4] {
            for &v in m.iter() {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
        }
        for v in [&self.b3, &self.b4] {
            for &x in v.iter() {
                bytes.extend_from_slice(&x.to_le_bytes());
            }
        }
        bytes
    }
}

/// Full parameter set of the partially encrypted network.
///
/// `p` is d rows by n+1 columns; its first column is the absorbed bias
/// (inputs are evaluated as x-tilde = (1, x_1, ..., x_n)). `w2` is t by d
/// and bias-free; its row j holds the diagonal of the quadratic form D_j.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadNetParams {
    pub p: Array2<f64>,
    pub w2: Array2<f64>,
    pub plaintext: PlaintextPart,
}

impl QuadNetParams {
    /// Seeded uniform initialization over (-1/sqrt(fan_in), 1/sqrt(fan_in)),
    /// zero biases.
    pub fn init(n: usize, d: usize, t: usize, seed: u64) -> QuadNetParams {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        QuadNetParams {
            p: uniform_matrix(d, n + 1, &mut rng),
            w2: uniform_matrix(t, d, &mut rng),
            plaintext: PlaintextPart::init(t, &mut rng),
        }
    }

    /// Number of plaintext features (excludes the bias slot).
    pub fn n(&self) -> usize {
        self.p.ncols() - 1
    }

    pub fn d(&self) -> usize {
        self.p.nrows()
    }

    pub fn t(&self) -> usize {
        self.w2.nrows()
    }

    pub fn check_shapes(&self) -> Result<(), QuadNetError> {
        let (d, t) = (self.d(), self.t());
        if self.w2.ncols() != d {
            return Err(QuadNetError::shape(
                "w2",
                format!("{t}x{d}"),
                format!("{}x{}", self.w2.nrows(), self.w2.ncols()),
            ));
        }
        let pt = &self.plaintext;
        if pt.w3.nrows() != PLAINTEXT_HIDDEN || pt.w3.ncols() != t {
            return Err(QuadNetError::shape(
                "w3",
                format!("{PLAINTEXT_HIDDEN}x{t}"),
                format!("{}x{}", pt.w3.nrows(), pt.w3.ncols()),
            ));
        }
        if pt.b3.len() != PLAINTEXT_HIDDEN
            || pt.w4.nrows() != OUTPUTS
            || pt.w4.ncols() != PLAINTEXT_HIDDEN
            || pt.b4.len() != OUTPUTS
        {
            return Err(QuadNetError::shape(
                "plaintext part",
                format!("w4 {OUTPUTS}x{PLAINTEXT_HIDDEN}, b3 {PLAINTEXT_HIDDEN}, b4 {OUTPUTS}"),
                format!(
                    "w4 {}x{}, b3 {}, b4 {}",
                    pt.w4.nrows(),
                    pt.w4.ncols(),
                    pt.b3.len(),
                    pt.b4.len()
                ),
            ));
        }
        Ok(())
    }

    /// Concatenated parameter bytes in a fixed order.
    pub fn param_bytes(&self) -> Vec<u8> {
        let mut bytes = Vec::new();
        for m in [&self.p, &self.w2] {
            for &v in m.iter() {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
        }
        bytes.extend_from_slice(&self.plaintext.param_bytes());
        bytes
    }
}

fn uniform_matrix(rows: usize, cols: usize, rng: &mut ChaCha20Rng) -> Array2<f64> {
    let bound = 1.0 / (cols as f64).sqrt();
    let dist = Uniform::new_inclusive(-bound, bound);
    Array2::from_shape_fn((rows, cols), |_| dist.sample(rng))
}
