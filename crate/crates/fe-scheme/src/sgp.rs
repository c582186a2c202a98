//! Pairing instantiation of the quadratic scheme.
//!
//! Key material is a pair of scalar vectors `(s, t)` with `g1^{s_i}` and
//! `g2^{t_i}` published. A ciphertext hides `x' = (1, x)` behind a fresh
//! invertible 2x2 matrix `W` and a scalar `gamma`: coordinate `i` carries
//! `g1` raised to `(W^-1)^T (x'_i, gamma s_i)` and `g2` raised to
//! `W (x'_i, -t_i)`, so the exponent inner product of coordinates `i` and
//! `j` telescopes to `x'_i x'_j - gamma s_i t_j`. A functional key for a
//! quadratic form `F` is `g2^{s^T F t}`; pairing it with `g1^gamma` cancels
//! the masking term and leaves `e(g1, g2)^{x'^T F x'}`.
//!
//! Evaluation exploits the factored shape `F = P^T diag(w) P`: combining
//! ciphertext coordinates with the integer weights of a row of `P` yields a
//! valid ciphertext of the projected coordinate `(P x')_k` under projected
//! secrets, so only the diagonal pairs survive. The projection and its
//! pairings depend on `P` alone and are shared across every output.

use ark_bls12_381::{Bls12_381, Fr, G1Affine, G1Projective, G2Affine, G2Projective};
use ark_ec::pairing::Pairing;
use ark_ec::{AffineRepr, CurveGroup, PrimeGroup};
use ark_ff::{AdditiveGroup, Field, UniformRand, Zero};
use rand::RngCore;

use crate::form::QuadraticForm;
use crate::group::{fr_from_i64, Gt};

#[derive(Clone, Debug)]
pub(crate) struct PairingPublic {
    pub g1s: Vec<G1Affine>,
    pub g2t: Vec<G2Affine>,
}

#[derive(Clone, Debug)]
pub(crate) struct PairingSecret {
    pub s: Vec<Fr>,
    pub t: Vec<Fr>,
}

#[derive(Clone, Debug)]
pub(crate) struct PairingCiphertext {
    pub g1_gamma: G1Affine,
    pub a: Vec<[G1Affine; 2]>,
    pub b: Vec<[G2Affine; 2]>,
}

pub(crate) fn setup(n: usize, rng: &mut impl RngCore) -> (PairingPublic, PairingSecret) {
    let len = n + 1;
    let s: Vec<Fr> = (0..len).map(|_| Fr::rand(rng)).collect();
    let t: Vec<Fr> = (0..len).map(|_| Fr::rand(rng)).collect();
    let g1 = G1Projective::generator();
    let g2 = G2Projective::generator();
    let g1s = G1Projective::normalize_batch(&s.iter().map(|si| g1 * si).collect::<Vec<_>>());
    let g2t = G2Projective::normalize_batch(&t.iter().map(|ti| g2 * ti).collect::<Vec<_>>());
    (PairingPublic { g1s, g2t }, PairingSecret { s, t })
}

/// Samples a uniformly random invertible 2x2 matrix over the scalar field.
fn random_invertible(rng: &mut impl RngCore) -> [Fr; 4] {
    loop {
        let w = [Fr::rand(rng), Fr::rand(rng), Fr::rand(rng), Fr::rand(rng)];
        if (w[0] * w[3] - w[1] * w[2]) != Fr::ZERO {
            return w;
        }
    }
}

pub(crate) fn encrypt(
    pk: &PairingPublic,
    x: &[u32],
    rng: &mut impl RngCore,
) -> PairingCiphertext {
    let gamma = Fr::rand(rng);
    // w = [w00, w01, w10, w11], row-major.
    let w = random_invertible(rng);
    let det_inv = (w[0] * w[3] - w[1] * w[2])
        .inverse()
        .expect("determinant checked nonzero");
    // m = (W^-1)^T = det^-1 * [[w11, -w10], [-w01, w00]], row-major.
    let m = [
        w[3] * det_inv,
        -w[2] * det_inv,
        -w[1] * det_inv,
        w[0] * det_inv,
    ];

    let g1 = G1Projective::generator();
    let g2 = G2Projective::generator();
    // Per-coordinate exponents decompose into a public-input part on the
    // generator and a key part on the published g1^{s_i} / g2^{t_i}, so the
    // generator factors can be raised once and then scaled by the small
    // feature value.
    let g1_m0 = g1 * m[0];
    let g1_m2 = g1 * m[2];
    let g2_w0 = g2 * w[0];
    let g2_w2 = g2 * w[2];
    let c_a0 = m[1] * gamma;
    let c_a1 = m[3] * gamma;

    let len = pk.g1s.len();
    let mut a_proj = Vec::with_capacity(len * 2);
    let mut b_proj = Vec::with_capacity(len * 2);
    for i in 0..len {
        let xi = if i == 0 { 1u64 } else { u64::from(x[i - 1]) };
        a_proj.push(pow_small(g1_m0, u128::from(xi)) + pk.g1s[i] * c_a0);
        a_proj.push(pow_small(g1_m2, u128::from(xi)) + pk.g1s[i] * c_a1);
        b_proj.push(pow_small(g2_w0, u128::from(xi)) + pk.g2t[i] * (-w[1]));
        b_proj.push(pow_small(g2_w2, u128::from(xi)) + pk.g2t[i] * (-w[3]));
    }
    let a_aff = G1Projective::normalize_batch(&a_proj);
    let b_aff = G2Projective::normalize_batch(&b_proj);
    let a = a_aff.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
    let b = b_aff.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
    PairingCiphertext {
        g1_gamma: (g1 * gamma).into_affine(),
        a,
        b,
    }
}

/// Derives the functional key for output `index`: `g2` raised to
/// `(P s)^T diag(w2_row) (P t)`, the form evaluated on the secret vectors.
pub(crate) fn derive_dk(sk: &PairingSecret, form: &QuadraticForm, index: usize) -> G2Affine {
    let mut scalar = Fr::ZERO;
    for (k, &weight) in form.w2().row(index).iter().enumerate() {
        if weight == 0 {
            continue;
        }
        let row = form.p().row(k);
        let mut s_k = Fr::ZERO;
        let mut t_k = Fr::ZERO;
        for (i, &coeff) in row.iter().enumerate() {
            if coeff == 0 {
                continue;
            }
            let c = fr_from_i64(coeff);
            s_k += c * sk.s[i];
            t_k += c * sk.t[i];
        }
        scalar += fr_from_i64(weight) * s_k * t_k;
    }
    (G2Projective::generator() * scalar).into_affine()
}

/// Evaluates the requested outputs of one ciphertext.
///
/// The weighted coordinate combinations and the diagonal pairings are
/// computed once; each output then costs one pairing against its key plus a
/// short exponentiation per nonzero weight.
pub(crate) fn evaluate_outputs(
    ct: &PairingCiphertext,
    form: &QuadraticForm,
    keys: &[(usize, G2Affine)],
) -> Vec<Gt> {
    let d = form.d();
    let mut active = vec![false; d];
    for &(index, _) in keys {
        for (k, &w) in form.w2().row(index).iter().enumerate() {
            active[k] |= w != 0;
        }
    }

    let len = ct.a.len();
    let a0: Vec<G1Affine> = ct.a.iter().map(|pair| pair[0]).collect();
    let a1: Vec<G1Affine> = ct.a.iter().map(|pair| pair[1]).collect();
    let b0: Vec<G2Affine> = ct.b.iter().map(|pair| pair[0]).collect();
    let b1: Vec<G2Affine> = ct.b.iter().map(|pair| pair[1]).collect();
    debug_assert_eq!(len, form.n() + 1);

    let mut diag = vec![Gt::zero(); d];
    for k in 0..d {
        if !active[k] {
            continue;
        }
        let weights = form.p().row(k);
        let pa0 = small_combination::<G1Projective>(&a0, weights).into_affine();
        let pa1 = small_combination::<G1Projective>(&a1, weights).into_affine();
        let pb0 = small_combination::<G2Projective>(&b0, weights).into_affine();
        let pb1 = small_combination::<G2Projective>(&b1, weights).into_affine();
        let mut g1_side = Vec::with_capacity(2);
        let mut g2_side = Vec::with_capacity(2);
        if !pa0.is_zero() && !pb0.is_zero() {
            g1_side.push(pa0);
            g2_side.push(pb0);
        }
        if !pa1.is_zero() && !pb1.is_zero() {
            g1_side.push(pa1);
            g2_side.push(pb1);
        }
        if !g1_side.is_empty() {
            diag[k] = Bls12_381::multi_pairing(g1_side, g2_side);
        }
    }

    keys.iter()
        .map(|&(index, dk)| {
            let mut acc = if dk.is_zero() {
                Gt::zero()
            } else {
                Bls12_381::pairing(ct.g1_gamma, dk)
            };
            for (k, &weight) in form.w2().row(index).iter().enumerate() {
                if weight == 0 {
                    continue;
                }
                let term = pow_small(diag[k], weight.unsigned_abs() as u128);
                if weight < 0 {
                    acc -= term;
                } else {
                    acc += term;
                }
            }
            acc
        })
        .collect()
}

/// Weight magnitude up to which the bucket method is used; larger weights
/// fall back to full scalar multiplications.
const MAX_BUCKET_WEIGHT: u64 = 1 << 12;

/// Computes `sum_i weights[i] * points[i]` for small signed integer weights.
///
/// Points are grouped into buckets by weight magnitude and combined with a
/// running suffix sum, costing one group addition per point plus two per
/// distinct magnitude, instead of a full scalar multiplication per point.
fn small_combination<G: CurveGroup<ScalarField = Fr>>(points: &[G::Affine], weights: &[i64]) -> G {
    debug_assert_eq!(points.len(), weights.len());
    let max = weights.iter().map(|w| w.unsigned_abs()).max().unwrap_or(0);
    if max == 0 {
        return G::zero();
    }
    if max > MAX_BUCKET_WEIGHT {
        return points
            .iter()
            .zip(weights)
            .filter(|(_, &w)| w != 0)
            .map(|(p, &w)| G::from(*p) * fr_from_i64(w))
            .sum();
    }
    let mut buckets = vec![G::zero(); max as usize + 1];
    for (point, &weight) in points.iter().zip(weights) {
        if weight > 0 {
            buckets[weight as usize] += *point;
        } else if weight < 0 {
            buckets[weight.unsigned_abs() as usize] -= *point;
        }
    }
    let mut running = G::zero();
    let mut acc = G::zero();
    for bucket in buckets[1..].iter().rev() {
        running += bucket;
        acc += &running;
    }
    acc
}

/// Double-and-add exponentiation for small non-negative exponents, written
/// additively. Full scalar multiplication would pay for the entire 255-bit
/// scalar even when the exponent fits a few bits.
pub(crate) fn pow_small<G: AdditiveGroup>(base: G, magnitude: u128) -> G {
    if magnitude == 0 {
        return G::ZERO;
    }
    let bits = 128 - magnitude.leading_zeros();
    let mut acc = G::ZERO;
    for i in (0..bits).rev() {
        acc.double_in_place();
        if (magnitude >> i) & 1 == 1 {
            acc += base;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn pow_small_matches_scalar_mul() {
        let g = G1Projective::generator();
        for e in [0u128, 1, 2, 3, 7, 127, 128, 1 << 20] {
            assert_eq!(pow_small(g, e), g * Fr::from(e));
        }
    }

    #[test]
    fn small_combination_matches_naive() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let points: Vec<G1Affine> = (0..12)
            .map(|_| (G1Projective::generator() * Fr::rand(&mut rng)).into_affine())
            .collect();
        let weights: Vec<i64> = vec![0, 3, -7, 127, -127, 1, 2, -2, 50, -4, 9, 0];
        let fast = small_combination::<G1Projective>(&points, &weights);
        let naive: G1Projective = points
            .iter()
            .zip(&weights)
            .map(|(p, &w)| G1Projective::from(*p) * fr_from_i64(w))
            .sum();
        assert_eq!(fast, naive);
    }

    #[test]
    fn small_combination_large_weights_fall_back() {
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let points: Vec<G1Affine> = (0..3)
            .map(|_| (G1Projective::generator() * Fr::rand(&mut rng)).into_affine())
            .collect();
        let weights = vec![1 << 20, -(1 << 21), 5];
        let fast = small_combination::<G1Projective>(&points, &weights);
        let naive: G1Projective = points
            .iter()
            .zip(&weights)
            .map(|(p, &w)| G1Projective::from(*p) * fr_from_i64(w))
            .sum();
        assert_eq!(fast, naive);
    }

    #[test]
    fn random_invertible_has_nonzero_determinant() {
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        for _ in 0..20 {
            let w = random_invertible(&mut rng);
            assert_ne!(w[0] * w[3] - w[1] * w[2], Fr::ZERO);
        }
    }

    #[test]
    fn masked_coordinates_telescope() {
        // The exponent identity behind decryption: <a_i, b_j> recovers
        // x_i * x_j - gamma * s_i * t_j. Checked here directly in the scalar
        // field on a two-coordinate example.
        let mut rng = ChaCha20Rng::seed_from_u64(14);
        let (x0, x1) = (Fr::from(3u64), Fr::from(5u64));
        let (s0, t1) = (Fr::rand(&mut rng), Fr::rand(&mut rng));
        let gamma = Fr::rand(&mut rng);
        let w = random_invertible(&mut rng);
        let det_inv = (w[0] * w[3] - w[1] * w[2]).inverse().unwrap();
        let m = [
            w[3] * det_inv,
            -w[2] * det_inv,
            -w[1] * det_inv,
            w[0] * det_inv,
        ];
        // a_0 = (W^-1)^T (x0, gamma s0); b_1 = W (x1, -t1).
        let a0 = [m[0] * x0 + m[1] * gamma * s0, m[2] * x0 + m[3] * gamma * s0];
        let b1 = [w[0] * x1 + w[1] * (-t1), w[2] * x1 + w[3] * (-t1)];
        let inner = a0[0] * b1[0] + a0[1] * b1[1];
        assert_eq!(inner, x0 * x1 - gamma * s0 * t1);
    }
}
