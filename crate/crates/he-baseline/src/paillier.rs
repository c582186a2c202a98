//! Paillier keys and the additive operations on ciphertexts.
//!
//! Keys are generated from two random primes of equal size. Encryption uses
//! the standard generator g = N + 1, for which g^m mod N^2 collapses to
//! 1 + mN and decryption reduces to one exponentiation by lambda followed by
//! a multiplication by the cached inverse mu. Ciphertext products add the
//! underlying plaintexts and ciphertext powers scale them, both modulo N, so
//! a linear score can be assembled from encrypted coefficients and plaintext
//! inputs without touching the private key.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::RngCore;

use crate::error::{invalid_ct, HeError};

/// Key size for deployment-grade keys.
pub const REAL_KEY_BITS: u64 = 2048;
/// Key size for fast test runs; offers no security margin.
pub const TEST_KEY_BITS: u64 = 256;

const MILLER_RABIN_ROUNDS: usize = 40;

const SMALL_PRIMES: [u32; 54] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251,
];

/// Public half of a Paillier key pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HePublicKey {
    pub modulus: BigUint,
    pub generator: BigUint,
    pub key_bits: u64,
    modulus_squared: BigUint,
}

impl HePublicKey {
    pub fn new(modulus: BigUint, generator: BigUint, key_bits: u64) -> HePublicKey {
        let modulus_squared = &modulus * &modulus;
        HePublicKey {
            modulus,
            generator,
            key_bits,
            modulus_squared,
        }
    }

    pub fn modulus_squared(&self) -> &BigUint {
        &self.modulus_squared
    }

    /// Largest magnitude representable by the signed encoding, exclusive.
    pub fn plaintext_capacity(&self) -> BigUint {
        &self.modulus >> 1
    }
}

/// Private half of a Paillier key pair, derived from the factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HePrivateKey {
    pub lambda: BigUint,
    pub mu: BigUint,
}

/// A full key pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditiveHEKeys {
    pub public: HePublicKey,
    pub private: HePrivateKey,
}

fn miller_rabin(candidate: &BigUint, rng: &mut impl RngCore) -> bool {
    let one = BigUint::one();
    let two = &one + &one;
    let minus_one = candidate - &one;
    let s = minus_one.trailing_zeros().expect("candidate is odd");
    let d = &minus_one >> s;
    'witness: for _ in 0..MILLER_RABIN_ROUNDS {
        let base = rng.gen_biguint_range(&two, &minus_one);
        let mut x = base.modpow(&d, candidate);
        if x == one || x == minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % candidate;
            if x == minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn is_prime(candidate: &BigUint, rng: &mut impl RngCore) -> bool {
    for &p in &SMALL_PRIMES {
        let small = BigUint::from(p);
        if candidate == &small {
            return true;
        }
        if (candidate % small).is_zero() {
            return false;
        }
    }
    miller_rabin(candidate, rng)
}

fn random_prime(bits: u64, rng: &mut impl RngCore) -> BigUint {
    loop {
        let mut candidate = rng.gen_biguint(bits);
        candidate.set_bit(bits - 1, true);
        candidate.set_bit(bits - 2, true);
        candidate.set_bit(0, true);
        if is_prime(&candidate, rng) {
            return candidate;
        }
    }
}

/// Generates a key pair with a modulus of exactly `key_bits` bits.
///
/// `key_bits` must be even and at least 64; [`REAL_KEY_BITS`] is the
/// deployment size and [`TEST_KEY_BITS`] keeps tests fast.
pub fn keygen(key_bits: u64, rng: &mut impl RngCore) -> AdditiveHEKeys {
    assert!(
        key_bits >= 64 && key_bits % 2 == 0,
        "key size must be even and at least 64 bits"
    );
    let half = key_bits / 2;
    loop {
        let p = random_prime(half, rng);
        let q = random_prime(half, rng);
        if p == q {
            continue;
        }
        let modulus = &p * &q;
        if modulus.bits() != key_bits {
            continue;
        }
        let p_minus_1 = &p - 1u32;
        let q_minus_1 = &q - 1u32;
        if modulus.gcd(&(&p_minus_1 * &q_minus_1)) != BigUint::one() {
            continue;
        }
        let lambda = p_minus_1.lcm(&q_minus_1);
        let Some(mu) = lambda.modinv(&modulus) else {
            continue;
        };
        let generator = &modulus + 1u32;
        return AdditiveHEKeys {
            public: HePublicKey::new(modulus, generator, key_bits),
            private: HePrivateKey { lambda, mu },
        };
    }
}

/// Encrypts a message in `[0, N)` under fresh randomness.
pub fn encrypt(pk: &HePublicKey, m: &BigUint, rng: &mut impl RngCore) -> Result<BigUint, HeError> {
    if m >= &pk.modulus {
        return Err(HeError::EncodingOverflow {
            value: m.to_string(),
            capacity: pk.modulus.to_string(),
        });
    }
    let n2 = pk.modulus_squared();
    let one = BigUint::one();
    let r = loop {
        let candidate = rng.gen_biguint_range(&one, &pk.modulus);
        if candidate.gcd(&pk.modulus) == one {
            break candidate;
        }
    };
    let g_to_m = if pk.generator == &pk.modulus + 1u32 {
        (BigUint::one() + m * &pk.modulus) % n2
    } else {
        pk.generator.modpow(m, n2)
    };
    Ok((g_to_m * r.modpow(&pk.modulus, n2)) % n2)
}

fn check_ciphertext(pk: &HePublicKey, c: &BigUint) -> Result<(), HeError> {
    if c.is_zero() {
        return Err(invalid_ct("zero ciphertext"));
    }
    if c >= pk.modulus_squared() {
        return Err(invalid_ct("ciphertext not reduced modulo N^2"));
    }
    if c.gcd(&pk.modulus) != BigUint::one() {
        return Err(invalid_ct("ciphertext shares a factor with the modulus"));
    }
    Ok(())
}

/// Decrypts a ciphertext back to its message in `[0, N)`.
pub fn decrypt(keys: &AdditiveHEKeys, c: &BigUint) -> Result<BigUint, HeError> {
    let pk = &keys.public;
    check_ciphertext(pk, c)?;
    let u = c.modpow(&keys.private.lambda, pk.modulus_squared());
    let l = (u - BigUint::one()) / &pk.modulus;
    Ok((l * &keys.private.mu) % &pk.modulus)
}

/// Homomorphic addition: the product of ciphertexts adds the plaintexts.
pub fn add(pk: &HePublicKey, c1: &BigUint, c2: &BigUint) -> Result<BigUint, HeError> {
    check_ciphertext(pk, c1)?;
    check_ciphertext(pk, c2)?;
    Ok((c1 * c2) % pk.modulus_squared())
}

/// Homomorphic scalar multiplication by a signed plaintext factor.
pub fn scalar_mul(pk: &HePublicKey, c: &BigUint, k: i64) -> Result<BigUint, HeError> {
    check_ciphertext(pk, c)?;
    let exponent = if k >= 0 {
        BigUint::from(k as u64)
    } else {
        &pk.modulus - BigUint::from(k.unsigned_abs())
    };
    Ok(c.modpow(&exponent, pk.modulus_squared()))
}

/// Maps a signed integer with `|value| < N/2` into `[0, N)`.
pub fn encode_signed(pk: &HePublicKey, value: &BigInt) -> Result<BigUint, HeError> {
    let magnitude = value.magnitude();
    if magnitude >= &pk.plaintext_capacity() {
        return Err(HeError::EncodingOverflow {
            value: value.to_string(),
            capacity: pk.plaintext_capacity().to_string(),
        });
    }
    if value.is_negative() {
        Ok(&pk.modulus - magnitude)
    } else {
        Ok(magnitude.clone())
    }
}

/// Inverse of [`encode_signed`]: residues above N/2 are negative.
pub fn decode_signed(pk: &HePublicKey, value: &BigUint) -> BigInt {
    if value > &pk.plaintext_capacity() {
        -BigInt::from(&pk.modulus - value)
    } else {
        BigInt::from(value.clone())
    }
}
