mod common;

use common::{rng, test_keys};
use he_baseline::{
    add, decode_signed, decrypt, encode_signed, encrypt, keygen, scalar_mul, HeError,
    REAL_KEY_BITS,
};
use num_bigint::BigInt;
use num_traits::One;

#[test]
fn addition_is_homomorphic_across_the_signed_range() {
    let keys = test_keys(10);
    let pk = &keys.public;
    let mut r = rng(11);
    let encryptions: Vec<_> = (-50i64..=50)
        .map(|v| {
            let encoded = encode_signed(pk, &BigInt::from(v)).unwrap();
            (v, encrypt(pk, &encoded, &mut r).unwrap())
        })
        .collect();
    for (a, ca) in &encryptions {
        for (b, cb) in &encryptions {
            let sum = add(pk, ca, cb).unwrap();
            let decoded = decode_signed(pk, &decrypt(&keys, &sum).unwrap());
            assert_eq!(decoded, BigInt::from(a + b), "{a} + {b}");
        }
    }
}

#[test]
fn scalar_multiplication_is_homomorphic_across_the_signed_range() {
    let keys = test_keys(12);
    let pk = &keys.public;
    let mut r = rng(13);
    let encryptions: Vec<_> = (-50i64..=50)
        .map(|v| {
            let encoded = encode_signed(pk, &BigInt::from(v)).unwrap();
            (v, encrypt(pk, &encoded, &mut r).unwrap())
        })
        .collect();
    for (a, ca) in &encryptions {
        for k in -50i64..=50 {
            let scaled = scalar_mul(pk, ca, k).unwrap();
            let decoded = decode_signed(pk, &decrypt(&keys, &scaled).unwrap());
            assert_eq!(decoded, BigInt::from(k * a), "{k} * {a}");
        }
    }
}

#[test]
fn equal_plaintexts_encrypt_to_different_ciphertexts() {
    let keys = test_keys(14);
    let mut r = rng(15);
    let m = encode_signed(&keys.public, &BigInt::from(42)).unwrap();
    let c1 = encrypt(&keys.public, &m, &mut r).unwrap();
    let c2 = encrypt(&keys.public, &m, &mut r).unwrap();
    assert_ne!(c1, c2);
    assert_eq!(decrypt(&keys, &c1).unwrap(), decrypt(&keys, &c2).unwrap());
}

#[test]
fn malformed_ciphertexts_are_rejected() {
    let keys = test_keys(16);
    let pk = &keys.public;
    for bad in [
        num_bigint::BigUint::from(0u32),
        pk.modulus_squared().clone(),
        pk.modulus.clone(),
    ] {
        let err = decrypt(&keys, &bad).unwrap_err();
        assert!(matches!(err, HeError::InvalidCiphertext { .. }), "{err}");
    }
}

#[test]
fn real_mode_keys_reach_two_thousand_forty_eight_bits() {
    let mut r = rng(17);
    let keys = keygen(REAL_KEY_BITS, &mut r);
    assert_eq!(keys.public.modulus.bits(), 2048);
    let m = encode_signed(&keys.public, &BigInt::from(-123456789i64)).unwrap();
    let c = encrypt(&keys.public, &m, &mut r).unwrap();
    let decoded = decode_signed(&keys.public, &decrypt(&keys, &c).unwrap());
    assert_eq!(decoded, BigInt::from(-123456789i64));
}

#[test]
fn generator_is_modulus_plus_one() {
    let keys = test_keys(18);
    assert_eq!(keys.public.generator, &keys.public.modulus + 1u32);
    assert!(keys.private.lambda > One::one());
}
