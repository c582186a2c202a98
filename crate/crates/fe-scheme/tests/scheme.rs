mod common;

use common::{params, random_form, random_x, rng};
use fe_scheme::{
    decrypt_all, decrypt_eval, derive_key, derive_keys, dlog_recover, encode_public_key,
    encode_secret_key, encrypt, setup, Backend, CurveId, FeError, IntMatrix, QuadraticForm,
};
use rand::Rng;

#[test]
fn setup_rejects_zero_features() {
    let p = params();
    for backend in [Backend::Pairing, Backend::Oracle] {
        let err = setup(&p, backend, 0, 100, Some(1)).unwrap_err();
        assert!(matches!(err, FeError::Dimension { .. }), "{err}");
    }
}

#[test]
fn setup_is_deterministic_under_seed() {
    let p = params();
    for backend in [Backend::Pairing, Backend::Oracle] {
        let a = setup(&p, backend, 3, 100, Some(42)).unwrap();
        let b = setup(&p, backend, 3, 100, Some(42)).unwrap();
        assert_eq!(encode_public_key(&a.public), encode_public_key(&b.public));
        assert_eq!(encode_secret_key(&a.secret), encode_secret_key(&b.secret));

        let c = setup(&p, backend, 3, 100, Some(43)).unwrap();
        assert_ne!(encode_public_key(&a.public), encode_public_key(&c.public));
    }
}

#[test]
fn setup_supports_five_thousand_features() {
    let p = params();
    let keys = setup(&p, Backend::Pairing, 5000, 100, Some(7)).unwrap();
    assert_eq!(keys.public.n(), 5000);
    // Header (magic 4, version 2, backend 1, curve 1, n 4, x_max 4,
    // digest 16) plus 5001 compressed G1 elements (48 bytes) and 5001
    // compressed G2 elements (96 bytes), each with a 2-byte length prefix.
    let expected = 32 + 5001 * (2 + 48) + 5001 * (2 + 96);
    assert_eq!(encode_public_key(&keys.public).len(), expected);
}

#[test]
fn curve_security_level_is_high_enough() {
    assert!(CurveId::Bls12_381.security_bits() >= 128);
}

#[test]
fn decryption_matches_plaintext_evaluation_on_pairing_backend() {
    let p = params();
    let mut r = rng(100);
    for case in 0..6 {
        let n = r.gen_range(1..=6);
        let d = r.gen_range(1..=3);
        let t = r.gen_range(1..=3);
        let x_max = [1u32, 3, 10][case % 3];
        let form = random_form(&mut r, n, d, t, 7, x_max);
        let keys = setup(&p, Backend::Pairing, n, x_max, Some(200 + case as u64)).unwrap();
        let fks = derive_keys(&p, &keys.secret, &form).unwrap();
        let x = random_x(&mut r, n, x_max);
        let ct = encrypt(&keys.public, &x).unwrap();
        let result = decrypt_all(&p, &ct, &fks, &form, None).unwrap();
        assert_eq!(result.values, form.evaluate(&x).unwrap(), "case {case}");
    }
}

#[test]
fn decryption_matches_plaintext_evaluation_on_oracle_backend() {
    let p = params();
    let mut r = rng(101);
    for case in 0..50 {
        let n = r.gen_range(1..=40);
        let d = r.gen_range(1..=8);
        let t = r.gen_range(1..=5);
        let x_max = [1u32, 10, 100][case % 3];
        let form = random_form(&mut r, n, d, t, 127, x_max);
        let keys = setup(&p, Backend::Oracle, n, x_max, Some(300 + case as u64)).unwrap();
        let fks = derive_keys(&p, &keys.secret, &form).unwrap();
        let x = random_x(&mut r, n, x_max);
        let ct = encrypt(&keys.public, &x).unwrap();
        let result = decrypt_all(&p, &ct, &fks, &form, None).unwrap();
        assert_eq!(result.values, form.evaluate(&x).unwrap(), "case {case}");
    }
}

#[test]
fn single_output_evaluation_recovers_each_value() {
    let p = params();
    let mut r = rng(102);
    let form = random_form(&mut r, 4, 2, 3, 5, 3);
    let keys = setup(&p, Backend::Pairing, 4, 3, Some(9)).unwrap();
    let x = random_x(&mut r, 4, 3);
    let ct = encrypt(&keys.public, &x).unwrap();
    let expected = form.evaluate(&x).unwrap();
    for j in 0..form.outputs() {
        let dk = derive_key(&p, &keys.secret, &form, j).unwrap();
        let eval = decrypt_eval(&ct, &dk, &form).unwrap();
        let value = dlog_recover(&p, &eval.output, dk.bound(), None).unwrap();
        assert_eq!(value, expected[j]);
    }
}

#[test]
fn encryption_is_probabilistic_and_consistent() {
    let p = params();

    let keys = setup(&p, Backend::Oracle, 12, 100, Some(500)).unwrap();
    let mut r = rng(103);
    let x = random_x(&mut r, 12, 100);
    for _ in 0..100 {
        let c1 = encrypt(&keys.public, &x).unwrap();
        let c2 = encrypt(&keys.public, &x).unwrap();
        assert_ne!(
            fe_scheme::encode_ciphertext(&c1),
            fe_scheme::encode_ciphertext(&c2)
        );
    }

    let keys = setup(&p, Backend::Pairing, 3, 10, Some(501)).unwrap();
    let form = random_form(&mut r, 3, 2, 2, 5, 10);
    let fks = derive_keys(&p, &keys.secret, &form).unwrap();
    let x = random_x(&mut r, 3, 10);
    let expected = form.evaluate(&x).unwrap();
    let mut previous: Option<Vec<u8>> = None;
    for _ in 0..3 {
        let ct = encrypt(&keys.public, &x).unwrap();
        let bytes = fe_scheme::encode_ciphertext(&ct);
        if let Some(prev) = previous.replace(bytes.clone()) {
            assert_ne!(prev, bytes);
        }
        let result = decrypt_all(&p, &ct, &fks, &form, None).unwrap();
        assert_eq!(result.values, expected);
    }
}

#[test]
fn out_of_range_entry_is_rejected() {
    let p = params();
    let keys = setup(&p, Backend::Pairing, 3, 100, Some(2)).unwrap();
    let err = encrypt(&keys.public, &[5, 101, 0]).unwrap_err();
    match err {
        FeError::OutOfRangeEntry { index, value, max } => {
            assert_eq!((index, value, max), (1, 101, 100));
        }
        other => panic!("unexpected error: {other}"),
    }
}

#[test]
fn wrong_vector_length_is_rejected() {
    let p = params();
    let keys = setup(&p, Backend::Oracle, 3, 100, Some(3)).unwrap();
    assert!(matches!(
        encrypt(&keys.public, &[1, 2]),
        Err(FeError::Dimension { .. })
    ));
}

#[test]
fn key_from_different_setup_is_rejected() {
    let p = params();
    let mut r = rng(104);
    let form = random_form(&mut r, 3, 2, 1, 3, 5);
    let keys_a = setup(&p, Backend::Pairing, 3, 5, Some(10)).unwrap();
    let keys_b = setup(&p, Backend::Pairing, 3, 5, Some(11)).unwrap();
    let dk_b = derive_key(&p, &keys_b.secret, &form, 0).unwrap();
    let ct_a = encrypt(&keys_a.public, &[1, 2, 3]).unwrap();
    let err = decrypt_eval(&ct_a, &dk_b, &form).unwrap_err();
    assert!(matches!(err, FeError::KeyCiphertextMismatch { .. }), "{err}");
}

#[test]
fn mixing_backends_is_rejected() {
    let p = params();
    let mut r = rng(105);
    let form = random_form(&mut r, 3, 2, 1, 3, 5);
    let pairing = setup(&p, Backend::Pairing, 3, 5, Some(12)).unwrap();
    let oracle = setup(&p, Backend::Oracle, 3, 5, Some(12)).unwrap();
    let dk = derive_key(&p, &oracle.secret, &form, 0).unwrap();
    let ct = encrypt(&pairing.public, &[1, 2, 3]).unwrap();
    let err = decrypt_eval(&ct, &dk, &form).unwrap_err();
    assert!(matches!(err, FeError::KeyCiphertextMismatch { .. }), "{err}");
}

#[test]
fn key_bound_to_one_form_digest() {
    let p = params();
    let form_a = QuadraticForm::new(
        IntMatrix::from_rows(&[vec![1, 2, 0], vec![0, 1, 1]]).unwrap(),
        IntMatrix::from_rows(&[vec![1, 1]]).unwrap(),
        5,
    )
    .unwrap();
    let form_b = QuadraticForm::new(
        IntMatrix::from_rows(&[vec![1, 2, 0], vec![0, 1, 2]]).unwrap(),
        IntMatrix::from_rows(&[vec![1, 1]]).unwrap(),
        5,
    )
    .unwrap();
    let keys = setup(&p, Backend::Oracle, 2, 5, Some(13)).unwrap();
    let dk = derive_key(&p, &keys.secret, &form_a, 0).unwrap();
    let ct = encrypt(&keys.public, &[1, 2]).unwrap();
    assert!(decrypt_eval(&ct, &dk, &form_a).is_ok());
    let err = decrypt_eval(&ct, &dk, &form_b).unwrap_err();
    assert!(matches!(err, FeError::KeyCiphertextMismatch { .. }), "{err}");
}

#[test]
fn decrypt_all_requires_ordered_key_cover() {
    let p = params();
    let mut r = rng(106);
    let form = random_form(&mut r, 3, 2, 2, 3, 5);
    let keys = setup(&p, Backend::Oracle, 3, 5, Some(14)).unwrap();
    let fks = derive_keys(&p, &keys.secret, &form).unwrap();
    let ct = encrypt(&keys.public, &[1, 2, 3]).unwrap();

    let swapped: Vec<_> = fks.iter().rev().cloned().collect();
    assert!(matches!(
        decrypt_all(&p, &ct, &swapped, &form, None),
        Err(FeError::Dimension { .. })
    ));

    assert!(matches!(
        decrypt_all(&p, &ct, &fks[..1], &form, None),
        Err(FeError::Dimension { .. })
    ));
}

#[test]
fn bound_soundness_over_random_inputs() {
    let mut r = rng(107);
    for case in 0..20 {
        let n = r.gen_range(1..=12);
        let d = r.gen_range(1..=5);
        let t = r.gen_range(1..=3);
        let x_max = [1u32, 10, 100][case % 3];
        let form = random_form(&mut r, n, d, t, 127, x_max);
        let bounds: Vec<u128> = (0..t)
            .map(|j| form.certified_bound(j, u128::MAX).unwrap())
            .collect();
        for _ in 0..500 {
            let x = random_x(&mut r, n, x_max);
            let values = form.evaluate(&x).unwrap();
            for (value, bound) in values.iter().zip(&bounds) {
                assert!(
                    value.unsigned_abs() <= *bound,
                    "|{value}| exceeds certified bound {bound} (case {case})"
                );
            }
        }
    }
}

#[test]
fn corner_point_search_respects_certified_bound() {
    let mut r = rng(108);
    let n = 50;
    let x_max = 10u32;
    let form = random_form(&mut r, n, 4, 2, 7, x_max);
    let bounds: Vec<u128> = (0..2)
        .map(|j| form.certified_bound(j, u128::MAX).unwrap())
        .collect();
    let mut empirical = vec![0u128; 2];
    for _ in 0..2000 {
        let corner: Vec<u32> = (0..n)
            .map(|_| if r.gen_bool(0.5) { 0 } else { x_max })
            .collect();
        let values = form.evaluate(&corner).unwrap();
        for (slot, value) in empirical.iter_mut().zip(&values) {
            *slot = (*slot).max(value.unsigned_abs());
        }
    }
    for (max, bound) in empirical.iter().zip(&bounds) {
        assert!(max <= bound, "corner search found {max} above bound {bound}");
    }
}

#[test]
fn nonnegative_form_attains_its_bound_at_the_top_corner() {
    let p_rows = vec![vec![2i64, 3, 1], vec![1, 0, 4]];
    let w2_rows = vec![vec![5i64, 2]];
    let x_max = 10u32;
    let form = QuadraticForm::new(
        IntMatrix::from_rows(&p_rows).unwrap(),
        IntMatrix::from_rows(&w2_rows).unwrap(),
        x_max,
    )
    .unwrap();
    let bound = form.certified_bound(0, u128::MAX).unwrap();
    let top = vec![x_max; 2];
    let value = form.evaluate(&top).unwrap()[0];
    assert_eq!(value.unsigned_abs(), bound);
}

#[test]
fn zero_row_decrypts_to_identity_and_zero() {
    let p = params();
    let form = QuadraticForm::new(
        IntMatrix::from_rows(&[vec![1, 2], vec![3, 4]]).unwrap(),
        IntMatrix::from_rows(&[vec![0, 0], vec![1, 1]]).unwrap(),
        5,
    )
    .unwrap();
    for backend in [Backend::Pairing, Backend::Oracle] {
        let keys = setup(&p, backend, 1, 5, Some(15)).unwrap();
        let dk0 = derive_key(&p, &keys.secret, &form, 0).unwrap();
        assert_eq!(dk0.bound(), 0);
        let ct = encrypt(&keys.public, &[3]).unwrap();
        let eval = decrypt_eval(&ct, &dk0, &form).unwrap();
        assert!(eval.output.is_identity());
        assert_eq!(dlog_recover(&p, &eval.output, 0, None).unwrap(), 0);
    }
}

#[test]
fn all_zero_model_decrypts_to_zero_vector() {
    let p = params();
    let form = QuadraticForm::new(
        IntMatrix::from_rows(&[vec![0, 0, 0], vec![0, 0, 0]]).unwrap(),
        IntMatrix::from_rows(&[vec![0, 0], vec![0, 0], vec![0, 0]]).unwrap(),
        100,
    )
    .unwrap();
    let keys = setup(&p, Backend::Pairing, 2, 100, Some(16)).unwrap();
    let fks = derive_keys(&p, &keys.secret, &form).unwrap();
    let ct = encrypt(&keys.public, &[100, 50]).unwrap();
    let result = decrypt_all(&p, &ct, &fks, &form, None).unwrap();
    assert_eq!(result.values, vec![0, 0, 0]);
}

#[test]
fn derive_rejects_bounds_beyond_capacity() {
    let mut p = params();
    p.dlog_capacity = 1000;
    let mut r = rng(109);
    let form = random_form(&mut r, 5, 3, 1, 127, 100);
    let keys = setup(&p, Backend::Pairing, 5, 100, Some(17)).unwrap();
    let err = derive_key(&p, &keys.secret, &form, 0).unwrap_err();
    assert!(matches!(err, FeError::BoundOverflow { .. }), "{err}");
}

#[test]
fn derive_rejects_range_narrower_than_setup() {
    let p = params();
    let mut r = rng(110);
    let form = random_form(&mut r, 3, 2, 1, 3, 5);
    let keys = setup(&p, Backend::Oracle, 3, 100, Some(18)).unwrap();
    let err = derive_key(&p, &keys.secret, &form, 0).unwrap_err();
    assert!(matches!(err, FeError::Dimension { .. }), "{err}");
}

#[test]
fn decrypt_reports_phase_timings() {
    let p = params();
    let mut r = rng(111);
    let form = random_form(&mut r, 4, 2, 2, 5, 3);
    let keys = setup(&p, Backend::Pairing, 4, 3, Some(19)).unwrap();
    let fks = derive_keys(&p, &keys.secret, &form).unwrap();
    let ct = encrypt(&keys.public, &[1, 2, 3, 0]).unwrap();
    let result = decrypt_all(&p, &ct, &fks, &form, None).unwrap();
    assert!(result.eval_time.as_nanos() > 0);
    assert!(result.dlog_time.as_nanos() > 0);
}
