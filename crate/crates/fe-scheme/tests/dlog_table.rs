mod common;

use common::params;
use fe_scheme::{
    decode_table, dlog_recover, encode_table, encode_value, precompute_table, Backend, DlogTable,
    EvalOutput, FeError,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn pairing_value(z: i128) -> EvalOutput {
    encode_value(&params(), Backend::Pairing, z)
}

#[test]
fn small_known_answers() {
    let p = params();
    assert_eq!(dlog_recover(&p, &pairing_value(7), 10, None).unwrap(), 7);
    assert_eq!(dlog_recover(&p, &pairing_value(-10), 10, None).unwrap(), -10);
    assert_eq!(dlog_recover(&p, &pairing_value(0), 10, None).unwrap(), 0);
}

#[test]
fn value_just_past_bound_is_not_in_range() {
    let p = params();
    let err = dlog_recover(&p, &pairing_value(11), 10, None).unwrap_err();
    assert!(matches!(err, FeError::NotInRange { bound: 10 }), "{err}");
    let err = dlog_recover(&p, &pairing_value(-11), 10, None).unwrap_err();
    assert!(matches!(err, FeError::NotInRange { bound: 10 }), "{err}");
}

#[test]
fn zero_bound_checks_identity_directly() {
    let p = params();
    assert_eq!(dlog_recover(&p, &pairing_value(0), 0, None).unwrap(), 0);
    let err = dlog_recover(&p, &pairing_value(1), 0, None).unwrap_err();
    assert!(matches!(err, FeError::NotInRange { bound: 0 }), "{err}");
}

#[test]
fn recovery_is_total_over_a_small_range() {
    let p = params();
    let bound = 200u128;
    let table = DlogTable::build(&p, bound).unwrap();
    for z in -(bound as i128)..=(bound as i128) {
        let elem = pairing_value(z);
        assert_eq!(dlog_recover(&p, &elem, bound, Some(&table)).unwrap(), z);
    }
    // Cold path spot checks across the same range.
    for z in [-200i128, -137, -1, 0, 1, 59, 200] {
        assert_eq!(dlog_recover(&p, &pairing_value(z), bound, None).unwrap(), z);
    }
}

#[test]
fn recovery_is_total_at_ten_thousand() {
    let p = params();
    let bound = 10_000u128;
    let table = DlogTable::build(&p, bound).unwrap();
    for z in -(bound as i128)..=(bound as i128) {
        let elem = pairing_value(z);
        assert_eq!(dlog_recover(&p, &elem, bound, Some(&table)).unwrap(), z, "z = {z}");
    }
}

#[test]
fn bsgs_matches_linear_scan_oracle() {
    let p = params();
    let bound: u128 = 2000;
    let base = match pairing_value(1) {
        EvalOutput::Pairing(g) => g,
        EvalOutput::Oracle(_) => unreachable!(),
    };
    let zero = base - base;
    let mut shift = zero;
    for _ in 0..bound {
        shift += base;
    }
    let table = DlogTable::build(&p, bound).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(21);
    for _ in 0..25 {
        let z = rng.gen_range(-(bound as i128)..=(bound as i128));
        let output = pairing_value(z);
        let elem = match output {
            EvalOutput::Pairing(g) => g,
            EvalOutput::Oracle(_) => unreachable!(),
        };
        // Independent recovery: walk base powers from -bound upward until
        // the shifted target is reached.
        let target = elem + shift;
        let mut cursor = zero;
        let mut linear = None;
        for step in 0..=(2 * bound) {
            if cursor == target {
                linear = Some(step as i128 - bound as i128);
                break;
            }
            cursor += base;
        }
        let linear = linear.expect("linear scan must find the exponent");
        assert_eq!(linear, z);
        assert_eq!(
            dlog_recover(&p, &output, bound, Some(&table)).unwrap(),
            linear
        );
    }
}

#[test]
fn known_answers_at_one_million() {
    let p = params();
    let bound = 1_000_000u128;
    let table = DlogTable::build(&p, bound).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(22);
    for _ in 0..20 {
        let z = rng.gen_range(-(bound as i128)..=(bound as i128));
        assert_eq!(
            dlog_recover(&p, &pairing_value(z), bound, Some(&table)).unwrap(),
            z
        );
    }
}

#[test]
fn warm_recovery_is_at_least_five_times_faster_than_cold() {
    let p = params();
    let bound = 1_000_000u128;
    let table = DlogTable::build(&p, bound).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(23);
    let exponents: Vec<i128> = (0..100)
        .map(|_| rng.gen_range(-(bound as i128)..=(bound as i128)))
        .collect();
    let mut cold = Vec::with_capacity(exponents.len());
    let mut warm = Vec::with_capacity(exponents.len());
    for &z in &exponents {
        let output = pairing_value(z);
        let start = std::time::Instant::now();
        assert_eq!(dlog_recover(&p, &output, bound, None).unwrap(), z);
        cold.push(start.elapsed());
        let start = std::time::Instant::now();
        assert_eq!(dlog_recover(&p, &output, bound, Some(&table)).unwrap(), z);
        warm.push(start.elapsed());
    }
    cold.sort();
    warm.sort();
    let cold_median = cold[cold.len() / 2];
    let warm_median = warm[warm.len() / 2];
    assert!(
        cold_median >= warm_median * 5,
        "cold median {cold_median:?} is not at least 5x the warm median {warm_median:?}"
    );
}

#[test]
fn table_round_trips_through_disk() {
    let p = params();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dlog.qdt");
    let table = precompute_table(&p, 5000, &path).unwrap();
    let reloaded = DlogTable::load(&path).unwrap();
    assert_eq!(encode_table(&table), encode_table(&reloaded));
    assert_eq!(table.content_address(), reloaded.content_address());
    let mut rng = ChaCha20Rng::seed_from_u64(24);
    for _ in 0..10 {
        let z = rng.gen_range(-5000i128..=5000);
        assert_eq!(
            dlog_recover(&p, &pairing_value(z), 5000, Some(&reloaded)).unwrap(),
            z
        );
    }
}

#[test]
fn zero_bound_table_is_empty_with_direct_fallback() {
    let p = params();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.qdt");
    let table = precompute_table(&p, 0, &path).unwrap();
    assert!(table.is_empty());
    assert_eq!(table.m(), 0);
    let reloaded = DlogTable::load(&path).unwrap();
    assert!(reloaded.is_empty());
    assert_eq!(
        dlog_recover(&p, &pairing_value(0), 0, Some(&reloaded)).unwrap(),
        0
    );
}

#[test]
fn disk_budget_is_enforced_before_building() {
    let mut p = params();
    p.table_disk_budget = 100;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("too-big.qdt");
    let start = std::time::Instant::now();
    let err = precompute_table(&p, 1 << 40, &path).unwrap_err();
    assert!(matches!(err, FeError::DiskBudgetExceeded { .. }), "{err}");
    assert!(!path.exists());
    // The budget must be checked up front, long before any baby step is
    // computed; a millisecond-scale failure proves that.
    assert!(start.elapsed() < std::time::Duration::from_secs(1));
}

#[test]
fn content_address_changes_with_bound() {
    let p = params();
    let a = DlogTable::build(&p, 100).unwrap();
    let b = DlogTable::build(&p, 200).unwrap();
    let c = DlogTable::build(&p, 100).unwrap();
    assert_ne!(a.content_address(), b.content_address());
    assert_eq!(a.content_address(), c.content_address());
}

#[test]
fn corrupted_table_base_is_rejected_at_recovery() {
    let p = params();
    let table = DlogTable::build(&p, 50).unwrap();
    let mut bytes = encode_table(&table);
    // Replace the base element with a different valid element: the encoding
    // of e(g1,g2)^2. Offsets: magic 4, version 2, curve 1, reserved 1, m 8,
    // count 8, length prefix 2, then the base bytes.
    let other = match pairing_value(2) {
        EvalOutput::Pairing(g) => g,
        EvalOutput::Oracle(_) => unreachable!(),
    };
    let mut other_bytes = Vec::new();
    ark_serialize::CanonicalSerialize::serialize_compressed(&other, &mut other_bytes).unwrap();
    let offset = 4 + 2 + 1 + 1 + 8 + 8 + 2;
    bytes[offset..offset + other_bytes.len()].copy_from_slice(&other_bytes);
    let doctored = decode_table(&bytes).unwrap();
    let err = dlog_recover(&p, &pairing_value(3), 50, Some(&doctored)).unwrap_err();
    assert!(matches!(err, FeError::InvalidGroupElement { .. }), "{err}");
}

#[test]
fn oracle_outputs_skip_the_group_search() {
    let p = params();
    let inside = EvalOutput::Oracle(-123);
    assert_eq!(dlog_recover(&p, &inside, 200, None).unwrap(), -123);
    let outside = EvalOutput::Oracle(201);
    assert!(matches!(
        dlog_recover(&p, &outside, 200, None),
        Err(FeError::NotInRange { bound: 200 })
    ));
}

#[test]
fn concurrent_lookups_share_one_table() {
    let p = params();
    let bound = 3000u128;
    let table = DlogTable::build(&p, bound).unwrap();
    std::thread::scope(|scope| {
        for t in 0..4i128 {
            let table = &table;
            let p = &p;
            scope.spawn(move || {
                for k in 0..25i128 {
                    let z = t * 700 + k - 1500;
                    assert_eq!(
                        dlog_recover(p, &pairing_value(z), bound, Some(table)).unwrap(),
                        z
                    );
                }
            });
        }
    });
}
