//! Size sweep comparing the FE classification path with the additive-HE
//! logistic-regression baseline on one host. Self-contained: generates its
//! own synthetic corpus so sweep sizes are independent of the prepared
//! pipeline artifacts.

use std::fmt::Write as _;
use std::fs;
use std::time::Instant;

use fe_scheme::{decrypt_all, derive_keys, encrypt, setup, Backend, DlogTable, FeError};
use he_baseline::{accuracy, affine_r_squared, bench_roundtrip, keygen, train_lr, LRTrainConfig, TEST_KEY_BITS};
use quad_net::forward::{forward_encryptedpart_int, predict_from_intermediate};
use quad_net::quantize::quantize;
use quad_net::train::{retrain_plaintext_part, train, TrainConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use text_pipeline::synth::SynthConfig;
use text_pipeline::{
    build_vocabulary, preprocess, vectorize, DatasetSplit, FeatureVector, Label, PipelineError,
    TokenizedEmail,
};

use crate::classify::{clamp_counts, quantized_form};
use crate::config::PipelineConfig;
use crate::error::AppError;
use crate::files;
use crate::manifest::Manifest;

#[derive(Debug, Clone)]
pub struct BenchOptions {
    /// Feature sizes to sweep, strictly ascending.
    pub sizes: Vec<usize>,
    /// Test emails timed per size.
    pub emails: usize,
    /// Synthetic corpus size backing the sweep.
    pub docs: usize,
}

/// Small network shape for the sweep; the cost under measurement is the
/// cryptography, which scales with n, not with the network width.
fn bench_train_config(cfg: &PipelineConfig) -> TrainConfig {
    TrainConfig { epochs: 12, d: 8, t: 4, ..cfg.train.clone() }
}

#[derive(Debug, Clone)]
struct FeRow {
    n: usize,
    emails: usize,
    accuracy: f64,
    encrypt_ns: u64,
    evaluate_ns: u64,
    dlog_ns: u64,
    plaintext_ns: u64,
    ciphertext_bytes: usize,
    mismatches: usize,
}

#[derive(Debug, Clone)]
struct HeRow {
    n: usize,
    emails: usize,
    accuracy: f64,
    encrypt_model_ns: u64,
    score_ns: u64,
    decrypt_ns: u64,
    prediction_ns: u64,
}

/// Runs the sweep and writes both timing series under the artifacts
/// directory. Returns the human-readable report for stdout.
pub fn cmd_bench(cfg: &PipelineConfig, opts: &BenchOptions) -> Result<String, AppError> {
    if opts.sizes.is_empty() {
        return Err(AppError::usage("--sizes needs at least one feature count"));
    }
    if !opts.sizes.windows(2).all(|w| w[0] < w[1]) {
        return Err(AppError::usage(format!(
            "--sizes must be strictly ascending, got {:?}",
            opts.sizes
        )));
    }
    if opts.sizes[0] == 0 {
        return Err(AppError::usage("--sizes entries must be at least 1"));
    }
    if opts.docs < 8 {
        return Err(AppError::usage("--docs must be at least 8"));
    }
    let max_size = *opts.sizes.last().expect("sizes is non-empty");

    let synth = SynthConfig {
        docs: opts.docs,
        seed: cfg.split_seed,
        markers_per_class: 150,
        noise_words: max_size,
        ..SynthConfig::default()
    };
    let corpus: Vec<TokenizedEmail> = text_pipeline::synth::generate(&synth)
        .iter()
        .filter_map(|raw| match preprocess(raw) {
            Ok(t) => Some(Ok(t)),
            Err(PipelineError::Rejected { .. }) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<_, _>>()?;
    let full = build_vocabulary(&corpus)?;
    if full.len() < max_size {
        return Err(AppError::usage(format!(
            "corpus yields only {} distinct terms but --sizes asks for {max_size}; raise --docs",
            full.len()
        )));
    }

    let mut rng = ChaCha20Rng::seed_from_u64(cfg.keygen_seed);
    let he_keys = keygen(TEST_KEY_BITS, &mut rng);
    let bench_cfg = bench_train_config(cfg);

    let mut fe_rows = Vec::with_capacity(opts.sizes.len());
    let mut he_rows = Vec::with_capacity(opts.sizes.len());
    for &n in &opts.sizes {
        let vocab = full.select_features(n)?;
        let items: Vec<(FeatureVector, Label)> = corpus
            .iter()
            .map(|email| {
                let features = vectorize(email, &vocab);
                let counts = clamp_counts(&features, cfg.x_max);
                (FeatureVector { counts }, email.label.expect("synthetic emails are labeled"))
            })
            .collect();
        let split = DatasetSplit::new(items, cfg.split_ratio, cfg.split_seed)?;

        fe_rows.push(fe_leg(cfg, &bench_cfg, &split, n, opts.emails)?);

        let lr = train_lr(&split, &LRTrainConfig::default())?;
        let he_acc = accuracy(&lr, &split.test)?;
        let timing = bench_roundtrip(&he_keys, &split, &[n], opts.emails, &mut rng)?
            .pop()
            .expect("one size requested");
        he_rows.push(HeRow {
            n,
            emails: timing.emails,
            accuracy: he_acc,
            encrypt_model_ns: timing.encrypt_model.as_nanos() as u64,
            score_ns: timing.score_per_email.as_nanos() as u64,
            decrypt_ns: timing.decrypt_per_email.as_nanos() as u64,
            prediction_ns: timing.prediction_per_email().as_nanos() as u64,
        });
    }

    fs::create_dir_all(&cfg.artifacts_dir)
        .map_err(|e| AppError::io(cfg.artifacts_dir.display(), e))?;
    let fe_path = cfg.artifact(files::BENCH_FE);
    let mut fe_tsv =
        String::from("n\temails\taccuracy\tencrypt_ns\tevaluate_ns\tdlog_ns\tplaintext_ns\tciphertext_bytes\tmismatches\n");
    for r in &fe_rows {
        let _ = writeln!(
            fe_tsv,
            "{}\t{}\t{:.4}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.n, r.emails, r.accuracy, r.encrypt_ns, r.evaluate_ns, r.dlog_ns, r.plaintext_ns,
            r.ciphertext_bytes, r.mismatches
        );
    }
    fs::write(&fe_path, &fe_tsv).map_err(|e| AppError::io(fe_path.display(), e))?;

    let he_path = cfg.artifact(files::BENCH_HE);
    let mut he_tsv =
        String::from("n\temails\taccuracy\tencrypt_model_ns\tscore_ns\tdecrypt_ns\tprediction_ns\n");
    for r in &he_rows {
        let _ = writeln!(
            he_tsv,
            "{}\t{}\t{:.4}\t{}\t{}\t{}\t{}",
            r.n, r.emails, r.accuracy, r.encrypt_model_ns, r.score_ns, r.decrypt_ns, r.prediction_ns
        );
    }
    fs::write(&he_path, &he_tsv).map_err(|e| AppError::io(he_path.display(), e))?;

    let mut manifest = Manifest::open(&cfg.artifacts_dir)?;
    manifest.record_file("bench_fe_sha256", &fe_path)?;
    manifest.record_file("bench_he_sha256", &he_path)?;
    manifest.save()?;

    let mut report = format!("benchmark over sizes {:?} ({} backend)\n", opts.sizes, cfg.backend.name());
    let _ = writeln!(
        report,
        "{:>6} {:>9} {:>14} {:>14} {:>12} {:>14} {:>9}",
        "n", "fe_acc", "encrypt_ns", "evaluate_ns", "dlog_ns", "plaintext_ns", "he_acc"
    );
    for (fe, he) in fe_rows.iter().zip(&he_rows) {
        let _ = writeln!(
            report,
            "{:>6} {:>9.4} {:>14} {:>14} {:>12} {:>14} {:>9.4}",
            fe.n, fe.accuracy, fe.encrypt_ns, fe.evaluate_ns, fe.dlog_ns, fe.plaintext_ns, he.accuracy
        );
    }
    if fe_rows.iter().any(|r| r.mismatches > 0) {
        let _ = writeln!(report, "WARNING: decrypted outputs disagreed with the integer path");
    }

    if opts.sizes.len() >= 2 {
        let encrypt_points: Vec<(f64, f64)> =
            fe_rows.iter().map(|r| (r.n as f64, r.encrypt_ns as f64)).collect();
        let eval_points: Vec<(f64, f64)> =
            fe_rows.iter().map(|r| (r.n as f64, r.evaluate_ns as f64)).collect();
        let _ = writeln!(
            report,
            "affine fit: encrypt R^2 = {:.4}, evaluate R^2 = {:.4}",
            affine_r_squared(&encrypt_points),
            affine_r_squared(&eval_points)
        );
    } else {
        let _ = writeln!(report, "affine fit omitted (single size)");
    }

    let mut he_faster_everywhere = true;
    for (fe, he) in fe_rows.iter().zip(&he_rows) {
        let fe_pred = fe.evaluate_ns + fe.dlog_ns + fe.plaintext_ns;
        let relation = if he.prediction_ns < fe_pred { "HE faster" } else { "FE faster" };
        he_faster_everywhere &= he.prediction_ns < fe_pred;
        let _ = writeln!(
            report,
            "n={}: FE prediction {} ns vs HE prediction {} ns ({relation})",
            fe.n, fe_pred, he.prediction_ns
        );
    }
    let _ = writeln!(
        report,
        "HE prediction faster at every size: {}",
        if he_faster_everywhere { "yes" } else { "no" }
    );
    let _ = writeln!(report, "wrote {} and {}", fe_path.display(), he_path.display());
    Ok(report)
}

fn fe_leg(
    cfg: &PipelineConfig,
    bench_cfg: &TrainConfig,
    split: &DatasetSplit,
    n: usize,
    emails: usize,
) -> Result<FeRow, AppError> {
    let trained = train(split, bench_cfg)?;
    let qp = quantize(&trained.params, cfg.bit_width);
    let mut params = trained.params;
    retrain_plaintext_part(&mut params, &qp, &split.train, bench_cfg)?;

    let mut hits = 0usize;
    for (features, label) in &split.test {
        let q = forward_encryptedpart_int(features, &qp)?;
        let prediction = predict_from_intermediate(&q, (qp.scale_p, qp.scale_w2), &params)?;
        if prediction.label == *label {
            hits += 1;
        }
    }
    let acc = hits as f64 / split.test.len().max(1) as f64;

    let form = quantized_form(&qp, cfg.x_max)?;
    let master = setup(&cfg.group, cfg.backend, n, cfg.x_max, Some(cfg.keygen_seed))?;
    let keys = derive_keys(&cfg.group, &master.secret, &form).map_err(|e| match e {
        FeError::BoundOverflow { bound, capacity } => AppError::BoundOverflow { bound, capacity },
        other => other.into(),
    })?;
    let max_bound = keys.iter().map(|k| k.bound()).max().unwrap_or(0);
    let table = match cfg.backend {
        Backend::Pairing => Some(DlogTable::build(&cfg.group, max_bound)?),
        Backend::Oracle => None,
    };

    let timed = emails.max(1).min(split.test.len().max(1));
    let mut encrypt_total = 0u128;
    let mut evaluate_total = 0u128;
    let mut dlog_total = 0u128;
    let mut plaintext_total = 0u128;
    let mut ciphertext_bytes = 0usize;
    let mut mismatches = 0usize;
    for (features, _) in split.test.iter().take(timed) {
        let start = Instant::now();
        let ct = encrypt(&master.public, &features.counts)?;
        encrypt_total += start.elapsed().as_nanos();
        ciphertext_bytes = fe_scheme::serial::encode_ciphertext(&ct).len();

        let result = decrypt_all(&cfg.group, &ct, &keys, &form, table.as_ref())?;
        evaluate_total += result.eval_time.as_nanos();
        dlog_total += result.dlog_time.as_nanos();

        let start = Instant::now();
        predict_from_intermediate(&result.values, (qp.scale_p, qp.scale_w2), &params)?;
        plaintext_total += start.elapsed().as_nanos();

        if result.values != forward_encryptedpart_int(features, &qp)? {
            mismatches += 1;
        }
    }

    Ok(FeRow {
        n,
        emails: timed,
        accuracy: acc,
        encrypt_ns: (encrypt_total / timed as u128) as u64,
        evaluate_ns: (evaluate_total / timed as u128) as u64,
        dlog_ns: (dlog_total / timed as u128) as u64,
        plaintext_ns: (plaintext_total / timed as u128) as u64,
        ciphertext_bytes,
        mismatches,
    })
}
