//! Pipeline commands from raw corpus to classified email: prepare, train,
//! quantize, keygen, encrypt, classify. Each command verifies the digests of
//! every artifact it consumes and records the digests of every artifact it
//! produces, so a tampered or stale file stops the chain with a structured
//! error instead of propagating garbage.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use fe_scheme::serial::{encode_functional_key, encode_public_key};
use fe_scheme::{derive_keys, precompute_table, setup, Backend, FeError};
use quad_net::forward::{forward_encryptedpart_int, forward_float, predict_from_intermediate};
use quad_net::model_io::ModelFile;
use quad_net::quantize::quantize;
use quad_net::train::{retrain_plaintext_part, train};
use text_pipeline::artifacts::{
    read_corpus, read_split, read_vocabulary, write_corpus, write_split, write_vocabulary,
};
use text_pipeline::synth::SynthConfig;
use text_pipeline::{
    build_vocabulary, preprocess, split_stratified, vectorize, DatasetSplit, FeatureVector, Label,
    PipelineError, TokenizedEmail, Vocabulary,
};

use crate::classify::{clamp_counts, quantized_form, SenderArtifacts, ServerArtifacts};
use crate::config::{DatasetRoot, PipelineConfig};
use crate::envelope::Envelope;
use crate::error::AppError;
use crate::files;
use crate::manifest::Manifest;
use crate::record::ClassificationRecord;

/// Loads the corpus, tokenizes it, builds the vocabulary, and writes the
/// stratified split. Deterministic: re-running over the same inputs yields
/// byte-identical artifacts.
pub fn cmd_prepare(cfg: &PipelineConfig) -> Result<String, AppError> {
    fs::create_dir_all(&cfg.artifacts_dir)
        .map_err(|e| AppError::io(cfg.artifacts_dir.display(), e))?;

    let (raw, origin) = match &cfg.dataset {
        DatasetRoot::Dir(root) => {
            if !root.is_dir() {
                return Err(AppError::MissingDataset { root: root.display().to_string() });
            }
            let emails = text_pipeline::corpus::load_dir(root)?;
            if emails.is_empty() {
                return Err(AppError::MissingDataset { root: root.display().to_string() });
            }
            (emails, format!("dir {}", root.display()))
        }
        DatasetRoot::Synthetic { docs } => {
            let synth = SynthConfig { docs: *docs, seed: cfg.split_seed, ..SynthConfig::default() };
            (text_pipeline::synth::generate(&synth), format!("synthetic ({docs} docs)"))
        }
    };

    let total = raw.len();
    let mut corpus = Vec::with_capacity(total);
    let mut rejected = 0usize;
    for email in &raw {
        match preprocess(email) {
            Ok(tokenized) => corpus.push(tokenized),
            Err(PipelineError::Rejected { .. }) => rejected += 1,
            Err(e) => return Err(e.into()),
        }
    }
    let mut per_class = [0usize; 2];
    for email in &corpus {
        let label = email.label.ok_or_else(|| {
            AppError::usage(format!("email {} has no label; prepare needs a labeled corpus", email.id))
        })?;
        per_class[label.index()] += 1;
    }

    write_corpus(&cfg.artifact(files::CORPUS), &corpus)?;
    let full = build_vocabulary(&corpus)?;
    let vocab = full.select_features(cfg.n)?;
    write_vocabulary(&cfg.artifact(files::VOCAB), &vocab)?;

    let ids: Vec<(String, Label)> = corpus
        .iter()
        .map(|email| (email.id.clone(), email.label.expect("checked above")))
        .collect();
    let (train_part, test_part) = split_stratified(ids, cfg.split_ratio, cfg.split_seed)?;
    let train_ids: Vec<String> = train_part.into_iter().map(|(id, _)| id).collect();
    let test_ids: Vec<String> = test_part.into_iter().map(|(id, _)| id).collect();
    write_split(&cfg.artifact(files::SPLIT), &train_ids, &test_ids, cfg.split_ratio, cfg.split_seed)?;

    let mut report = String::new();
    let _ = writeln!(report, "prepare report");
    let _ = writeln!(report, "config_digest: {}", cfg.digest());
    let _ = writeln!(report, "dataset: {origin}");
    let _ = writeln!(report, "emails_total: {total}");
    let _ = writeln!(report, "emails_rejected: {rejected}");
    let _ = writeln!(report, "emails_kept: {}", corpus.len());
    let _ = writeln!(report, "ham: {}", per_class[Label::Ham.index()]);
    let _ = writeln!(report, "spam: {}", per_class[Label::Spam.index()]);
    let _ = writeln!(report, "vocabulary_full: {}", full.len());
    let _ = writeln!(report, "vocabulary_selected: {}", vocab.len());
    let _ = writeln!(report, "train: {}", train_ids.len());
    let _ = writeln!(report, "test: {}", test_ids.len());
    let report_path = cfg.artifact(files::PREPARE_REPORT);
    fs::write(&report_path, &report).map_err(|e| AppError::io(report_path.display(), e))?;

    let mut manifest = Manifest::open(&cfg.artifacts_dir)?;
    manifest.remove_prefixes(&["model", "key_", "mpk", "table"]);
    manifest.set("config_digest", cfg.digest());
    manifest.record_file("corpus_sha256", &cfg.artifact(files::CORPUS))?;
    manifest.record_file("vocab_sha256", &cfg.artifact(files::VOCAB))?;
    manifest.record_file("split_sha256", &cfg.artifact(files::SPLIT))?;
    manifest.record_file("prepare_report_sha256", &report_path)?;
    manifest.save()?;
    Ok(report)
}

/// Prepared artifacts read back into memory.
pub struct Prepared {
    pub corpus: Vec<TokenizedEmail>,
    pub vocab: Vocabulary,
    pub train_ids: Vec<String>,
    pub test_ids: Vec<String>,
}

impl Prepared {
    /// Verifies the prepare artifacts against the manifest and loads them.
    pub fn load(cfg: &PipelineConfig, manifest: &Manifest) -> Result<Prepared, AppError> {
        let corpus_path = cfg.artifact(files::CORPUS);
        manifest.verify_file("corpus_sha256", &corpus_path, "spamfilter prepare")?;
        let vocab_path = cfg.artifact(files::VOCAB);
        manifest.verify_file("vocab_sha256", &vocab_path, "spamfilter prepare")?;
        let split_path = cfg.artifact(files::SPLIT);
        manifest.verify_file("split_sha256", &split_path, "spamfilter prepare")?;
        let corpus = read_corpus(&corpus_path)?;
        let vocab = read_vocabulary(&vocab_path)?;
        let (train_ids, test_ids) = read_split(&split_path)?;
        Ok(Prepared { corpus, vocab, train_ids, test_ids })
    }

    /// Vectorizes the referenced emails in split order, clamping counts.
    pub fn vectorized(
        &self,
        ids: &[String],
        x_max: u32,
    ) -> Result<Vec<(FeatureVector, Label)>, AppError> {
        let by_id: HashMap<&str, &TokenizedEmail> =
            self.corpus.iter().map(|e| (e.id.as_str(), e)).collect();
        ids.iter()
            .map(|id| {
                let email = *by_id.get(id.as_str()).ok_or_else(|| {
                    AppError::format("split", 0, format!("unknown email id {id:?}"))
                })?;
                let label = email.label.ok_or_else(|| {
                    AppError::format("corpus", 0, format!("email {id:?} has no label"))
                })?;
                let features = vectorize(email, &self.vocab);
                Ok((FeatureVector { counts: clamp_counts(&features, x_max) }, label))
            })
            .collect()
    }

    pub fn dataset_split(&self, cfg: &PipelineConfig) -> Result<DatasetSplit, AppError> {
        Ok(DatasetSplit {
            train: self.vectorized(&self.train_ids, cfg.x_max)?,
            test: self.vectorized(&self.test_ids, cfg.x_max)?,
            seed: cfg.split_seed,
            ratio: cfg.split_ratio,
        })
    }
}

/// Trains the float network and writes the reference model.
pub fn cmd_train(cfg: &PipelineConfig) -> Result<String, AppError> {
    let mut manifest = Manifest::require(&cfg.artifacts_dir, "spamfilter train")?;
    manifest.verify_config(&cfg.digest())?;
    let prepared = Prepared::load(cfg, &manifest)?;
    let split = prepared.dataset_split(cfg)?;

    let trained = train(&split, &cfg.train)?;
    let model = ModelFile {
        params: trained.params,
        quantized: None,
        train_seed: cfg.train.seed,
        config_digest: cfg.digest(),
    };
    let model_path = cfg.artifact(files::MODEL);
    model.save(&model_path)?;

    let train_acc = float_accuracy(&model, &split.train)?;
    let test_acc = float_accuracy(&model, &split.test)?;

    manifest.remove_prefixes(&["model_q", "key_", "mpk", "table"]);
    manifest.record_file("model_sha256", &model_path)?;
    manifest.save()?;

    let final_loss = trained.epoch_losses.last().copied().unwrap_or(f64::NAN);
    Ok(format!(
        "trained {} epochs, final loss {final_loss:.4}\n\
         float accuracy: train {train_acc:.4}, test {test_acc:.4}\n\
         wrote {}\n",
        cfg.train.epochs,
        model_path.display(),
    ))
}

/// Quantizes the encrypted part and retrains the plaintext part against it.
pub fn cmd_quantize(cfg: &PipelineConfig) -> Result<String, AppError> {
    let mut manifest = Manifest::require(&cfg.artifacts_dir, "spamfilter quantize")?;
    manifest.verify_config(&cfg.digest())?;
    let model_path = cfg.artifact(files::MODEL);
    manifest.verify_file("model_sha256", &model_path, "spamfilter train")?;
    let base = ModelFile::load(&model_path)?;
    if base.config_digest != cfg.digest() {
        return Err(AppError::DigestMismatch {
            artifact: model_path.display().to_string(),
            expected: cfg.digest(),
            found: base.config_digest,
        });
    }
    let prepared = Prepared::load(cfg, &manifest)?;
    let split = prepared.dataset_split(cfg)?;

    let qp = quantize(&base.params, cfg.bit_width);
    let mut params = base.params.clone();
    let losses = retrain_plaintext_part(&mut params, &qp, &split.train, &cfg.train)?;
    let model_q = ModelFile {
        params,
        quantized: Some(qp),
        train_seed: cfg.train.seed,
        config_digest: cfg.digest(),
    };
    let model_q_path = cfg.artifact(files::MODEL_Q);
    model_q.save(&model_q_path)?;

    let train_acc = quantized_accuracy(&model_q, &split.train)?;
    let test_acc = quantized_accuracy(&model_q, &split.test)?;

    manifest.remove_prefixes(&["key_", "mpk", "table"]);
    manifest.record_file("model_q_sha256", &model_q_path)?;
    manifest.save()?;

    let final_loss = losses.last().copied().unwrap_or(f64::NAN);
    Ok(format!(
        "quantized to {} bits, retrained plaintext part (final loss {final_loss:.4})\n\
         quantized accuracy: train {train_acc:.4}, test {test_acc:.4}\n\
         wrote {}\n",
        cfg.bit_width,
        model_q_path.display(),
    ))
}

/// Runs FE setup for the quantized form, writes the public key and one
/// functional key per output, and precomputes the recovery table on the
/// pairing backend.
pub fn cmd_keygen(cfg: &PipelineConfig) -> Result<String, AppError> {
    let mut manifest = Manifest::require(&cfg.artifacts_dir, "spamfilter keygen")?;
    manifest.verify_config(&cfg.digest())?;
    let model_q_path = cfg.artifact(files::MODEL_Q);
    manifest.verify_file("model_q_sha256", &model_q_path, "spamfilter quantize")?;
    let model = ModelFile::load(&model_q_path)?;
    if model.config_digest != cfg.digest() {
        return Err(AppError::DigestMismatch {
            artifact: model_q_path.display().to_string(),
            expected: cfg.digest(),
            found: model.config_digest,
        });
    }
    let qp = model.quantized.as_ref().ok_or_else(|| AppError::MissingArtifact {
        path: model_q_path.display().to_string(),
        hint: "run `spamfilter quantize` first".to_string(),
    })?;
    let form = quantized_form(qp, cfg.x_max)?;

    let master = setup(&cfg.group, cfg.backend, form.n(), cfg.x_max, Some(cfg.keygen_seed))?;
    let keys = derive_keys(&cfg.group, &master.secret, &form).map_err(|e| match e {
        FeError::BoundOverflow { bound, capacity } => AppError::BoundOverflow { bound, capacity },
        other => other.into(),
    })?;

    manifest.remove_prefixes(&["key_", "mpk", "table"]);
    let mpk_path = cfg.artifact(files::MPK);
    fs::write(&mpk_path, encode_public_key(&master.public))
        .map_err(|e| AppError::io(mpk_path.display(), e))?;
    manifest.record_file("mpk_sha256", &mpk_path)?;
    for key in &keys {
        let key_path = cfg.artifact(&files::key_file(key.index()));
        fs::write(&key_path, encode_functional_key(key))
            .map_err(|e| AppError::io(key_path.display(), e))?;
        manifest.record_file(&files::key_manifest_entry(key.index()), &key_path)?;
    }
    let max_bound = keys.iter().map(|k| k.bound()).max().unwrap_or(0);

    let table_path = cfg.artifact(files::TABLE);
    let mut report = format!(
        "derived {} functional keys (max certified bound {max_bound}, capacity {})\n\
         wrote {}\n",
        keys.len(),
        cfg.group.dlog_capacity,
        mpk_path.display(),
    );
    match cfg.backend {
        Backend::Pairing => {
            precompute_table(&cfg.group, max_bound, &table_path)?;
            manifest.record_file("table_sha256", &table_path)?;
            let _ = writeln!(report, "wrote {}", table_path.display());
        }
        Backend::Oracle => {
            if table_path.exists() {
                fs::remove_file(&table_path).map_err(|e| AppError::io(table_path.display(), e))?;
            }
        }
    }
    manifest.save()?;
    Ok(report)
}

/// Encrypts one email file into a ciphertext envelope.
pub fn cmd_encrypt(
    cfg: &PipelineConfig,
    email_path: &Path,
    out: Option<&Path>,
) -> Result<String, AppError> {
    let sender = SenderArtifacts::load(cfg)?;
    let raw = text_pipeline::corpus::load_unlabeled(email_path)?;
    let envelope = sender.encrypt_email(&raw)?;
    let out_path: PathBuf = match out {
        Some(path) => path.to_path_buf(),
        None => {
            let stem = email_path.file_stem().and_then(|s| s.to_str()).unwrap_or("email");
            cfg.artifact(&format!("{stem}.fe"))
        }
    };
    envelope.save(&out_path)?;
    Ok(format!(
        "encrypted {} ({} ciphertext bytes, {} ns)\nwrote {}\n",
        envelope.email_id,
        envelope.ciphertext.len(),
        envelope.encrypt_nanos,
        out_path.display(),
    ))
}

/// Classifies a ciphertext envelope. The caller turns the record's label
/// into the process exit code.
pub fn cmd_classify(cfg: &PipelineConfig, ct_path: &Path) -> Result<ClassificationRecord, AppError> {
    let artifacts = ServerArtifacts::load(cfg)?;
    let envelope = Envelope::load(ct_path)?;
    artifacts.classify_envelope(&envelope)
}

/// Share of correctly labeled examples under the float forward pass.
pub fn float_accuracy(
    model: &ModelFile,
    data: &[(FeatureVector, Label)],
) -> Result<f64, AppError> {
    let mut hits = 0usize;
    for (features, label) in data {
        if forward_float(features, &model.params)?.label == *label {
            hits += 1;
        }
    }
    Ok(hits as f64 / data.len().max(1) as f64)
}

/// Share of correctly labeled examples under the integer encrypted-part
/// path, the same arithmetic the FE decryption reproduces.
pub fn quantized_accuracy(
    model: &ModelFile,
    data: &[(FeatureVector, Label)],
) -> Result<f64, AppError> {
    let qp = model.quantized.as_ref().expect("quantized model required");
    let mut hits = 0usize;
    for (features, label) in data {
        let q = forward_encryptedpart_int(features, qp)?;
        let prediction = predict_from_intermediate(&q, (qp.scale_p, qp.scale_w2), &model.params)?;
        if prediction.label == *label {
            hits += 1;
        }
    }
    Ok(hits as f64 / data.len().max(1) as f64)
}
