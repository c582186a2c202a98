//! In-memory state for the two sides of the demo and the operations they
//! expose. The sender side holds only the public key and the vocabulary and
//! can encrypt; the server side adds the model, the functional keys, and the
//! recovery table and can classify. Classification never touches a plaintext
//! feature vector; it works from functional-key decryptions alone.

use std::time::Instant;

use fe_scheme::serial::{decode_ciphertext, decode_functional_key, decode_public_key};
use fe_scheme::{
    decrypt_all, encrypt, Backend, DlogTable, FunctionalKey, GroupParams, IntMatrix, PublicKey,
    QuadraticForm,
};
use quad_net::model_io::ModelFile;
use quad_net::quantize::QuantizedEncryptedPart;
use quad_net::{forward::predict_from_intermediate, train::hex};
use text_pipeline::{preprocess, vectorize, FeatureVector, RawEmail, Vocabulary};

use crate::config::PipelineConfig;
use crate::envelope::Envelope;
use crate::error::AppError;
use crate::files;
use crate::manifest::{sha256_file, Manifest};
use crate::record::ClassificationRecord;

/// What an encrypting client holds: public key material and the shared
/// vocabulary, nothing that could decrypt or classify.
#[derive(Debug)]
pub struct SenderArtifacts {
    pub backend: Backend,
    pub x_max: u32,
    pub mpk: PublicKey,
    /// File digest of the public key artifact, echoed in envelopes.
    pub mpk_sha256: String,
    pub vocab: Vocabulary,
    pub vocab_sha256: String,
}

impl SenderArtifacts {
    pub fn load(cfg: &PipelineConfig) -> Result<SenderArtifacts, AppError> {
        let manifest = Manifest::require(&cfg.artifacts_dir, "spamfilter encrypt")?;
        manifest.verify_config(&cfg.digest())?;

        let vocab_path = cfg.artifact(files::VOCAB);
        manifest.verify_file("vocab_sha256", &vocab_path, "spamfilter prepare")?;
        let vocab = text_pipeline::artifacts::read_vocabulary(&vocab_path)?;
        let vocab_sha256 = sha256_file(&vocab_path)?;

        let mpk_path = cfg.artifact(files::MPK);
        manifest.verify_file("mpk_sha256", &mpk_path, "spamfilter keygen")?;
        let bytes = std::fs::read(&mpk_path).map_err(|e| AppError::io(mpk_path.display(), e))?;
        let mpk = decode_public_key(&bytes)?;
        let mpk_sha256 = sha256_file(&mpk_path)?;
        if mpk.backend() != cfg.backend {
            return Err(AppError::DigestMismatch {
                artifact: mpk_path.display().to_string(),
                expected: format!("backend {}", cfg.backend.name()),
                found: format!("backend {}", mpk.backend().name()),
            });
        }
        if mpk.n() != vocab.len() || mpk.x_max() != cfg.x_max {
            return Err(AppError::DigestMismatch {
                artifact: mpk_path.display().to_string(),
                expected: format!("n={} x_max={}", vocab.len(), cfg.x_max),
                found: format!("n={} x_max={}", mpk.n(), mpk.x_max()),
            });
        }

        Ok(SenderArtifacts {
            backend: cfg.backend,
            x_max: cfg.x_max,
            mpk,
            mpk_sha256,
            vocab,
            vocab_sha256,
        })
    }

    /// Tokenizes, vectorizes, clamps, and encrypts one email.
    pub fn encrypt_email(&self, raw: &RawEmail) -> Result<Envelope, AppError> {
        let tokenized = preprocess(raw)?;
        let features = vectorize(&tokenized, &self.vocab);
        let counts = clamp_counts(&features, self.x_max);
        let start = Instant::now();
        let ct = encrypt(&self.mpk, &counts)?;
        let encrypt_nanos = start.elapsed().as_nanos() as u64;
        Ok(Envelope {
            email_id: raw.id.clone(),
            backend: self.backend,
            mpk_sha256: self.mpk_sha256.clone(),
            vocab_sha256: self.vocab_sha256.clone(),
            encrypt_nanos,
            ciphertext: fe_scheme::serial::encode_ciphertext(&ct),
        })
    }
}

/// Everything the classification side holds. Immutable once loaded, so the
/// HTTP service shares one instance across requests.
#[derive(Debug)]
pub struct ServerArtifacts {
    pub sender: SenderArtifacts,
    pub config_digest: String,
    pub group: GroupParams,
    pub model: ModelFile,
    pub form: QuadraticForm,
    pub keys: Vec<FunctionalKey>,
    pub table: Option<DlogTable>,
}

impl ServerArtifacts {
    /// Loads and cross-checks every artifact classification depends on.
    pub fn load(cfg: &PipelineConfig) -> Result<ServerArtifacts, AppError> {
        let sender = SenderArtifacts::load(cfg)?;
        let manifest = Manifest::require(&cfg.artifacts_dir, "spamfilter classify")?;
        let config_digest = cfg.digest();

        let model_path = cfg.artifact(files::MODEL_Q);
        manifest.verify_file("model_q_sha256", &model_path, "spamfilter quantize")?;
        let model = ModelFile::load(&model_path)?;
        if model.config_digest != config_digest {
            return Err(AppError::DigestMismatch {
                artifact: model_path.display().to_string(),
                expected: config_digest,
                found: model.config_digest,
            });
        }
        let quantized = model.quantized.clone().ok_or_else(|| AppError::MissingArtifact {
            path: model_path.display().to_string(),
            hint: "run `spamfilter quantize` first".to_string(),
        })?;
        let form = quantized_form(&quantized, cfg.x_max)?;

        let mut keys = Vec::with_capacity(form.outputs());
        for j in 0..form.outputs() {
            let key_path = cfg.artifact(&files::key_file(j));
            manifest.verify_file(&files::key_manifest_entry(j), &key_path, "spamfilter keygen")?;
            let bytes = std::fs::read(&key_path).map_err(|e| AppError::io(key_path.display(), e))?;
            let key = decode_functional_key(&bytes)?;
            if key.index() != j || key.form_digest() != form.output_digest(j) {
                return Err(AppError::DigestMismatch {
                    artifact: key_path.display().to_string(),
                    expected: hex(&form.output_digest(j)),
                    found: hex(&key.form_digest()),
                });
            }
            keys.push(key);
        }

        let table = match manifest.get("table_sha256") {
            Some(_) => {
                let table_path = cfg.artifact(files::TABLE);
                manifest.verify_file("table_sha256", &table_path, "spamfilter keygen")?;
                Some(DlogTable::load(&table_path)?)
            }
            None => None,
        };

        Ok(ServerArtifacts {
            sender,
            config_digest,
            group: cfg.group.clone(),
            model,
            form,
            keys,
            table,
        })
    }

    fn quantized(&self) -> &QuantizedEncryptedPart {
        self.model.quantized.as_ref().expect("load verified the quantized part")
    }

    /// Decrypts the envelope's functional outputs and finishes the forward
    /// pass on the plaintext part of the network.
    pub fn classify_envelope(&self, env: &Envelope) -> Result<ClassificationRecord, AppError> {
        if env.mpk_sha256 != self.sender.mpk_sha256 {
            return Err(AppError::DigestMismatch {
                artifact: format!("envelope {} public key reference", env.email_id),
                expected: self.sender.mpk_sha256.clone(),
                found: env.mpk_sha256.clone(),
            });
        }
        if env.vocab_sha256 != self.sender.vocab_sha256 {
            return Err(AppError::DigestMismatch {
                artifact: format!("envelope {} vocabulary reference", env.email_id),
                expected: self.sender.vocab_sha256.clone(),
                found: env.vocab_sha256.clone(),
            });
        }
        let ct = decode_ciphertext(&env.ciphertext)?;
        let result = decrypt_all(&self.group, &ct, &self.keys, &self.form, self.table.as_ref())?;

        let qp = self.quantized();
        let start = Instant::now();
        let prediction =
            predict_from_intermediate(&result.values, (qp.scale_p, qp.scale_w2), &self.model.params)?;
        let plaintext_nanos = start.elapsed().as_nanos() as u64;

        Ok(ClassificationRecord {
            email_id: env.email_id.clone(),
            label: prediction.label,
            backend: self.sender.backend,
            spam_prob: prediction.probs[1],
            encrypt_nanos: env.encrypt_nanos,
            evaluate_nanos: result.eval_time.as_nanos() as u64,
            dlog_nanos: result.dlog_time.as_nanos() as u64,
            plaintext_nanos,
        })
    }
}

/// Builds the quadratic form the FE layer certifies from the quantized
/// matrices.
pub fn quantized_form(qp: &QuantizedEncryptedPart, x_max: u32) -> Result<QuadraticForm, AppError> {
    let p_rows: Vec<Vec<i64>> = qp
        .p_q
        .rows()
        .into_iter()
        .map(|row| row.iter().map(|&v| i64::from(v)).collect())
        .collect();
    let w2_rows: Vec<Vec<i64>> = qp
        .w2_q
        .rows()
        .into_iter()
        .map(|row| row.iter().map(|&v| i64::from(v)).collect())
        .collect();
    Ok(QuadraticForm::new(IntMatrix::from_rows(&p_rows)?, IntMatrix::from_rows(&w2_rows)?, x_max)?)
}

/// Saturates feature counts at the configured ceiling. Applied everywhere a
/// feature vector is produced, so the float reference path, the quantized
/// plaintext path, and the encrypted path all see identical inputs.
pub fn clamp_counts(features: &FeatureVector, x_max: u32) -> Vec<u32> {
    features.counts.iter().map(|&c| c.min(x_max)).collect()
}
