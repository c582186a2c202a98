use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::dlog::{dlog_recover, DlogTable};
use crate::error::FeError;
use crate::form::QuadraticForm;
use crate::group::{Backend, GroupParams};
use crate::keys::{
    compute_mpk_digest, CiphertextVec, CtBody, EvalOutput, FunctionalKey, KeyBody, MasterKeys,
    PkMaterial, PublicKey, SecretKey, SkMaterial,
};
use crate::{oracle, sgp};

/// Discrete-log capacity of the sealed-evaluation backend: values are exact
/// integers, so any bound representable as a signed 128-bit magnitude works.
const ORACLE_CAPACITY: u128 = i128::MAX as u128;

pub(crate) fn backend_capacity(params: &GroupParams, backend: Backend) -> u128 {
    match backend {
        Backend::Pairing => params.dlog_capacity,
        Backend::Oracle => ORACLE_CAPACITY,
    }
}

/// Generates master key material for feature vectors of length `n`.
///
/// Entries of encrypted vectors must lie in `[0, x_max]`. A seed makes the
/// drawn key material reproducible; production use leaves it `None` and
/// draws from the operating system.
pub fn setup(
    params: &GroupParams,
    backend: Backend,
    n: usize,
    x_max: u32,
    seed: Option<u64>,
) -> Result<MasterKeys, FeError> {
    if n == 0 {
        return Err(FeError::dimension(
            "setup",
            "at least one feature".to_string(),
            "n = 0".to_string(),
        ));
    }
    let mut rng = match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    };
    let (pk_material, sk_material) = match backend {
        Backend::Pairing => {
            let (pk, sk) = sgp::setup(n, &mut rng);
            (PkMaterial::Pairing(pk), SkMaterial::Pairing(sk))
        }
        Backend::Oracle => {
            let mut seal_key = [0u8; 32];
            rand::RngCore::fill_bytes(&mut rng, &mut seal_key);
            (
                PkMaterial::Oracle { seal_key },
                SkMaterial::Oracle { seal_key },
            )
        }
    };
    let digest = compute_mpk_digest(backend, params.curve, n, x_max, &pk_material);
    Ok(MasterKeys {
        public: PublicKey {
            backend,
            curve: params.curve,
            n,
            x_max,
            material: pk_material,
            digest,
        },
        secret: SecretKey {
            backend,
            curve: params.curve,
            n,
            x_max,
            material: sk_material,
            mpk_digest: digest,
        },
    })
}

/// Encrypts one feature vector under the public key.
///
/// Encryption draws fresh randomness on every call, so two ciphertexts of
/// the same vector differ byte for byte yet decrypt identically.
pub fn encrypt(mpk: &PublicKey, x: &[u32]) -> Result<CiphertextVec, FeError> {
    if x.len() != mpk.n {
        return Err(FeError::dimension(
            "encrypt",
            format!("{} features", mpk.n),
            format!("{} features", x.len()),
        ));
    }
    for (index, &value) in x.iter().enumerate() {
        if value > mpk.x_max {
            return Err(FeError::OutOfRangeEntry {
                index,
                value: u64::from(value),
                max: u64::from(mpk.x_max),
            });
        }
    }
    let mut rng = ChaCha20Rng::from_entropy();
    let body = match &mpk.material {
        PkMaterial::Pairing(pk) => CtBody::Pairing(sgp::encrypt(pk, x, &mut rng)),
        PkMaterial::Oracle { seal_key } => {
            let (nonce, sealed) = oracle::seal(seal_key, x, &mut rng);
            CtBody::Oracle { nonce, sealed }
        }
    };
    Ok(CiphertextVec {
        backend: mpk.backend,
        curve: mpk.curve,
        n: mpk.n,
        x_max: mpk.x_max,
        mpk_digest: mpk.digest,
        body,
    })
}

/// Derives the functional key for output `index` of the factored form.
///
/// The key carries a certified bound on the decrypted value, computed from
/// the form's integer weights and the input range; derivation refuses forms
/// whose bound exceeds what discrete-log recovery can handle.
pub fn derive_key(
    params: &GroupParams,
    msk: &SecretKey,
    form: &QuadraticForm,
    index: usize,
) -> Result<FunctionalKey, FeError> {
    if msk.curve != params.curve {
        return Err(FeError::mismatch(format!(
            "secret key curve {} differs from configured curve {}",
            msk.curve.name(),
            params.curve.name()
        )));
    }
    if form.n() != msk.n {
        return Err(FeError::dimension(
            "key derivation",
            format!("form over {} features", msk.n),
            format!("form over {} features", form.n()),
        ));
    }
    if index >= form.outputs() {
        return Err(FeError::dimension(
            "key derivation",
            format!("output index below {}", form.outputs()),
            format!("index {index}"),
        ));
    }
    if form.x_max() < msk.x_max {
        return Err(FeError::dimension(
            "key derivation",
            format!("form certified for x_max >= {}", msk.x_max),
            format!("x_max = {}", form.x_max()),
        ));
    }
    let capacity = backend_capacity(params, msk.backend);
    let bound = form.certified_bound(index, capacity)?;
    let body = match &msk.material {
        SkMaterial::Pairing(sk) => KeyBody::Pairing(sgp::derive_dk(sk, form, index)),
        SkMaterial::Oracle { seal_key } => KeyBody::Oracle {
            seal_key: *seal_key,
        },
    };
    Ok(FunctionalKey {
        backend: msk.backend,
        curve: msk.curve,
        index,
        bound,
        mpk_digest: msk.mpk_digest,
        form_digest: form.output_digest(index),
        body,
    })
}

/// Derives one functional key per output row of the form.
pub fn derive_keys(
    params: &GroupParams,
    msk: &SecretKey,
    form: &QuadraticForm,
) -> Result<Vec<FunctionalKey>, FeError> {
    (0..form.outputs())
        .map(|index| derive_key(params, msk, form, index))
        .collect()
}

/// One evaluated output together with the time evaluation took.
#[derive(Debug)]
pub struct Evaluation {
    pub output: EvalOutput,
    pub elapsed: Duration,
}

/// Encodes an integer as the element a decryption would produce for that
/// value, for known-answer tests and diagnostics of the recovery path.
pub fn encode_value(params: &GroupParams, backend: Backend, value: i128) -> EvalOutput {
    match backend {
        Backend::Oracle => EvalOutput::Oracle(value),
        Backend::Pairing => {
            let base = match params.curve {
                crate::group::CurveId::Bls12_381 => crate::group::gt_generator(),
            };
            let mut elem = sgp::pow_small(base, value.unsigned_abs());
            if value < 0 {
                elem = -elem;
            }
            EvalOutput::Pairing(elem)
        }
    }
}

fn check_key_against_ciphertext(
    ct: &CiphertextVec,
    dk: &FunctionalKey,
    form: &QuadraticForm,
) -> Result<(), FeError> {
    if ct.backend != dk.backend {
        return Err(FeError::mismatch(format!(
            "ciphertext backend {} but key backend {}",
            ct.backend.name(),
            dk.backend.name()
        )));
    }
    if ct.curve != dk.curve {
        return Err(FeError::mismatch(format!(
            "ciphertext curve {} but key curve {}",
            ct.curve.name(),
            dk.curve.name()
        )));
    }
    if ct.mpk_digest != dk.mpk_digest {
        return Err(FeError::mismatch(
            "ciphertext and key come from different master key material",
        ));
    }
    if form.n() != ct.n {
        return Err(FeError::mismatch(format!(
            "form over {} features but ciphertext over {}",
            form.n(),
            ct.n
        )));
    }
    if dk.index >= form.outputs() {
        return Err(FeError::mismatch(format!(
            "key output index {} but form has {} outputs",
            dk.index,
            form.outputs()
        )));
    }
    if dk.form_digest != form.output_digest(dk.index) {
        return Err(FeError::mismatch(
            "key form digest does not match the deployed form",
        ));
    }
    Ok(())
}

/// Evaluates a single output under one functional key.
///
/// The returned element encodes the same integer the plaintext evaluation of
/// the form would produce; discrete-log recovery extracts it.
pub fn decrypt_eval(
    ct: &CiphertextVec,
    dk: &FunctionalKey,
    form: &QuadraticForm,
) -> Result<Evaluation, FeError> {
    check_key_against_ciphertext(ct, dk, form)?;
    let start = Instant::now();
    let output = match (&ct.body, &dk.body) {
        (CtBody::Pairing(body), KeyBody::Pairing(dk_elem)) => {
            let outputs = sgp::evaluate_outputs(body, form, &[(dk.index, *dk_elem)]);
            EvalOutput::Pairing(outputs[0])
        }
        (CtBody::Oracle { nonce, sealed }, KeyBody::Oracle { seal_key }) => {
            let x = oracle::unseal(seal_key, nonce, sealed, ct.n)?;
            let values = form.evaluate(&x)?;
            EvalOutput::Oracle(values[dk.index])
        }
        _ => return Err(FeError::mismatch("ciphertext and key bodies disagree")),
    };
    Ok(Evaluation {
        output,
        elapsed: start.elapsed(),
    })
}

/// Decrypted output vector with the time split between group evaluation and
/// discrete-log recovery.
#[derive(Debug)]
pub struct DecryptionResult {
    pub values: Vec<i128>,
    pub eval_time: Duration,
    pub dlog_time: Duration,
}

/// Decrypts every output of the form in one pass.
///
/// Keys must be supplied in output order, one per row, all derived for the
/// same form and the same master key material. On the pairing backend the
/// weighted coordinate combinations and their pairings are computed once
/// and shared across outputs.
pub fn decrypt_all(
    params: &GroupParams,
    ct: &CiphertextVec,
    keys: &[FunctionalKey],
    form: &QuadraticForm,
    table: Option<&DlogTable>,
) -> Result<DecryptionResult, FeError> {
    if keys.len() != form.outputs() {
        return Err(FeError::dimension(
            "decrypt_all",
            format!("{} keys", form.outputs()),
            format!("{} keys", keys.len()),
        ));
    }
    for (position, key) in keys.iter().enumerate() {
        if key.index != position {
            return Err(FeError::dimension(
                "decrypt_all",
                format!("key for output {position} at position {position}"),
                format!("key for output {}", key.index),
            ));
        }
        check_key_against_ciphertext(ct, key, form)?;
        if key.form_digest[..16] != keys[0].form_digest[..16] {
            return Err(FeError::mismatch(
                "keys were derived for different quadratic forms",
            ));
        }
    }

    let eval_start = Instant::now();
    let outputs: Vec<EvalOutput> = match &ct.body {
        CtBody::Pairing(body) => {
            let dks: Vec<(usize, ark_bls12_381::G2Affine)> = keys
                .iter()
                .map(|key| match &key.body {
                    KeyBody::Pairing(dk) => Ok((key.index, *dk)),
                    KeyBody::Oracle { .. } => {
                        Err(FeError::mismatch("ciphertext and key bodies disagree"))
                    }
                })
                .collect::<Result<_, _>>()?;
            sgp::evaluate_outputs(body, form, &dks)
                .into_iter()
                .map(EvalOutput::Pairing)
                .collect()
        }
        CtBody::Oracle { nonce, sealed } => {
            let seal_key = match &keys[0].body {
                KeyBody::Oracle { seal_key } => seal_key,
                KeyBody::Pairing(_) => {
                    return Err(FeError::mismatch("ciphertext and key bodies disagree"))
                }
            };
            let x = oracle::unseal(seal_key, nonce, sealed, ct.n)?;
            form.evaluate(&x)?
                .into_iter()
                .map(EvalOutput::Oracle)
                .collect()
        }
    };
    let eval_time = eval_start.elapsed();

    let dlog_start = Instant::now();
    let mut values = Vec::with_capacity(keys.len());
    for (output, key) in outputs.iter().zip(keys) {
        values.push(dlog_recover(params, output, key.bound, table)?);
    }
    let dlog_time = dlog_start.elapsed();

    Ok(DecryptionResult {
        values,
        eval_time,
        dlog_time,
    })
}
