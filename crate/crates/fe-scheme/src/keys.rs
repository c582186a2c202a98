use ark_bls12_381::Bls12_381;
use ark_ec::pairing::PairingOutput;
use ark_ff::Zero;

use crate::group::{digest16, element_bytes, hex16, Backend, CurveId};
use crate::oracle::NONCE_LEN;
use crate::sgp::{PairingCiphertext, PairingPublic, PairingSecret};

/// Content digest of public key material, stored in ciphertext and
/// functional-key headers so mismatched pairs are detected before any group
/// work happens.
pub(crate) fn compute_mpk_digest(
    backend: Backend,
    curve: CurveId,
    n: usize,
    x_max: u32,
    material: &PkMaterial,
) -> [u8; 16] {
    let mut meta = Vec::with_capacity(16);
    meta.push(backend.code());
    meta.push(curve.code());
    meta.extend_from_slice(&(n as u32).to_le_bytes());
    meta.extend_from_slice(&x_max.to_le_bytes());
    let mut body = Vec::new();
    match material {
        PkMaterial::Pairing(pk) => {
            for elem in &pk.g1s {
                body.extend_from_slice(&element_bytes(elem));
            }
            for elem in &pk.g2t {
                body.extend_from_slice(&element_bytes(elem));
            }
        }
        PkMaterial::Oracle { seal_key } => body.extend_from_slice(seal_key),
    }
    digest16(&[b"mpk", &meta, &body])
}

/// Public encryption key: the per-coordinate group elements on the pairing
/// backend, or the sealing key on the oracle backend.
#[derive(Clone, Debug)]
pub struct PublicKey {
    pub(crate) backend: Backend,
    pub(crate) curve: CurveId,
    pub(crate) n: usize,
    pub(crate) x_max: u32,
    pub(crate) material: PkMaterial,
    pub(crate) digest: [u8; 16],
}

#[derive(Clone, Debug)]
pub(crate) enum PkMaterial {
    Pairing(PairingPublic),
    Oracle { seal_key: [u8; 32] },
}

/// Master secret key. Never embedded in ciphertexts or functional keys on
/// the pairing backend; the oracle backend has no secrets beyond its public
/// sealing key.
#[derive(Clone, Debug)]
pub struct SecretKey {
    pub(crate) backend: Backend,
    pub(crate) curve: CurveId,
    pub(crate) n: usize,
    pub(crate) x_max: u32,
    pub(crate) material: SkMaterial,
    pub(crate) mpk_digest: [u8; 16],
}

#[derive(Clone, Debug)]
pub(crate) enum SkMaterial {
    Pairing(PairingSecret),
    Oracle { seal_key: [u8; 32] },
}

/// Key pair produced by setup.
#[derive(Clone, Debug)]
pub struct MasterKeys {
    pub public: PublicKey,
    pub secret: SecretKey,
}

macro_rules! key_accessors {
    ($ty:ty) => {
        impl $ty {
            pub fn backend(&self) -> Backend {
                self.backend
            }

            pub fn curve(&self) -> CurveId {
                self.curve
            }

            /// Number of features, excluding the bias coordinate.
            pub fn n(&self) -> usize {
                self.n
            }

            /// Largest feature value ciphertexts may carry.
            pub fn x_max(&self) -> u32 {
                self.x_max
            }
        }
    };
}

key_accessors!(PublicKey);
key_accessors!(SecretKey);

impl PublicKey {
    /// Content digest identifying this key material; ciphertexts and
    /// functional keys both carry it so mismatched pairs are rejected.
    pub fn digest(&self) -> [u8; 16] {
        self.digest
    }

    pub fn digest_hex(&self) -> String {
        hex16(&self.digest)
    }
}

impl SecretKey {
    /// Digest of the matching public key.
    pub fn mpk_digest(&self) -> [u8; 16] {
        self.mpk_digest
    }
}

/// Encryption of one feature vector.
#[derive(Clone, Debug)]
pub struct CiphertextVec {
    pub(crate) backend: Backend,
    pub(crate) curve: CurveId,
    pub(crate) n: usize,
    pub(crate) x_max: u32,
    pub(crate) mpk_digest: [u8; 16],
    pub(crate) body: CtBody,
}

#[derive(Clone, Debug)]
pub(crate) enum CtBody {
    Pairing(PairingCiphertext),
    Oracle {
        nonce: [u8; NONCE_LEN],
        sealed: Vec<u8>,
    },
}

impl CiphertextVec {
    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn curve(&self) -> CurveId {
        self.curve
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_max(&self) -> u32 {
        self.x_max
    }

    pub fn mpk_digest(&self) -> [u8; 16] {
        self.mpk_digest
    }
}

/// Functional decryption key for a single output of a quadratic form.
#[derive(Clone, Debug)]
pub struct FunctionalKey {
    pub(crate) backend: Backend,
    pub(crate) curve: CurveId,
    pub(crate) index: usize,
    pub(crate) bound: u128,
    pub(crate) mpk_digest: [u8; 16],
    pub(crate) form_digest: [u8; 32],
    pub(crate) body: KeyBody,
}

#[derive(Clone, Debug)]
pub(crate) enum KeyBody {
    Pairing(ark_bls12_381::G2Affine),
    Oracle { seal_key: [u8; 32] },
}

impl FunctionalKey {
    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn curve(&self) -> CurveId {
        self.curve
    }

    /// Output row this key decrypts.
    pub fn index(&self) -> usize {
        self.index
    }

    /// Certified bound on the magnitude of the decrypted value.
    pub fn bound(&self) -> u128 {
        self.bound
    }

    pub fn mpk_digest(&self) -> [u8; 16] {
        self.mpk_digest
    }

    /// Digest of the quadratic form: 16 bytes shared by every output of the
    /// same model followed by 16 bytes specific to this output row.
    pub fn form_digest(&self) -> [u8; 32] {
        self.form_digest
    }
}

/// Result of evaluating one output under a functional key, before
/// discrete-log recovery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalOutput {
    /// Target-group element `e(g1, g2)^value`.
    Pairing(PairingOutput<Bls12_381>),
    /// Exact value from the sealed-evaluation backend.
    Oracle(i128),
}

impl EvalOutput {
    pub fn backend(&self) -> Backend {
        match self {
            EvalOutput::Pairing(_) => Backend::Pairing,
            EvalOutput::Oracle(_) => Backend::Oracle,
        }
    }

    /// True when the element encodes the value zero.
    pub fn is_identity(&self) -> bool {
        match self {
            EvalOutput::Pairing(elem) => elem.is_zero(),
            EvalOutput::Oracle(value) => *value == 0,
        }
    }
}
