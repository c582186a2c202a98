use ark_bls12_381::{Bls12_381, Fr, G1Projective, G2Projective};
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::PrimeGroup;
use ark_serialize::CanonicalSerialize;
use sha2::{Digest, Sha256};

use crate::error::FeError;

/// Pairing-friendly curves the scheme can be instantiated over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveId {
    Bls12_381,
}

impl CurveId {
    pub fn name(self) -> &'static str {
        match self {
            CurveId::Bls12_381 => "bls12-381",
        }
    }

    pub fn parse(name: &str) -> Result<Self, FeError> {
        match name {
            "bls12-381" => Ok(CurveId::Bls12_381),
            other => Err(FeError::UnsupportedCurve {
                requested: other.to_string(),
            }),
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            CurveId::Bls12_381 => 0,
        }
    }

    pub(crate) fn from_code(code: u8) -> Result<Self, FeError> {
        match code {
            0 => Ok(CurveId::Bls12_381),
            other => Err(FeError::UnsupportedCurve {
                requested: format!("curve code {other}"),
            }),
        }
    }

    /// Security level of the curve in bits.
    pub fn security_bits(self) -> u32 {
        match self {
            CurveId::Bls12_381 => 128,
        }
    }
}

/// Evaluation backends. `Pairing` is the real scheme; `Oracle` seals the
/// plaintext in an opaque container and evaluates the form directly at
/// decryption time. The oracle backend exposes the same interface and the
/// same information flow but provides no cryptographic protection; it exists
/// so pipelines can be exercised without paying for group arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Pairing,
    Oracle,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Pairing => "pairing",
            Backend::Oracle => "oracle",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "pairing" => Some(Backend::Pairing),
            "oracle" => Some(Backend::Oracle),
            _ => None,
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            Backend::Pairing => 0,
            Backend::Oracle => 1,
        }
    }

    pub(crate) fn from_code(code: u8) -> Result<Self, FeError> {
        match code {
            0 => Ok(Backend::Pairing),
            1 => Ok(Backend::Oracle),
            other => Err(FeError::format(
                "header",
                0,
                format!("unknown backend code {other}"),
            )),
        }
    }
}

/// Group configuration shared by key generation, encryption, and the
/// discrete-log table.
#[derive(Debug, Clone)]
pub struct GroupParams {
    pub curve: CurveId,
    /// Largest certified bound a functional key may carry on the pairing
    /// backend. Discrete-log recovery over a wider interval would be
    /// impractical, so key derivation refuses to certify past this point.
    pub dlog_capacity: u128,
    /// Upper limit on the serialized size of a precomputed lookup table.
    pub table_disk_budget: u64,
}

/// Default discrete-log capacity: baby-step giant-step over an interval of
/// 2^42 elements needs about two million table entries, which stays cheap to
/// build and to search.
pub const DEFAULT_DLOG_CAPACITY: u128 = 1 << 42;

/// Default table disk budget of 512 MiB.
pub const DEFAULT_TABLE_DISK_BUDGET: u64 = 512 << 20;

impl Default for GroupParams {
    fn default() -> Self {
        GroupParams {
            curve: CurveId::Bls12_381,
            dlog_capacity: DEFAULT_DLOG_CAPACITY,
            table_disk_budget: DEFAULT_TABLE_DISK_BUDGET,
        }
    }
}

impl GroupParams {
    pub fn new(curve_name: &str) -> Result<Self, FeError> {
        Ok(GroupParams {
            curve: CurveId::parse(curve_name)?,
            ..GroupParams::default()
        })
    }
}

pub(crate) type Gt = PairingOutput<Bls12_381>;

/// Target-group generator `e(g1, g2)`; every decrypted evaluation is a power
/// of this element. Cached because recovery consults it on every call.
pub(crate) fn gt_generator() -> Gt {
    use std::sync::OnceLock;
    static GENERATOR: OnceLock<Gt> = OnceLock::new();
    *GENERATOR.get_or_init(|| {
        Bls12_381::pairing(G1Projective::generator(), G2Projective::generator())
    })
}

/// Converts a signed integer into a field element.
pub(crate) fn fr_from_i64(value: i64) -> Fr {
    if value >= 0 {
        Fr::from(value as u64)
    } else {
        -Fr::from(value.unsigned_abs())
    }
}

/// Canonical compressed bytes of any serializable group element.
pub(crate) fn element_bytes<T: CanonicalSerialize>(elem: &T) -> Vec<u8> {
    let mut buf = Vec::with_capacity(elem.compressed_size());
    elem.serialize_compressed(&mut buf)
        .expect("serialization into a Vec cannot fail");
    buf
}

/// First 16 bytes of SHA-256 over the input, used for content digests in
/// artifact headers.
pub(crate) fn digest16(parts: &[&[u8]]) -> [u8; 16] {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update(part);
    }
    let full = hasher.finalize();
    let mut out = [0u8; 16];
    out.copy_from_slice(&full[..16]);
    out
}

pub(crate) fn hex16(bytes: &[u8; 16]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
