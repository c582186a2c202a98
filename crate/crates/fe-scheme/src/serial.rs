//! Binary artifact formats.
//!
//! Four artifact kinds share a little-endian layout with a four-byte magic
//! and a version: ciphertexts (`QFE1`), functional keys (`QFK1`), public and
//! secret key material (`QPK1`, `QSK1`), and discrete-log tables (`QDT1`).
//! Group elements are stored compressed with a two-byte length prefix and
//! are subgroup-checked when read back. Encoding is canonical: decoding and
//! re-encoding reproduces the input bytes exactly.

use ark_bls12_381::{Fr, G1Affine, G2Affine};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize, Compress, Validate};

use crate::dlog::DlogTable;
use crate::error::FeError;
use crate::group::{element_bytes, Backend, CurveId, Gt};
use crate::keys::{
    compute_mpk_digest, CiphertextVec, CtBody, FunctionalKey, KeyBody, PkMaterial, PublicKey,
    SecretKey, SkMaterial,
};
use crate::oracle::NONCE_LEN;
use crate::sgp::{PairingCiphertext, PairingPublic, PairingSecret};

const VERSION: u16 = 1;
const CT_MAGIC: &[u8; 4] = b"QFE1";
const KEY_MAGIC: &[u8; 4] = b"QFK1";
const PK_MAGIC: &[u8; 4] = b"QPK1";
const SK_MAGIC: &[u8; 4] = b"QSK1";
const TABLE_MAGIC: &[u8; 4] = b"QDT1";

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    kind: &'static str,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8], kind: &'static str) -> Self {
        Reader {
            bytes,
            pos: 0,
            kind,
        }
    }

    fn fail(&self, reason: impl Into<String>) -> FeError {
        FeError::format(self.kind, self.pos, reason)
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8], FeError> {
        if self.bytes.len() - self.pos < len {
            return Err(self.fail(format!(
                "truncated: need {len} bytes, {} remain",
                self.bytes.len() - self.pos
            )));
        }
        let slice = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(slice)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N], FeError> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8, FeError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, FeError> {
        Ok(u16::from_le_bytes(self.array()?))
    }

    fn u32(&mut self) -> Result<u32, FeError> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    fn u64(&mut self) -> Result<u64, FeError> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    fn u128(&mut self) -> Result<u128, FeError> {
        Ok(u128::from_le_bytes(self.array()?))
    }

    fn magic(&mut self, expected: &[u8; 4]) -> Result<(), FeError> {
        let found = self.take(4)?;
        if found != expected {
            return Err(FeError::format(
                self.kind,
                0,
                format!(
                    "bad magic {:02x?}, expected {}",
                    found,
                    String::from_utf8_lossy(expected)
                ),
            ));
        }
        Ok(())
    }

    fn version(&mut self) -> Result<(), FeError> {
        let v = self.u16()?;
        if v != VERSION {
            return Err(self.fail(format!("unsupported version {v}, expected {VERSION}")));
        }
        Ok(())
    }

    fn element<T: CanonicalDeserialize>(&mut self, context: &str) -> Result<T, FeError> {
        let len = usize::from(self.u16()?);
        let start = self.pos;
        let bytes = self.take(len)?;
        T::deserialize_with_mode(bytes, Compress::Yes, Validate::Yes).map_err(|_| {
            FeError::invalid(format!("{context} at byte {start}"))
        })
    }

    fn finish(self) -> Result<(), FeError> {
        if self.pos != self.bytes.len() {
            return Err(FeError::format(
                self.kind,
                self.pos,
                format!("{} trailing bytes", self.bytes.len() - self.pos),
            ));
        }
        Ok(())
    }
}

fn put_element<T: CanonicalSerialize>(buf: &mut Vec<u8>, elem: &T) {
    let bytes = element_bytes(elem);
    debug_assert!(bytes.len() <= usize::from(u16::MAX));
    buf.extend_from_slice(&(bytes.len() as u16).to_le_bytes());
    buf.extend_from_slice(&bytes);
}

fn header(buf: &mut Vec<u8>, magic: &[u8; 4], backend: Backend, curve: CurveId) {
    buf.extend_from_slice(magic);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.push(backend.code());
    buf.push(curve.code());
}

pub fn encode_ciphertext(ct: &CiphertextVec) -> Vec<u8> {
    let mut buf = Vec::new();
    header(&mut buf, CT_MAGIC, ct.backend, ct.curve);
    buf.extend_from_slice(&(ct.n as u32).to_le_bytes());
    buf.extend_from_slice(&ct.x_max.to_le_bytes());
    buf.extend_from_slice(&ct.mpk_digest);
    match &ct.body {
        CtBody::Pairing(body) => {
            put_element(&mut buf, &body.g1_gamma);
            for (a, b) in body.a.iter().zip(&body.b) {
                put_element(&mut buf, &a[0]);
                put_element(&mut buf, &a[1]);
                put_element(&mut buf, &b[0]);
                put_element(&mut buf, &b[1]);
            }
        }
        CtBody::Oracle { nonce, sealed } => {
            buf.extend_from_slice(nonce);
            buf.extend_from_slice(&(sealed.len() as u32).to_le_bytes());
            buf.extend_from_slice(sealed);
        }
    }
    buf
}

pub fn decode_ciphertext(bytes: &[u8]) -> Result<CiphertextVec, FeError> {
    let mut r = Reader::new(bytes, "ciphertext");
    r.magic(CT_MAGIC)?;
    r.version()?;
    let backend = Backend::from_code(r.u8()?)?;
    let curve = CurveId::from_code(r.u8()?)?;
    let n = r.u32()? as usize;
    if n == 0 {
        return Err(r.fail("ciphertext over zero features"));
    }
    let x_max = r.u32()?;
    let mpk_digest: [u8; 16] = r.array()?;
    let body = match backend {
        Backend::Pairing => {
            let g1_gamma: G1Affine = r.element("masking element")?;
            let mut a = Vec::with_capacity(n + 1);
            let mut b = Vec::with_capacity(n + 1);
            for i in 0..=n {
                let a0: G1Affine = r.element(&format!("coordinate {i} left element 0"))?;
                let a1: G1Affine = r.element(&format!("coordinate {i} left element 1"))?;
                let b0: G2Affine = r.element(&format!("coordinate {i} right element 0"))?;
                let b1: G2Affine = r.element(&format!("coordinate {i} right element 1"))?;
                a.push([a0, a1]);
                b.push([b0, b1]);
            }
            CtBody::Pairing(PairingCiphertext { g1_gamma, a, b })
        }
        Backend::Oracle => {
            let nonce: [u8; NONCE_LEN] = r.array()?;
            let sealed_len = r.u32()? as usize;
            let sealed = r.take(sealed_len)?.to_vec();
            CtBody::Oracle { nonce, sealed }
        }
    };
    r.finish()?;
    Ok(CiphertextVec {
        backend,
        curve,
        n,
        x_max,
        mpk_digest,
        body,
    })
}

pub fn encode_functional_key(key: &FunctionalKey) -> Vec<u8> {
    let mut buf = Vec::new();
    header(&mut buf, KEY_MAGIC, key.backend, key.curve);
    buf.extend_from_slice(&(key.index as u32).to_le_bytes());
    buf.extend_from_slice(&key.bound.to_le_bytes());
    buf.extend_from_slice(&key.mpk_digest);
    buf.extend_from_slice(&key.form_digest);
    match &key.body {
        KeyBody::Pairing(dk) => put_element(&mut buf, dk),
        KeyBody::Oracle { seal_key } => buf.extend_from_slice(seal_key),
    }
    buf
}

pub fn decode_functional_key(bytes: &[u8]) -> Result<FunctionalKey, FeError> {
    let mut r = Reader::new(bytes, "functional key");
    r.magic(KEY_MAGIC)?;
    r.version()?;
    let backend = Backend::from_code(r.u8()?)?;
    let curve = CurveId::from_code(r.u8()?)?;
    let index = r.u32()? as usize;
    let bound = r.u128()?;
    let mpk_digest: [u8; 16] = r.array()?;
    let form_digest: [u8; 32] = r.array()?;
    let body = match backend {
        Backend::Pairing => KeyBody::Pairing(r.element("functional key element")?),
        Backend::Oracle => KeyBody::Oracle {
            seal_key: r.array()?,
        },
    };
    r.finish()?;
    Ok(FunctionalKey {
        backend,
        curve,
        index,
        bound,
        mpk_digest,
        form_digest,
        body,
    })
}

pub fn encode_public_key(pk: &PublicKey) -> Vec<u8> {
    let mut buf = Vec::new();
    header(&mut buf, PK_MAGIC, pk.backend, pk.curve);
    buf.extend_from_slice(&(pk.n as u32).to_le_bytes());
    buf.extend_from_slice(&pk.x_max.to_le_bytes());
    buf.extend_from_slice(&pk.digest);
    match &pk.material {
        PkMaterial::Pairing(material) => {
            for elem in &material.g1s {
                put_element(&mut buf, elem);
            }
            for elem in &material.g2t {
                put_element(&mut buf, elem);
            }
        }
        PkMaterial::Oracle { seal_key } => buf.extend_from_slice(seal_key),
    }
    buf
}

pub fn decode_public_key(bytes: &[u8]) -> Result<PublicKey, FeError> {
    let mut r = Reader::new(bytes, "public key");
    r.magic(PK_MAGIC)?;
    r.version()?;
    let backend = Backend::from_code(r.u8()?)?;
    let curve = CurveId::from_code(r.u8()?)?;
    let n = r.u32()? as usize;
    if n == 0 {
        return Err(r.fail("key over zero features"));
    }
    let x_max = r.u32()?;
    let digest: [u8; 16] = r.array()?;
    let material = match backend {
        Backend::Pairing => {
            let mut g1s = Vec::with_capacity(n + 1);
            for i in 0..=n {
                g1s.push(r.element(&format!("g1 key element {i}"))?);
            }
            let mut g2t = Vec::with_capacity(n + 1);
            for i in 0..=n {
                g2t.push(r.element(&format!("g2 key element {i}"))?);
            }
            PkMaterial::Pairing(PairingPublic { g1s, g2t })
        }
        Backend::Oracle => PkMaterial::Oracle {
            seal_key: r.array()?,
        },
    };
    r.finish()?;
    if compute_mpk_digest(backend, curve, n, x_max, &material) != digest {
        return Err(FeError::format(
            "public key",
            0,
            "stored digest does not match key material",
        ));
    }
    Ok(PublicKey {
        backend,
        curve,
        n,
        x_max,
        material,
        digest,
    })
}

pub fn encode_secret_key(sk: &SecretKey) -> Vec<u8> {
    let mut buf = Vec::new();
    header(&mut buf, SK_MAGIC, sk.backend, sk.curve);
    buf.extend_from_slice(&(sk.n as u32).to_le_bytes());
    buf.extend_from_slice(&sk.x_max.to_le_bytes());
    buf.extend_from_slice(&sk.mpk_digest);
    match &sk.material {
        SkMaterial::Pairing(material) => {
            for scalar in &material.s {
                put_element(&mut buf, scalar);
            }
            for scalar in &material.t {
                put_element(&mut buf, scalar);
            }
        }
        SkMaterial::Oracle { seal_key } => buf.extend_from_slice(seal_key),
    }
    buf
}

pub fn decode_secret_key(bytes: &[u8]) -> Result<SecretKey, FeError> {
    let mut r = Reader::new(bytes, "secret key");
    r.magic(SK_MAGIC)?;
    r.version()?;
    let backend = Backend::from_code(r.u8()?)?;
    let curve = CurveId::from_code(r.u8()?)?;
    let n = r.u32()? as usize;
    if n == 0 {
        return Err(r.fail("key over zero features"));
    }
    let x_max = r.u32()?;
    let mpk_digest: [u8; 16] = r.array()?;
    let material = match backend {
        Backend::Pairing => {
            let mut s = Vec::with_capacity(n + 1);
            for i in 0..=n {
                s.push(r.element::<Fr>(&format!("secret scalar s[{i}]"))?);
            }
            let mut t = Vec::with_capacity(n + 1);
            for i in 0..=n {
                t.push(r.element::<Fr>(&format!("secret scalar t[{i}]"))?);
            }
            SkMaterial::Pairing(PairingSecret { s, t })
        }
        Backend::Oracle => SkMaterial::Oracle {
            seal_key: r.array()?,
        },
    };
    r.finish()?;
    Ok(SecretKey {
        backend,
        curve,
        n,
        x_max,
        material,
        mpk_digest,
    })
}

/// Size in bytes of a table file holding `count` entries.
pub fn table_encoded_size(count: usize) -> u64 {
    let gt_size = <Gt as ark_ff::Zero>::zero().compressed_size() as u64;
    4 + 2 + 1 + 1 + 8 + 8 + 2 + gt_size + (count as u64) * 24
}

pub fn encode_table(table: &DlogTable) -> Vec<u8> {
    let mut buf = Vec::with_capacity(table_encoded_size(table.entries.len()) as usize);
    buf.extend_from_slice(TABLE_MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.push(table.curve.code());
    buf.push(0);
    buf.extend_from_slice(&table.m.to_le_bytes());
    buf.extend_from_slice(&(table.entries.len() as u64).to_le_bytes());
    put_element(&mut buf, &table.base);
    for &(key, exponent) in &table.entries {
        buf.extend_from_slice(&key.to_le_bytes());
        buf.extend_from_slice(&exponent.to_le_bytes());
    }
    buf
}

pub fn decode_table(bytes: &[u8]) -> Result<DlogTable, FeError> {
    let mut r = Reader::new(bytes, "dlog table");
    r.magic(TABLE_MAGIC)?;
    r.version()?;
    let curve = CurveId::from_code(r.u8()?)?;
    let reserved = r.u8()?;
    if reserved != 0 {
        return Err(r.fail(format!("nonzero reserved byte {reserved}")));
    }
    let m = r.u64()?;
    let count = r.u64()?;
    let base: Gt = r.element("table base")?;
    if count > (bytes.len() as u64) / 24 {
        return Err(r.fail(format!("entry count {count} exceeds file size")));
    }
    let mut entries = Vec::with_capacity(count as usize);
    let mut previous: Option<u128> = None;
    for idx in 0..count {
        let key = r.u128()?;
        let exponent = r.u64()?;
        if exponent >= m {
            return Err(r.fail(format!(
                "entry {idx} exponent {exponent} outside baby-step range {m}"
            )));
        }
        if let Some(prev) = previous {
            if key < prev {
                return Err(r.fail(format!("entry {idx} breaks sorted key order")));
            }
        }
        previous = Some(key);
        entries.push((key, exponent));
    }
    r.finish()?;
    Ok(DlogTable {
        curve,
        base,
        m,
        entries,
    })
}
