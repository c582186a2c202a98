//! Encrypted-model file format.
//!
//! One little-endian layout with a `QHM1` magic: version, feature count,
//! fixed-point scale, key size, then the public modulus and the n + 1
//! ciphertexts as length-prefixed little-endian big integers. Encoding is
//! canonical, so decoding and re-encoding reproduces the bytes exactly.

use std::path::Path;

use num_bigint::BigUint;

use crate::error::{format_err, io_err, HeError};
use crate::model::EncryptedLRModel;
use crate::paillier::HePublicKey;

const MODEL_MAGIC: &[u8; 4] = b"QHM1";
const VERSION: u16 = 1;

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

    fn fail(&self, reason: impl Into<String>) -> HeError {
        format_err(self.kind, self.pos, reason)
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8], HeError> {
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

    fn u16(&mut self) -> Result<u16, HeError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, HeError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn bigint(&mut self, context: &str) -> Result<BigUint, HeError> {
        let len = self.u32()? as usize;
        let bytes = self.take(len)?;
        if bytes.is_empty() || (bytes.len() > 1 && bytes.last() == Some(&0)) {
            return Err(self.fail(format!("{context} has a non-canonical encoding")));
        }
        Ok(BigUint::from_bytes_le(bytes))
    }

    fn finish(self) -> Result<(), HeError> {
        if self.pos != self.bytes.len() {
            return Err(format_err(
                self.kind,
                self.pos,
                format!("{} trailing bytes", self.bytes.len() - self.pos),
            ));
        }
        Ok(())
    }
}

fn put_bigint(buf: &mut Vec<u8>, value: &BigUint) {
    let bytes = value.to_bytes_le();
    buf.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
    buf.extend_from_slice(&bytes);
}

pub fn encode_model(pk: &HePublicKey, model: &EncryptedLRModel) -> Vec<u8> {
    let mut buf = Vec::new();
    buf.extend_from_slice(MODEL_MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(model.n as u32).to_le_bytes());
    buf.extend_from_slice(&model.scale_bits.to_le_bytes());
    buf.extend_from_slice(&(model.key_bits as u32).to_le_bytes());
    put_bigint(&mut buf, &pk.modulus);
    for enc in &model.enc_w {
        put_bigint(&mut buf, enc);
    }
    put_bigint(&mut buf, &model.enc_b);
    buf
}

pub fn decode_model(bytes: &[u8]) -> Result<(HePublicKey, EncryptedLRModel), HeError> {
    let mut r = Reader::new(bytes, "encrypted model");
    let magic = r.take(4)?;
    if magic != MODEL_MAGIC {
        return Err(format_err(
            "encrypted model",
            0,
            format!("bad magic {magic:02x?}"),
        ));
    }
    let version = r.u16()?;
    if version != VERSION {
        return Err(r.fail(format!("unsupported version {version}, expected {VERSION}")));
    }
    let n = r.u32()? as usize;
    let scale_bits = r.u32()?;
    let key_bits = u64::from(r.u32()?);
    let modulus = r.bigint("modulus")?;
    if modulus.bits() != key_bits {
        return Err(r.fail(format!(
            "modulus has {} bits, header says {key_bits}",
            modulus.bits()
        )));
    }
    let generator = &modulus + 1u32;
    let pk = HePublicKey::new(modulus, generator, key_bits);
    let ceiling = pk.modulus_squared().clone();
    let read_ct = |context: String, r: &mut Reader| -> Result<BigUint, HeError> {
        let value = r.bigint(&context)?;
        if value >= ceiling {
            return Err(format_err(
                "encrypted model",
                r.pos,
                format!("{context} is not reduced modulo N^2"),
            ));
        }
        Ok(value)
    };
    let mut enc_w = Vec::with_capacity(n);
    for i in 0..n {
        enc_w.push(read_ct(format!("coefficient {i}"), &mut r)?);
    }
    let enc_b = read_ct("bias".to_string(), &mut r)?;
    r.finish()?;
    Ok((
        pk,
        EncryptedLRModel {
            n,
            scale_bits,
            key_bits,
            enc_w,
            enc_b,
        },
    ))
}

pub fn save_model(
    path: &Path,
    pk: &HePublicKey,
    model: &EncryptedLRModel,
) -> Result<(), HeError> {
    std::fs::write(path, encode_model(pk, model)).map_err(|e| io_err(path, e))
}

pub fn load_model(path: &Path) -> Result<(HePublicKey, EncryptedLRModel), HeError> {
    let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
    decode_model(&bytes)
}
