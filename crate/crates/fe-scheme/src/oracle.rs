//! Sealed-evaluation backend.
//!
//! This backend mirrors the pairing backend's interface and information
//! flow without group arithmetic: encryption seals the feature vector into
//! an opaque byte container, and decryption with a functional key evaluates
//! exactly the quadratic output the key was derived for. The sealing is a
//! keyed stream cipher with an integrity tag, which hides nothing from a
//! holder of the setup material; the backend exists for fast pipeline and
//! equivalence testing, not for protection.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::error::FeError;

pub(crate) const NONCE_LEN: usize = 12;
const TAG_LEN: usize = 16;

fn keystream(seal_key: &[u8; 32], nonce: &[u8; NONCE_LEN], len: usize) -> Vec<u8> {
    let mut hasher = Sha256::new();
    hasher.update(b"seal-stream");
    hasher.update(seal_key);
    hasher.update(nonce);
    let seed: [u8; 32] = hasher.finalize().into();
    let mut rng = ChaCha20Rng::from_seed(seed);
    let mut stream = vec![0u8; len];
    rng.fill_bytes(&mut stream);
    stream
}

fn tag(seal_key: &[u8; 32], nonce: &[u8; NONCE_LEN], payload: &[u8]) -> [u8; TAG_LEN] {
    let mut hasher = Sha256::new();
    hasher.update(b"seal-tag");
    hasher.update(seal_key);
    hasher.update(nonce);
    hasher.update(payload);
    let full = hasher.finalize();
    let mut out = [0u8; TAG_LEN];
    out.copy_from_slice(&full[..TAG_LEN]);
    out
}

/// Seals the feature vector under a fresh nonce. The sealed bytes carry the
/// little-endian counts followed by an integrity tag, all masked by the
/// keystream.
pub(crate) fn seal(
    seal_key: &[u8; 32],
    x: &[u32],
    rng: &mut impl RngCore,
) -> ([u8; NONCE_LEN], Vec<u8>) {
    let mut nonce = [0u8; NONCE_LEN];
    rng.fill_bytes(&mut nonce);
    let mut payload = Vec::with_capacity(x.len() * 4 + TAG_LEN);
    for &value in x {
        payload.extend_from_slice(&value.to_le_bytes());
    }
    let t = tag(seal_key, &nonce, &payload);
    payload.extend_from_slice(&t);
    let stream = keystream(seal_key, &nonce, payload.len());
    for (byte, mask) in payload.iter_mut().zip(&stream) {
        *byte ^= mask;
    }
    (nonce, payload)
}

/// Recovers the sealed feature vector, verifying length and integrity tag.
pub(crate) fn unseal(
    seal_key: &[u8; 32],
    nonce: &[u8; NONCE_LEN],
    sealed: &[u8],
    n: usize,
) -> Result<Vec<u32>, FeError> {
    let expected_len = n * 4 + TAG_LEN;
    if sealed.len() != expected_len {
        return Err(FeError::invalid(format!(
            "sealed payload length {} (expected {expected_len})",
            sealed.len()
        )));
    }
    let stream = keystream(seal_key, nonce, sealed.len());
    let mut payload: Vec<u8> = sealed
        .iter()
        .zip(&stream)
        .map(|(byte, mask)| byte ^ mask)
        .collect();
    let tag_bytes = payload.split_off(n * 4);
    if tag_bytes != tag(seal_key, nonce, &payload) {
        return Err(FeError::invalid("sealed payload tag"));
    }
    Ok(payload
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn seal_round_trips() {
        let key = [7u8; 32];
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let x = vec![0u32, 1, 100, u32::MAX];
        let (nonce, sealed) = seal(&key, &x, &mut rng);
        assert_eq!(unseal(&key, &nonce, &sealed, x.len()).unwrap(), x);
    }

    #[test]
    fn fresh_nonce_changes_sealed_bytes() {
        let key = [7u8; 32];
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let x = vec![5u32; 8];
        let (n1, s1) = seal(&key, &x, &mut rng);
        let (n2, s2) = seal(&key, &x, &mut rng);
        assert_ne!(n1, n2);
        assert_ne!(s1, s2);
    }

    #[test]
    fn corrupted_payload_is_rejected() {
        let key = [7u8; 32];
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let x = vec![1u32, 2, 3];
        let (nonce, mut sealed) = seal(&key, &x, &mut rng);
        sealed[0] ^= 0x40;
        let err = unseal(&key, &nonce, &sealed, x.len()).unwrap_err();
        assert!(matches!(err, FeError::InvalidGroupElement { .. }));
    }

    #[test]
    fn wrong_key_is_rejected() {
        let key = [7u8; 32];
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let x = vec![9u32; 4];
        let (nonce, sealed) = seal(&key, &x, &mut rng);
        let err = unseal(&[8u8; 32], &nonce, &sealed, x.len()).unwrap_err();
        assert!(matches!(err, FeError::InvalidGroupElement { .. }));
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let key = [7u8; 32];
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let x = vec![1u32, 2];
        let (nonce, sealed) = seal(&key, &x, &mut rng);
        let err = unseal(&key, &nonce, &sealed[..sealed.len() - 1], x.len()).unwrap_err();
        assert!(matches!(err, FeError::InvalidGroupElement { .. }));
    }
}
