//! Ciphertext envelope: the binary ciphertext wrapped with enough metadata
//! to verify it against the loaded artifacts before decryption. Files use a
//! line-oriented text form; the HTTP service exchanges a JSON twin with the
//! same fields and base64 payload.

use std::fs;
use std::path::Path;

use base64::prelude::*;
use fe_scheme::Backend;
use serde_json::{json, Value};

use crate::error::AppError;

pub const ENVELOPE_VERSION: u32 = 1;
const KIND: &str = "fe-ciphertext";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    pub email_id: String,
    pub backend: Backend,
    /// Digest of the public key the ciphertext was produced under.
    pub mpk_sha256: String,
    /// Digest of the vocabulary used to vectorize the email.
    pub vocab_sha256: String,
    pub encrypt_nanos: u64,
    /// Encoded ciphertext bytes, opaque at this layer.
    pub ciphertext: Vec<u8>,
}

impl Envelope {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("format_version: {ENVELOPE_VERSION}\n"));
        out.push_str(&format!("kind: {KIND}\n"));
        out.push_str(&format!("email_id: {}\n", self.email_id));
        out.push_str(&format!("backend: {}\n", self.backend.name()));
        out.push_str(&format!("mpk_sha256: {}\n", self.mpk_sha256));
        out.push_str(&format!("vocab_sha256: {}\n", self.vocab_sha256));
        out.push_str(&format!("encrypt_nanos: {}\n", self.encrypt_nanos));
        out.push_str(&format!("ciphertext {}\n", self.ciphertext.len()));
        out.push_str(&wrap76(&BASE64_STANDARD.encode(&self.ciphertext)));
        out.push_str("end\n");
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), AppError> {
        fs::write(path, self.render()).map_err(|e| AppError::io(path.display(), e))
    }

    pub fn load(path: &Path) -> Result<Envelope, AppError> {
        let text = fs::read_to_string(path).map_err(|e| AppError::io(path.display(), e))?;
        Envelope::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Envelope, AppError> {
        let mut lines = text.lines().enumerate();
        let mut field = |name: &str| -> Result<(usize, String), AppError> {
            let (i, line) = lines
                .next()
                .ok_or_else(|| AppError::format(origin, 0, format!("missing {name} line")))?;
            let value = line
                .strip_prefix(name)
                .and_then(|rest| rest.strip_prefix(": "))
                .ok_or_else(|| AppError::format(origin, i + 1, format!("expected `{name}: ...`")))?;
            Ok((i, value.to_string()))
        };

        let (i, version) = field("format_version")?;
        if version != ENVELOPE_VERSION.to_string() {
            return Err(AppError::format(origin, i + 1, format!("unsupported format_version {version}")));
        }
        let (i, kind) = field("kind")?;
        if kind != KIND {
            return Err(AppError::format(origin, i + 1, format!("expected kind {KIND}, found {kind}")));
        }
        let (_, email_id) = field("email_id")?;
        let (i, backend_name) = field("backend")?;
        let backend = Backend::parse(&backend_name)
            .ok_or_else(|| AppError::format(origin, i + 1, format!("unknown backend {backend_name:?}")))?;
        let (_, mpk_sha256) = field("mpk_sha256")?;
        let (_, vocab_sha256) = field("vocab_sha256")?;
        let (i, nanos) = field("encrypt_nanos")?;
        let encrypt_nanos: u64 = nanos
            .parse()
            .map_err(|_| AppError::format(origin, i + 1, "encrypt_nanos must be an integer"))?;

        let (i, line) = lines
            .next()
            .ok_or_else(|| AppError::format(origin, 0, "missing ciphertext block"))?;
        let len: usize = line
            .strip_prefix("ciphertext ")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| AppError::format(origin, i + 1, "expected `ciphertext <len>`"))?;

        let mut b64 = String::new();
        let mut terminated = false;
        let mut last = i + 1;
        for (j, line) in lines.by_ref() {
            last = j + 1;
            if line == "end" {
                terminated = true;
                break;
            }
            b64.push_str(line.trim_end());
        }
        if !terminated {
            return Err(AppError::format(origin, last, "truncated: missing end marker"));
        }
        if let Some((j, line)) = lines.next() {
            if !line.trim().is_empty() {
                return Err(AppError::format(origin, j + 1, "trailing content after end marker"));
            }
        }
        let ciphertext = BASE64_STANDARD
            .decode(b64.as_bytes())
            .map_err(|e| AppError::format(origin, last, format!("bad base64 payload: {e}")))?;
        if ciphertext.len() != len {
            return Err(AppError::format(
                origin,
                last,
                format!("payload length {} does not match declared {len}", ciphertext.len()),
            ));
        }

        Ok(Envelope { email_id, backend, mpk_sha256, vocab_sha256, encrypt_nanos, ciphertext })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "format_version": ENVELOPE_VERSION,
            "kind": KIND,
            "email_id": self.email_id,
            "backend": self.backend.name(),
            "mpk_sha256": self.mpk_sha256,
            "vocab_sha256": self.vocab_sha256,
            "encrypt_nanos": self.encrypt_nanos,
            "ciphertext_b64": BASE64_STANDARD.encode(&self.ciphertext),
        })
    }

    pub fn from_json(value: &Value) -> Result<Envelope, AppError> {
        let origin = "request body";
        let obj = value
            .as_object()
            .ok_or_else(|| AppError::format(origin, 0, "expected a JSON object"))?;
        let str_field = |name: &str| -> Result<String, AppError> {
            obj.get(name)
                .and_then(Value::as_str)
                .map(str::to_string)
                .ok_or_else(|| AppError::format(origin, 0, format!("missing string field {name:?}")))
        };
        let version = obj
            .get("format_version")
            .and_then(Value::as_u64)
            .ok_or_else(|| AppError::format(origin, 0, "missing integer field \"format_version\""))?;
        if version != u64::from(ENVELOPE_VERSION) {
            return Err(AppError::format(origin, 0, format!("unsupported format_version {version}")));
        }
        let kind = str_field("kind")?;
        if kind != KIND {
            return Err(AppError::format(origin, 0, format!("expected kind {KIND}, found {kind}")));
        }
        let backend_name = str_field("backend")?;
        let backend = Backend::parse(&backend_name)
            .ok_or_else(|| AppError::format(origin, 0, format!("unknown backend {backend_name:?}")))?;
        let encrypt_nanos = obj
            .get("encrypt_nanos")
            .and_then(Value::as_u64)
            .ok_or_else(|| AppError::format(origin, 0, "missing integer field \"encrypt_nanos\""))?;
        let ciphertext = BASE64_STANDARD
            .decode(str_field("ciphertext_b64")?.as_bytes())
            .map_err(|e| AppError::format(origin, 0, format!("bad ciphertext_b64: {e}")))?;
        Ok(Envelope {
            email_id: str_field("email_id")?,
            backend,
            mpk_sha256: str_field("mpk_sha256")?,
            vocab_sha256: str_field("vocab_sha256")?,
            encrypt_nanos,
            ciphertext,
        })
    }
}

/// Wraps a base64 string at 76 columns, one trailing newline per line.
fn wrap76(b64: &str) -> String {
    let mut out = String::with_capacity(b64.len() + b64.len() / 76 + 1);
    let bytes = b64.as_bytes();
    for chunk in bytes.chunks(76) {
        out.push_str(std::str::from_utf8(chunk).expect("base64 is ascii"));
        out.push('\n');
    }
    out
}
