//! Artifact manifest: records the digest of every produced artifact so each
//! downstream command can verify its inputs before using them.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::AppError;

pub const MANIFEST_FILE: &str = "manifest.txt";

/// Key=value store persisted alongside the artifacts it describes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    entries: BTreeMap<String, String>,
    path: PathBuf,
}

impl Manifest {
    /// Opens the manifest in `dir`, or starts one fresh if none exists.
    pub fn open(dir: &Path) -> Result<Manifest, AppError> {
        let path = dir.join(MANIFEST_FILE);
        let mut manifest = Manifest { entries: BTreeMap::new(), path: path.clone() };
        if !path.exists() {
            return Ok(manifest);
        }
        let text = fs::read_to_string(&path).map_err(|e| AppError::io(path.display(), e))?;
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| AppError::format(path.display(), i + 1, "expected key=value"))?;
            manifest.entries.insert(key.to_string(), value.to_string());
        }
        Ok(manifest)
    }

    /// Opens the manifest and fails with a remediation hint if it is absent.
    pub fn require(dir: &Path, needed_by: &str) -> Result<Manifest, AppError> {
        let path = dir.join(MANIFEST_FILE);
        if !path.exists() {
            return Err(AppError::MissingArtifact {
                path: path.display().to_string(),
                hint: format!("run the commands before `{needed_by}` first"),
            });
        }
        Manifest::open(dir)
    }

    pub fn save(&self) -> Result<(), AppError> {
        if let Some(parent) = self.path.parent() {
            fs::create_dir_all(parent).map_err(|e| AppError::io(parent.display(), e))?;
        }
        let mut out = String::new();
        for (key, value) in &self.entries {
            out.push_str(key);
            out.push('=');
            out.push_str(value);
            out.push('\n');
        }
        fs::write(&self.path, out).map_err(|e| AppError::io(self.path.display(), e))
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Fetches a key that must be present, naming the producing command in
    /// the error when it is not.
    pub fn expect(&self, key: &str, produced_by: &str) -> Result<&str, AppError> {
        self.get(key).ok_or_else(|| AppError::MissingArtifact {
            path: format!("{} entry {key}", self.path.display()),
            hint: format!("run `{produced_by}` first"),
        })
    }

    /// Drops every entry whose key starts with one of the prefixes. Commands
    /// call this to invalidate downstream artifacts they supersede.
    pub fn remove_prefixes(&mut self, prefixes: &[&str]) {
        self.entries
            .retain(|key, _| !prefixes.iter().any(|p| key.starts_with(p)));
    }

    /// Hashes `path` and records it under `key`.
    pub fn record_file(&mut self, key: &str, path: &Path) -> Result<String, AppError> {
        let digest = sha256_file(path)?;
        self.set(key, digest.clone());
        Ok(digest)
    }

    /// Recomputes the digest of `path` and compares it with the recorded one.
    pub fn verify_file(&self, key: &str, path: &Path, produced_by: &str) -> Result<(), AppError> {
        if !path.exists() {
            return Err(AppError::MissingArtifact {
                path: path.display().to_string(),
                hint: format!("run `{produced_by}` first"),
            });
        }
        let expected = self.expect(key, produced_by)?;
        let found = sha256_file(path)?;
        if found != expected {
            return Err(AppError::DigestMismatch {
                artifact: path.display().to_string(),
                expected: expected.to_string(),
                found,
            });
        }
        Ok(())
    }

    /// Checks the stored config digest against the active configuration.
    pub fn verify_config(&self, digest: &str) -> Result<(), AppError> {
        let recorded = self.expect("config_digest", "spamfilter prepare")?;
        if recorded != digest {
            return Err(AppError::DigestMismatch {
                artifact: "configuration".to_string(),
                expected: recorded.to_string(),
                found: digest.to_string(),
            });
        }
        Ok(())
    }
}

/// SHA-256 of a file's contents, streamed in 64 KiB chunks.
pub fn sha256_file(path: &Path) -> Result<String, AppError> {
    let mut file = fs::File::open(path).map_err(|e| AppError::io(path.display(), e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 64 << 10];
    loop {
        let read = file.read(&mut buf).map_err(|e| AppError::io(path.display(), e))?;
        if read == 0 {
            break;
        }
        hasher.update(&buf[..read]);
    }
    Ok(quad_net::train::hex(&hasher.finalize()))
}

/// SHA-256 of an in-memory buffer.
pub fn sha256_bytes(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    quad_net::train::hex(&hasher.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_and_verifies() {
        let dir = tempfile::tempdir().unwrap();
        let artifact = dir.path().join("model.txt");
        fs::write(&artifact, b"weights").unwrap();

        let mut m = Manifest::open(dir.path()).unwrap();
        m.set("config_digest", "abc");
        m.record_file("model_sha256", &artifact).unwrap();
        m.save().unwrap();

        let loaded = Manifest::require(dir.path(), "spamfilter classify").unwrap();
        assert_eq!(loaded, m);
        loaded.verify_file("model_sha256", &artifact, "spamfilter train").unwrap();
        loaded.verify_config("abc").unwrap();

        fs::write(&artifact, b"tampered").unwrap();
        let err = loaded.verify_file("model_sha256", &artifact, "spamfilter train").unwrap_err();
        assert!(matches!(err, AppError::DigestMismatch { .. }), "{err}");

        let err = loaded.verify_config("other").unwrap_err();
        assert!(matches!(err, AppError::DigestMismatch { .. }), "{err}");
    }

    #[test]
    fn prefix_removal_invalidates_downstream_entries() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = Manifest::open(dir.path()).unwrap();
        m.set("model_sha256", "a");
        m.set("key_00_sha256", "b");
        m.set("key_01_sha256", "c");
        m.set("corpus_sha256", "d");
        m.remove_prefixes(&["model", "key_"]);
        assert_eq!(m.get("corpus_sha256"), Some("d"));
        assert_eq!(m.get("model_sha256"), None);
        assert_eq!(m.get("key_01_sha256"), None);
    }

    #[test]
    fn missing_manifest_names_the_remedy() {
        let dir = tempfile::tempdir().unwrap();
        let err = Manifest::require(dir.path(), "spamfilter classify").unwrap_err();
        assert!(matches!(err, AppError::MissingArtifact { .. }), "{err}");
        assert!(err.to_string().contains("classify"), "{err}");
    }
}
