//! Pipeline configuration: a versioned TOML file validated against a fixed
//! schema before any command runs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use fe_scheme::{Backend, GroupParams};
use quad_net::train::TrainConfig;
use sha2::{Digest, Sha256};
use toml::Table;

use crate::error::AppError;

pub const CONFIG_VERSION: i64 = 1;

/// Where prepare reads its raw emails from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DatasetRoot {
    /// Directory holding `ham/*.txt` and `spam/*.txt`.
    Dir(PathBuf),
    /// The bundled synthetic generator, `docs` emails.
    Synthetic { docs: usize },
}

/// Validated configuration for every command.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub dataset: DatasetRoot,
    pub split_ratio: f64,
    pub split_seed: u64,
    /// Vocabulary size after information-gain selection.
    pub n: usize,
    pub bit_width: u8,
    /// Per-term count cap; larger counts saturate before encryption.
    pub x_max: u32,
    pub backend: Backend,
    pub group: GroupParams,
    pub keygen_seed: u64,
    pub train: TrainConfig,
    pub lab_seed: u64,
    pub port: u16,
    pub artifacts_dir: PathBuf,
}

impl PipelineConfig {
    /// Loads and validates a config file. Relative paths resolve against
    /// the config file's directory.
    pub fn load(path: &Path) -> Result<PipelineConfig, AppError> {
        let text = fs::read_to_string(path).map_err(|e| AppError::io(path.display(), e))?;
        let p = path.display().to_string();
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| AppError::config(&p, e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));

        check_keys(&p, "", &table, &["version", "dataset", "features", "fe", "train", "lab", "service", "artifacts"])?;
        let version = int(&p, &table, "", "version")?;
        if version != CONFIG_VERSION {
            return Err(AppError::config(&p, format!("unsupported version {version}, expected {CONFIG_VERSION}")));
        }

        let dataset = section(&p, &table, "dataset")?;
        check_keys(&p, "dataset", dataset, &["root", "synthetic_docs", "split_ratio", "split_seed"])?;
        let root = string(&p, dataset, "dataset", "root")?;
        let synthetic_docs = opt_int(&p, dataset, "dataset", "synthetic_docs")?.unwrap_or(2000);
        bounds(&p, "dataset.synthetic_docs", synthetic_docs, 4, 10_000_000)?;
        let dataset_root = if root == "synthetic" {
            DatasetRoot::Synthetic { docs: synthetic_docs as usize }
        } else {
            DatasetRoot::Dir(base.join(root))
        };
        let split_ratio = float(&p, dataset, "dataset", "split_ratio")?;
        if !(split_ratio > 0.0 && split_ratio < 1.0) {
            return Err(AppError::config(&p, format!("dataset.split_ratio must lie in (0, 1), found {split_ratio}")));
        }
        let split_seed = seed(&p, dataset, "dataset", "split_seed")?;

        let features = section(&p, &table, "features")?;
        check_keys(&p, "features", features, &["n", "bit_width", "x_max"])?;
        let n = int(&p, features, "features", "n")?;
        bounds(&p, "features.n", n, 1, 100_000)?;
        let bit_width = int(&p, features, "features", "bit_width")?;
        if bit_width != 4 && bit_width != 8 {
            return Err(AppError::config(&p, format!("features.bit_width must be 4 or 8, found {bit_width}")));
        }
        let x_max = int(&p, features, "features", "x_max")?;
        bounds(&p, "features.x_max", x_max, 1, i64::from(u32::MAX))?;

        let fe = section(&p, &table, "fe")?;
        check_keys(&p, "fe", fe, &["backend", "curve", "keygen_seed"])?;
        let backend_name = string(&p, fe, "fe", "backend")?;
        let backend = Backend::parse(&backend_name)
            .ok_or_else(|| AppError::config(&p, format!("fe.backend must be \"pairing\" or \"oracle\", found {backend_name:?}")))?;
        let curve = string(&p, fe, "fe", "curve")?;
        let group = GroupParams::new(&curve).map_err(|e| AppError::config(&p, e.to_string()))?;
        let keygen_seed = seed(&p, fe, "fe", "keygen_seed")?;

        let train_tbl = section(&p, &table, "train")?;
        check_keys(&p, "train", train_tbl, &["epochs", "d", "t", "learning_rate", "batch_size", "momentum", "seed"])?;
        let epochs = int(&p, train_tbl, "train", "epochs")?;
        bounds(&p, "train.epochs", epochs, 1, 100_000)?;
        let d = int(&p, train_tbl, "train", "d")?;
        bounds(&p, "train.d", d, 1, 10_000)?;
        let t = int(&p, train_tbl, "train", "t")?;
        bounds(&p, "train.t", t, 1, 10_000)?;
        let learning_rate = float(&p, train_tbl, "train", "learning_rate")?;
        if !(learning_rate > 0.0 && learning_rate.is_finite()) {
            return Err(AppError::config(&p, format!("train.learning_rate must be positive, found {learning_rate}")));
        }
        let batch_size = int(&p, train_tbl, "train", "batch_size")?;
        bounds(&p, "train.batch_size", batch_size, 1, 1_000_000)?;
        let momentum = float(&p, train_tbl, "train", "momentum")?;
        if !(0.0..1.0).contains(&momentum) {
            return Err(AppError::config(&p, format!("train.momentum must lie in [0, 1), found {momentum}")));
        }
        let train_seed = seed(&p, train_tbl, "train", "seed")?;
        let train = TrainConfig {
            epochs: epochs as usize,
            learning_rate,
            batch_size: batch_size as usize,
            momentum,
            seed: train_seed,
            d: d as usize,
            t: t as usize,
        };

        let lab = section(&p, &table, "lab")?;
        check_keys(&p, "lab", lab, &["seed"])?;
        let lab_seed = seed(&p, lab, "lab", "seed")?;

        let service = section(&p, &table, "service")?;
        check_keys(&p, "service", service, &["port"])?;
        let port = int(&p, service, "service", "port")?;
        bounds(&p, "service.port", port, 0, i64::from(u16::MAX))?;

        let artifacts = section(&p, &table, "artifacts")?;
        check_keys(&p, "artifacts", artifacts, &["dir"])?;
        let dir = string(&p, artifacts, "artifacts", "dir")?;
        if dir.is_empty() {
            return Err(AppError::config(&p, "artifacts.dir must not be empty"));
        }

        Ok(PipelineConfig {
            dataset: dataset_root,
            split_ratio,
            split_seed,
            n: n as usize,
            bit_width: bit_width as u8,
            x_max: x_max as u32,
            backend,
            group,
            keygen_seed,
            train,
            lab_seed,
            port: port as u16,
            artifacts_dir: base.join(dir),
        })
    }

    /// Canonical key=value rendering; comments and key order in the source
    /// file do not affect it, command-line overrides do.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "version={CONFIG_VERSION}");
        match &self.dataset {
            DatasetRoot::Dir(p) => {
                let _ = writeln!(out, "dataset.root={}", p.display());
            }
            DatasetRoot::Synthetic { docs } => {
                let _ = writeln!(out, "dataset.root=synthetic");
                let _ = writeln!(out, "dataset.synthetic_docs={docs}");
            }
        }
        let _ = writeln!(out, "dataset.split_ratio={}", self.split_ratio);
        let _ = writeln!(out, "dataset.split_seed={}", self.split_seed);
        let _ = writeln!(out, "features.n={}", self.n);
        let _ = writeln!(out, "features.bit_width={}", self.bit_width);
        let _ = writeln!(out, "features.x_max={}", self.x_max);
        let _ = writeln!(out, "fe.backend={}", self.backend.name());
        let _ = writeln!(out, "fe.curve={}", self.group.curve.name());
        let _ = writeln!(out, "fe.keygen_seed={}", self.keygen_seed);
        let _ = writeln!(out, "train.epochs={}", self.train.epochs);
        let _ = writeln!(out, "train.d={}", self.train.d);
        let _ = writeln!(out, "train.t={}", self.train.t);
        let _ = writeln!(out, "train.learning_rate={}", self.train.learning_rate);
        let _ = writeln!(out, "train.batch_size={}", self.train.batch_size);
        let _ = writeln!(out, "train.momentum={}", self.train.momentum);
        let _ = writeln!(out, "train.seed={}", self.train.seed);
        let _ = writeln!(out, "lab.seed={}", self.lab_seed);
        let _ = writeln!(out, "service.port={}", self.port);
        out
    }

    /// SHA-256 of the canonical rendering, embedded in produced artifacts.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.canonical().as_bytes());
        quad_net::train::hex(&hasher.finalize())
    }

    pub fn artifact(&self, name: &str) -> PathBuf {
        self.artifacts_dir.join(name)
    }

    /// Applies command-line overrides: `--backend` replaces the backend,
    /// `--seed` reseeds every randomized stage at once.
    pub fn apply_overrides(&mut self, seed: Option<u64>, backend: Option<Backend>) {
        if let Some(b) = backend {
            self.backend = b;
        }
        if let Some(s) = seed {
            self.split_seed = s;
            self.train.seed = s;
            self.keygen_seed = s;
            self.lab_seed = s;
        }
    }
}

fn section<'a>(path: &str, table: &'a Table, name: &str) -> Result<&'a Table, AppError> {
    table
        .get(name)
        .ok_or_else(|| AppError::config(path, format!("missing [{name}] section")))?
        .as_table()
        .ok_or_else(|| AppError::config(path, format!("{name} must be a table")))
}

fn check_keys(path: &str, section: &str, table: &Table, allowed: &[&str]) -> Result<(), AppError> {
    for key in table.keys() {
        if !allowed.contains(&key.as_str()) {
            let qualified = if section.is_empty() { key.clone() } else { format!("{section}.{key}") };
            return Err(AppError::config(path, format!("unknown key {qualified:?} (allowed: {})", allowed.join(", "))));
        }
    }
    Ok(())
}

fn value<'a>(path: &str, table: &'a Table, section: &str, key: &str) -> Result<&'a toml::Value, AppError> {
    table.get(key).ok_or_else(|| {
        let qualified = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
        AppError::config(path, format!("missing key {qualified}"))
    })
}

fn int(path: &str, table: &Table, section: &str, key: &str) -> Result<i64, AppError> {
    value(path, table, section, key)?
        .as_integer()
        .ok_or_else(|| AppError::config(path, format!("{section}.{key} must be an integer")))
}

fn opt_int(path: &str, table: &Table, section: &str, key: &str) -> Result<Option<i64>, AppError> {
    match table.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_integer()
            .map(Some)
            .ok_or_else(|| AppError::config(path, format!("{section}.{key} must be an integer"))),
    }
}

fn float(path: &str, table: &Table, section: &str, key: &str) -> Result<f64, AppError> {
    let v = value(path, table, section, key)?;
    v.as_float()
        .or_else(|| v.as_integer().map(|i| i as f64))
        .ok_or_else(|| AppError::config(path, format!("{section}.{key} must be a number")))
}

fn string(path: &str, table: &Table, section: &str, key: &str) -> Result<String, AppError> {
    Ok(value(path, table, section, key)?
        .as_str()
        .ok_or_else(|| AppError::config(path, format!("{section}.{key} must be a string")))?
        .to_string())
}

fn seed(path: &str, table: &Table, section: &str, key: &str) -> Result<u64, AppError> {
    let raw = int(path, table, section, key)?;
    u64::try_from(raw)
        .map_err(|_| AppError::config(path, format!("{section}.{key} must be non-negative")))
}

fn bounds(path: &str, what: &str, found: i64, min: i64, max: i64) -> Result<(), AppError> {
    if found < min || found > max {
        return Err(AppError::config(path, format!("{what} must lie in [{min}, {max}], found {found}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(dir: &Path, body: &str) -> PathBuf {
        let path = dir.join("spamfilter.toml");
        let mut f = fs::File::create(&path).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        path
    }

    pub(crate) const SAMPLE: &str = r#"
version = 1

[dataset]
root = "synthetic"
synthetic_docs = 200
split_ratio = 0.8
split_seed = 17

[features]
n = 24
bit_width = 4
x_max = 10

[fe]
backend = "oracle"
curve = "bls12-381"
keygen_seed = 1009

[train]
epochs = 6
d = 8
t = 6
learning_rate = 0.05
batch_size = 32
momentum = 0.9
seed = 42

[lab]
seed = 11

[service]
port = 0

[artifacts]
dir = "artifacts"
"#;

    #[test]
    fn sample_config_loads_and_digests_stably() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(dir.path(), SAMPLE);
        let cfg = PipelineConfig::load(&path).unwrap();
        assert_eq!(cfg.n, 24);
        assert_eq!(cfg.backend, Backend::Oracle);
        assert_eq!(cfg.artifacts_dir, dir.path().join("artifacts"));

        let commented = SAMPLE.replace("[features]", "# a comment\n[features]");
        let path2 = write_config(dir.path(), &commented);
        let cfg2 = PipelineConfig::load(&path2).unwrap();
        assert_eq!(cfg.digest(), cfg2.digest());

        let mut overridden = cfg.clone();
        overridden.apply_overrides(Some(5), None);
        assert_ne!(cfg.digest(), overridden.digest());
    }

    #[test]
    fn schema_violations_are_rejected_with_the_key_name() {
        let dir = tempfile::tempdir().unwrap();
        for (needle, mutation) in [
            ("version", SAMPLE.replace("version = 1", "version = 9")),
            ("bit_width", SAMPLE.replace("bit_width = 4", "bit_width = 5")),
            ("split_ratio", SAMPLE.replace("split_ratio = 0.8", "split_ratio = 1.5")),
            ("backend", SAMPLE.replace("\"oracle\"", "\"quantum\"")),
            ("unknown", SAMPLE.replace("[lab]\nseed = 11", "[lab]\nseed = 11\nextra = 3")),
        ] {
            let path = write_config(dir.path(), &mutation);
            let err = PipelineConfig::load(&path).unwrap_err();
            assert!(matches!(err, AppError::Config { .. }), "{needle}: {err}");
            let msg = err.to_string();
            assert!(
                msg.contains(needle) || needle == "unknown" && msg.contains("extra"),
                "{needle} missing from {msg:?}"
            );
        }
    }

    #[test]
    fn missing_sections_and_keys_are_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(dir.path(), &SAMPLE.replace("[lab]\nseed = 11\n", ""));
        let err = PipelineConfig::load(&path).unwrap_err().to_string();
        assert!(err.contains("[lab]"), "{err}");

        let path = write_config(dir.path(), &SAMPLE.replace("x_max = 10\n", ""));
        let err = PipelineConfig::load(&path).unwrap_err().to_string();
        assert!(err.contains("features.x_max"), "{err}");
    }
}
