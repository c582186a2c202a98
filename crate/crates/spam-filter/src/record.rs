//! Classification record: the outcome of one encrypted classification with
//! its per-phase timings.

use fe_scheme::Backend;
use serde_json::{json, Value};
use text_pipeline::Label;

use crate::error::AppError;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationRecord {
    pub email_id: String,
    pub label: Label,
    pub backend: Backend,
    pub spam_prob: f64,
    pub encrypt_nanos: u64,
    pub evaluate_nanos: u64,
    pub dlog_nanos: u64,
    pub plaintext_nanos: u64,
}

impl ClassificationRecord {
    pub fn render(&self) -> String {
        format!(
            "email_id: {}\nlabel: {}\nbackend: {}\nspam_prob: {:.6}\n\
             encrypt_nanos: {}\nevaluate_nanos: {}\ndlog_nanos: {}\nplaintext_nanos: {}\n",
            self.email_id,
            self.label.as_str(),
            self.backend.name(),
            self.spam_prob,
            self.encrypt_nanos,
            self.evaluate_nanos,
            self.dlog_nanos,
            self.plaintext_nanos,
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "email_id": self.email_id,
            "label": self.label.as_str(),
            "backend": self.backend.name(),
            "spam_prob": self.spam_prob,
            "encrypt_nanos": self.encrypt_nanos,
            "evaluate_nanos": self.evaluate_nanos,
            "dlog_nanos": self.dlog_nanos,
            "plaintext_nanos": self.plaintext_nanos,
        })
    }

    /// Exit code contract: 0 for ham, 10 for spam. Errors exit 1 elsewhere.
    pub fn exit_code(&self) -> u8 {
        match self.label {
            Label::Ham => 0,
            Label::Spam => 10,
        }
    }

    pub fn from_json(value: &Value) -> Result<ClassificationRecord, AppError> {
        let origin = "response body";
        let obj = value
            .as_object()
            .ok_or_else(|| AppError::format(origin, 0, "expected a JSON object"))?;
        let str_field = |name: &str| -> Result<&str, AppError> {
            obj.get(name)
                .and_then(Value::as_str)
                .ok_or_else(|| AppError::format(origin, 0, format!("missing string field {name:?}")))
        };
        let u64_field = |name: &str| -> Result<u64, AppError> {
            obj.get(name)
                .and_then(Value::as_u64)
                .ok_or_else(|| AppError::format(origin, 0, format!("missing integer field {name:?}")))
        };
        let label_name = str_field("label")?;
        let label = Label::parse(label_name)
            .ok_or_else(|| AppError::format(origin, 0, format!("unknown label {label_name:?}")))?;
        let backend_name = str_field("backend")?;
        let backend = Backend::parse(backend_name)
            .ok_or_else(|| AppError::format(origin, 0, format!("unknown backend {backend_name:?}")))?;
        let spam_prob = obj
            .get("spam_prob")
            .and_then(Value::as_f64)
            .ok_or_else(|| AppError::format(origin, 0, "missing number field \"spam_prob\""))?;
        Ok(ClassificationRecord {
            email_id: str_field("email_id")?.to_string(),
            label,
            backend,
            spam_prob,
            encrypt_nanos: u64_field("encrypt_nanos")?,
            evaluate_nanos: u64_field("evaluate_nanos")?,
            dlog_nanos: u64_field("dlog_nanos")?,
            plaintext_nanos: u64_field("plaintext_nanos")?,
        })
    }
}
