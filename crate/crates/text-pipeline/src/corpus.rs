//! Corpus loaders for directory and TREC-style index layouts.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::PipelineError;
use crate::types::{Label, RawEmail};

/// Loads a corpus laid out as `<root>/spam/*.txt` and `<root>/ham/*.txt`.
///
/// File order within each class directory is sorted by file name, so ids
/// and downstream artifacts are reproducible.
pub fn load_dir(root: &Path) -> Result<Vec<RawEmail>, PipelineError> {
    let mut emails = Vec::new();
    for (dir, label) in [("ham", Label::Ham), ("spam", Label::Spam)] {
        let class_dir = root.join(dir);
        let mut files: Vec<PathBuf> = fs::read_dir(&class_dir)
            .map_err(|e| PipelineError::io(class_dir.display().to_string(), e))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        files.sort();
        for path in files {
            let id = format!("{dir}/{}", file_name(&path));
            emails.push(load_email_file(&path, id, Some(label))?);
        }
    }
    Ok(emails)
}

/// Loads a TREC-style corpus: `<root>/full/index` holds `<label> <path>`
/// lines with paths relative to the index file's directory.
pub fn load_trec(root: &Path) -> Result<Vec<RawEmail>, PipelineError> {
    let index_path = root.join("full").join("index");
    let text = read_text(&index_path)?;
    let base = index_path.parent().expect("index path has a parent").to_path_buf();
    let mut emails = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (label_str, rel) = line.split_once(char::is_whitespace).ok_or_else(|| {
            PipelineError::format(
                index_path.display().to_string(),
                lineno + 1,
                "expected '<label> <path>'",
            )
        })?;
        let label = Label::parse(label_str).ok_or_else(|| {
            PipelineError::format(
                index_path.display().to_string(),
                lineno + 1,
                format!("unknown label {label_str:?}"),
            )
        })?;
        let path = base.join(rel.trim());
        emails.push(load_email_file(&path, rel.trim().to_string(), Some(label))?);
    }
    Ok(emails)
}

/// Loads a single email file without a label, e.g. for classification.
pub fn load_unlabeled(path: &Path) -> Result<RawEmail, PipelineError> {
    load_email_file(path, file_name(path), None)
}

/// Parses already-loaded message text: strips markup and splits off a
/// leading `Subject:` header. Shares the interpretation used by the file
/// loaders so in-memory submissions classify exactly like files on disk.
pub fn parse_email_text(id: &str, text: &str) -> RawEmail {
    let stripped = strip_html(text);
    let (subject, body) = split_subject(&stripped);
    RawEmail { id: id.to_string(), subject, body, label: None }
}

fn load_email_file(
    path: &Path,
    id: String,
    label: Option<Label>,
) -> Result<RawEmail, PipelineError> {
    let text = read_text(path)?;
    let raw = parse_email_text(&id, &text);
    Ok(RawEmail { label, ..raw })
}

fn read_text(path: &Path) -> Result<String, PipelineError> {
    let bytes = fs::read(path).map_err(|e| PipelineError::io(path.display().to_string(), e))?;
    String::from_utf8(bytes).map_err(|e| PipelineError::Decode { position: e.utf8_error().valid_up_to() })
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Pulls a leading `Subject:` header out of the message text.
fn split_subject(text: &str) -> (String, String) {
    if let Some(rest) = text.strip_prefix("Subject:") {
        match rest.split_once('\n') {
            Some((subject, body)) => (subject.trim().to_string(), body.to_string()),
            None => (rest.trim().to_string(), String::new()),
        }
    } else {
        (String::new(), text.to_string())
    }
}

/// Removes HTML markup: script/style elements with their contents, all
/// remaining tags, and the most common character entities.
pub fn strip_html(text: &str) -> String {
    let without_blocks = remove_blocks(&remove_blocks(text, "script"), "style");
    let mut out = String::with_capacity(without_blocks.len());
    let mut in_tag = false;
    for c in without_blocks.chars() {
        match c {
            '<' => in_tag = true,
            '>' if in_tag => {
                in_tag = false;
                out.push(' ');
            }
            _ if !in_tag => out.push(c),
            _ => {}
        }
    }
    decode_entities(&out)
}

fn remove_blocks(text: &str, element: &str) -> String {
    let open = format!("<{element}");
    let close = format!("</{element}>");
    let lower = text.to_lowercase();
    let mut out = String::with_capacity(text.len());
    let mut pos = 0;
    while let Some(start) = lower[pos..].find(&open) {
        let start = pos + start;
        out.push_str(&text[pos..start]);
        match lower[start..].find(&close) {
            Some(end) => pos = start + end + close.len(),
            None => return out,
        }
    }
    out.push_str(&text[pos..]);
    out
}

fn decode_entities(text: &str) -> String {
    text.replace("&nbsp;", " ")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&quot;", "\"")
        .replace("&#39;", "'")
        .replace("&amp;", "&")
}
