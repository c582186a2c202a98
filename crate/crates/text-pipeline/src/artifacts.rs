//! Plain-text artifact formats for processed corpora, vocabularies and
//! splits. All files begin with a `format_version: 1` header line followed
//! by a `kind:` line naming the artifact.

use std::fs;
use std::path::Path;

use crate::error::PipelineError;
use crate::types::{Label, TokenizedEmail};
use crate::vocab::Vocabulary;

pub const FORMAT_VERSION: u32 = 1;

/// Serializes a processed corpus: one record per line,
/// `id <TAB> label <TAB> space-joined tokens`.
pub fn corpus_to_string(corpus: &[TokenizedEmail]) -> String {
    let mut out = String::new();
    out.push_str(&format!("format_version: {FORMAT_VERSION}\n"));
    out.push_str("kind: corpus\n");
    for email in corpus {
        let label = email.label.map(|l| l.as_str()).unwrap_or("-");
        out.push_str(&format!("{}\t{}\t{}\n", email.id, label, email.tokens.join(" ")));
    }
    out
}

pub fn write_corpus(path: &Path, corpus: &[TokenizedEmail]) -> Result<(), PipelineError> {
    fs::write(path, corpus_to_string(corpus))
        .map_err(|e| PipelineError::io(path.display().to_string(), e))
}

pub fn read_corpus(path: &Path) -> Result<Vec<TokenizedEmail>, PipelineError> {
    let text = fs::read(path)
        .map_err(|e| PipelineError::io(path.display().to_string(), e))
        .and_then(|bytes| {
            String::from_utf8(bytes)
                .map_err(|e| PipelineError::Decode { position: e.utf8_error().valid_up_to() })
        })?;
    let p = path.display().to_string();
    let mut lines = text.lines().enumerate();
    expect_header(&p, &mut lines, "corpus")?;

    let mut corpus = Vec::new();
    for (lineno, line) in lines {
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let id = fields.next().unwrap_or_default();
        let label = fields
            .next()
            .ok_or_else(|| PipelineError::format(&p, lineno + 1, "missing label field"))?;
        let tokens = fields
            .next()
            .ok_or_else(|| PipelineError::format(&p, lineno + 1, "missing token field"))?;
        if fields.next().is_some() {
            return Err(PipelineError::format(&p, lineno + 1, "too many fields"));
        }
        let label = match label {
            "-" => None,
            other => Some(Label::parse(other).ok_or_else(|| {
                PipelineError::format(&p, lineno + 1, format!("unknown label {other:?}"))
            })?),
        };
        let tokens: Vec<String> = tokens.split(' ').map(str::to_string).collect();
        for t in &tokens {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_lowercase()) {
                return Err(PipelineError::format(
                    &p,
                    lineno + 1,
                    format!("token {t:?} is not lowercase alphabetic"),
                ));
            }
        }
        corpus.push(TokenizedEmail { id: id.to_string(), tokens, label });
    }
    Ok(corpus)
}

/// Serializes a vocabulary: totals in the header, then one term per line,
/// `term <TAB> df_ham <TAB> df_spam <TAB> information_gain`, in index order.
pub fn vocabulary_to_string(vocab: &Vocabulary) -> String {
    let mut out = String::new();
    out.push_str(&format!("format_version: {FORMAT_VERSION}\n"));
    out.push_str("kind: vocabulary\n");
    let totals = vocab.total_docs();
    out.push_str(&format!("total_ham: {}\n", totals[0]));
    out.push_str(&format!("total_spam: {}\n", totals[1]));
    for i in 0..vocab.len() {
        let df = vocab.doc_freq(i);
        out.push_str(&format!(
            "{}\t{}\t{}\t{:.6}\n",
            vocab.term(i),
            df[0],
            df[1],
            vocab.information_gain_by_index(i)
        ));
    }
    out
}

pub fn write_vocabulary(path: &Path, vocab: &Vocabulary) -> Result<(), PipelineError> {
    fs::write(path, vocabulary_to_string(vocab))
        .map_err(|e| PipelineError::io(path.display().to_string(), e))
}

pub fn read_vocabulary(path: &Path) -> Result<Vocabulary, PipelineError> {
    let text = fs::read_to_string(path)
        .map_err(|e| PipelineError::io(path.display().to_string(), e))?;
    let p = path.display().to_string();
    let mut lines = text.lines().enumerate();
    expect_header(&p, &mut lines, "vocabulary")?;
    let total_ham = parse_header_u32(&p, &mut lines, "total_ham")?;
    let total_spam = parse_header_u32(&p, &mut lines, "total_spam")?;

    let mut terms: Vec<String> = Vec::new();
    let mut doc_freq: Vec<[u32; 2]> = Vec::new();
    for (lineno, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(PipelineError::format(&p, lineno + 1, "expected 4 fields"));
        }
        let term = fields[0].to_string();
        if let Some(prev) = terms.last() {
            if *prev >= term {
                return Err(PipelineError::format(
                    &p,
                    lineno + 1,
                    format!("terms out of order: {prev:?} before {term:?}"),
                ));
            }
        }
        let df_ham: u32 = fields[1]
            .parse()
            .map_err(|_| PipelineError::format(&p, lineno + 1, "bad ham document frequency"))?;
        let df_spam: u32 = fields[2]
            .parse()
            .map_err(|_| PipelineError::format(&p, lineno + 1, "bad spam document frequency"))?;
        if df_ham > total_ham || df_spam > total_spam {
            return Err(PipelineError::format(
                &p,
                lineno + 1,
                "document frequency exceeds class total",
            ));
        }
        terms.push(term);
        doc_freq.push([df_ham, df_spam]);
    }
    Ok(Vocabulary::from_parts(terms, doc_freq, [total_ham, total_spam]))
}

/// Serializes a split as `train|test <TAB> id` lines.
pub fn split_to_string(train_ids: &[String], test_ids: &[String], ratio: f64, seed: u64) -> String {
    let mut out = String::new();
    out.push_str(&format!("format_version: {FORMAT_VERSION}\n"));
    out.push_str("kind: split\n");
    out.push_str(&format!("ratio: {ratio}\n"));
    out.push_str(&format!("seed: {seed}\n"));
    for id in train_ids {
        out.push_str(&format!("train\t{id}\n"));
    }
    for id in test_ids {
        out.push_str(&format!("test\t{id}\n"));
    }
    out
}

pub fn write_split(
    path: &Path,
    train_ids: &[String],
    test_ids: &[String],
    ratio: f64,
    seed: u64,
) -> Result<(), PipelineError> {
    fs::write(path, split_to_string(train_ids, test_ids, ratio, seed))
        .map_err(|e| PipelineError::io(path.display().to_string(), e))
}

/// Returns (train ids, test ids).
pub fn read_split(path: &Path) -> Result<(Vec<String>, Vec<String>), PipelineError> {
    let text = fs::read_to_string(path)
        .map_err(|e| PipelineError::io(path.display().to_string(), e))?;
    let p = path.display().to_string();
    let mut lines = text.lines().enumerate();
    expect_header(&p, &mut lines, "split")?;
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (lineno, line) in lines {
        if line.is_empty() || line.starts_with("ratio:") || line.starts_with("seed:") {
            continue;
        }
        match line.split_once('\t') {
            Some(("train", id)) => train.push(id.to_string()),
            Some(("test", id)) => test.push(id.to_string()),
            _ => {
                return Err(PipelineError::format(
                    &p,
                    lineno + 1,
                    "expected 'train|test <TAB> id'",
                ))
            }
        }
    }
    Ok((train, test))
}

fn expect_header<'a>(
    path: &str,
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    kind: &str,
) -> Result<(), PipelineError> {
    let (lineno, first) = lines
        .next()
        .ok_or_else(|| PipelineError::format(path, 1, "empty file"))?;
    let version = first
        .strip_prefix("format_version: ")
        .ok_or_else(|| PipelineError::format(path, lineno + 1, "missing format_version header"))?;
    let version: u32 = version
        .trim()
        .parse()
        .map_err(|_| PipelineError::format(path, lineno + 1, "bad format_version"))?;
    if version != FORMAT_VERSION {
        return Err(PipelineError::format(
            path,
            lineno + 1,
            format!("unsupported format_version {version}"),
        ));
    }
    let (lineno, second) = lines
        .next()
        .ok_or_else(|| PipelineError::format(path, 2, "missing kind header"))?;
    match second.strip_prefix("kind: ") {
        Some(k) if k.trim() == kind => Ok(()),
        Some(k) => Err(PipelineError::format(
            path,
            lineno + 1,
            format!("expected kind {kind:?}, found {:?}", k.trim()),
        )),
        None => Err(PipelineError::format(path, lineno + 1, "missing kind header")),
    }
}

fn parse_header_u32<'a>(
    path: &str,
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    key: &str,
) -> Result<u32, PipelineError> {
    let (lineno, line) = lines
        .next()
        .ok_or_else(|| PipelineError::format(path, 0, format!("missing {key} header")))?;
    line.strip_prefix(&format!("{key}: "))
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| PipelineError::format(path, lineno + 1, format!("bad {key} header")))
}
