//! Email normalization: tokenize, filter, stem.

use crate::error::{PipelineError, RejectReason};
use crate::porter;
use crate::types::{RawEmail, TokenizedEmail};

/// Minimum token count for an email to be usable.
pub const MIN_TOKENS: usize = 10;
/// Maximum token count for an email to be usable.
pub const MAX_TOKENS: usize = 100;
/// Words longer than this are dropped before stemming.
pub const MAX_TOKEN_LEN: usize = 15;

/// Normalizes an email into a token stream.
///
/// Subject and body are concatenated, lowercased and split on whitespace.
/// Words containing digits are dropped, remaining non-alphabetic characters
/// are stripped, words longer than 15 characters are dropped, and each
/// surviving word is Porter-stemmed. Emails with fewer than 10 or more than
/// 100 tokens after filtering are rejected.
pub fn preprocess(raw: &RawEmail) -> Result<TokenizedEmail, PipelineError> {
    let mut text = String::with_capacity(raw.subject.len() + raw.body.len() + 1);
    text.push_str(&raw.subject);
    text.push(' ');
    text.push_str(&raw.body);

    let tokens = tokenize(&text);
    if tokens.len() < MIN_TOKENS {
        return Err(PipelineError::Rejected {
            reason: RejectReason::TooShort { tokens: tokens.len() },
        });
    }
    if tokens.len() > MAX_TOKENS {
        return Err(PipelineError::Rejected {
            reason: RejectReason::TooLong { tokens: tokens.len() },
        });
    }
    Ok(TokenizedEmail { id: raw.id.clone(), tokens, label: raw.label })
}

/// Tokenizes free text without applying the length-based rejection policy.
pub fn tokenize(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    let mut tokens = Vec::new();
    for word in lowered.split_whitespace() {
        if word.chars().any(|c| c.is_ascii_digit()) {
            continue;
        }
        let cleaned: String = word.chars().filter(|c| c.is_ascii_lowercase()).collect();
        if cleaned.is_empty() || cleaned.len() > MAX_TOKEN_LEN {
            continue;
        }
        tokens.push(porter::stem(&cleaned));
    }
    tokens
}

/// Inverse of tokenization for normalized streams: joins tokens with spaces.
pub fn render_tokens(tokens: &[String]) -> String {
    tokens.join(" ")
}
