//! Private labelings of a corpus.
//!
//! The adversary in this lab predicts a label the model owner never intended
//! to expose. Two labelings are supported: presence of a designated
//! high-information-gain word, and the planted category of the synthetic
//! dual-label corpus.

use text_pipeline::{TokenizedEmail, Vocabulary};

use crate::error::{degenerate, LeakError};
use crate::synth_dual::private_class_of;

/// How private labels are assigned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrivateScheme {
    /// Label = whether the document contains one designated word, chosen from
    /// the `k` highest-information-gain vocabulary terms. `designated`
    /// indexes into that ranked list.
    WordPresence { k: usize, designated: usize },
    /// Label = the planted category of a dual-label synthetic document.
    SyntheticCategory { classes: usize },
}

/// A complete private labeling of a corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct PrivateLabeling {
    pub scheme: PrivateScheme,
    /// One label per document, in corpus order, each in `0..classes`.
    pub labels: Vec<usize>,
    pub classes: usize,
    /// The ranked high-information-gain terms backing a word-presence
    /// labeling; empty for the synthetic scheme.
    pub terms: Vec<String>,
}

/// Vocabulary indices ranked by information gain, highest first. Ties break
/// toward the lower index so the ranking is deterministic.
pub fn rank_by_information_gain(vocab: &Vocabulary) -> Vec<usize> {
    let mut order: Vec<usize> = (0..vocab.len()).collect();
    order.sort_by(|&a, &b| {
        vocab
            .information_gain_by_index(b)
            .partial_cmp(&vocab.information_gain_by_index(a))
            .unwrap()
            .then(a.cmp(&b))
    });
    order
}

/// Labels every document in `corpus` under `scheme`.
pub fn make_private_labels(
    corpus: &[TokenizedEmail],
    vocab: &Vocabulary,
    scheme: &PrivateScheme,
) -> Result<PrivateLabeling, LeakError> {
    match *scheme {
        PrivateScheme::WordPresence { k, designated } => {
            if k == 0 || k > vocab.len() {
                return Err(LeakError::KTooLarge { k, vocab: vocab.len() });
            }
            if designated >= k {
                return Err(LeakError::KTooLarge { k: designated + 1, vocab: k });
            }
            let ranked = rank_by_information_gain(vocab);
            let terms: Vec<String> = ranked[..k]
                .iter()
                .map(|&i| vocab.term(i).to_string())
                .collect();
            let word = &terms[designated];
            let labels: Vec<usize> = corpus
                .iter()
                .map(|e| usize::from(e.tokens.iter().any(|t| t == word)))
                .collect();
            if labels.iter().all(|&l| l == 0) {
                return Err(degenerate(format!("'{word}' occurs in no document")));
            }
            if labels.iter().all(|&l| l == 1) {
                return Err(degenerate(format!("'{word}' occurs in every document")));
            }
            Ok(PrivateLabeling {
                scheme: scheme.clone(),
                labels,
                classes: 2,
                terms,
            })
        }
        PrivateScheme::SyntheticCategory { classes } => {
            if classes < 2 {
                return Err(degenerate(format!(
                    "synthetic scheme declares {classes} classes, need at least 2"
                )));
            }
            let mut labels = Vec::with_capacity(corpus.len());
            let mut seen = vec![false; classes];
            for email in corpus {
                let mut found: Option<usize> = None;
                for token in &email.tokens {
                    if let Some(c) = private_class_of(token) {
                        if c >= classes {
                            return Err(degenerate(format!(
                                "document {} carries class {c} marker, declared {classes} classes",
                                email.id
                            )));
                        }
                        if found.is_some_and(|prev| prev != c) {
                            return Err(degenerate(format!(
                                "document {} mixes markers of two classes",
                                email.id
                            )));
                        }
                        found = Some(c);
                    }
                }
                let label = found.ok_or_else(|| {
                    degenerate(format!("document {} carries no category marker", email.id))
                })?;
                seen[label] = true;
                labels.push(label);
            }
            if seen.iter().filter(|&&s| s).count() < 2 {
                return Err(degenerate("all documents fall in one category"));
            }
            Ok(PrivateLabeling {
                scheme: scheme.clone(),
                labels,
                classes,
                terms: Vec::new(),
            })
        }
    }
}

/// Fraction held by the most common label, the accuracy of always guessing it.
pub fn majority_rate(labels: &[usize]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let classes = labels.iter().max().unwrap() + 1;
    let mut counts = vec![0usize; classes];
    for &l in labels {
        counts[l] += 1;
    }
    *counts.iter().max().unwrap() as f64 / labels.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use text_pipeline::{build_vocabulary, Label};

    fn email(id: &str, tokens: &[&str], label: Label) -> TokenizedEmail {
        TokenizedEmail {
            id: id.to_string(),
            tokens: tokens.iter().map(|t| t.to_string()).collect(),
            label: Some(label),
        }
    }

    #[test]
    fn word_presence_picks_the_most_informative_word() {
        let corpus = vec![
            email("a", &["win", "cash", "hello"], Label::Spam),
            email("b", &["win", "prize"], Label::Spam),
            email("c", &["hello", "meeting"], Label::Ham),
            email("d", &["meeting", "notes"], Label::Ham),
        ];
        let vocab = build_vocabulary(&corpus).unwrap();
        let labeling = make_private_labels(
            &corpus,
            &vocab,
            &PrivateScheme::WordPresence { k: 3, designated: 0 },
        )
        .unwrap();
        assert_eq!(labeling.classes, 2);
        assert_eq!(labeling.labels.len(), 4);
        assert_eq!(labeling.terms.len(), 3);
        let word = &labeling.terms[0];
        for (e, &l) in corpus.iter().zip(&labeling.labels) {
            assert_eq!(l, usize::from(e.tokens.iter().any(|t| t == word)));
        }
    }

    #[test]
    fn oversized_k_is_rejected() {
        let corpus = vec![
            email("a", &["one", "two"], Label::Spam),
            email("b", &["two", "three"], Label::Ham),
        ];
        let vocab = build_vocabulary(&corpus).unwrap();
        let err = make_private_labels(
            &corpus,
            &vocab,
            &PrivateScheme::WordPresence { k: 100, designated: 0 },
        )
        .unwrap_err();
        assert!(matches!(err, LeakError::KTooLarge { k: 100, .. }));
    }

    #[test]
    fn majority_rate_counts_the_largest_class() {
        assert_eq!(majority_rate(&[0, 0, 1, 0]), 0.75);
        assert_eq!(majority_rate(&[]), 0.0);
    }
}
