//! Vocabulary construction, information gain and feature selection.

use std::collections::{BTreeSet, HashMap};

use crate::error::PipelineError;
use crate::types::{FeatureVector, TokenizedEmail};

/// Term dictionary with per-class document frequencies.
///
/// Term indices are dense and assigned in lexicographic term order.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
    /// Per term: number of ham / spam documents containing it at least once.
    doc_freq: Vec<[u32; 2]>,
    total_docs: [u32; 2],
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term(&self, i: usize) -> &str {
        &self.terms[i]
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    /// Document frequency of term index `i` as [ham, spam] counts.
    pub fn doc_freq(&self, i: usize) -> [u32; 2] {
        self.doc_freq[i]
    }

    pub fn total_docs(&self) -> [u32; 2] {
        self.total_docs
    }

    /// Assembles a vocabulary from parts that already satisfy the
    /// structural invariants. Used by the artifact loader.
    pub(crate) fn from_parts(
        terms: Vec<String>,
        doc_freq: Vec<[u32; 2]>,
        total_docs: [u32; 2],
    ) -> Vocabulary {
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocabulary { terms, index, doc_freq, total_docs }
    }

    /// Information gain of a term in bits, from document-level presence.
    pub fn information_gain(&self, term: &str) -> Result<f64, PipelineError> {
        let i = self
            .index_of(term)
            .ok_or_else(|| PipelineError::UnknownTerm { term: term.to_string() })?;
        Ok(self.information_gain_by_index(i))
    }

    pub fn information_gain_by_index(&self, i: usize) -> f64 {
        let present = self.doc_freq[i];
        let absent = [self.total_docs[0] - present[0], self.total_docs[1] - present[1]];
        let total = (self.total_docs[0] + self.total_docs[1]) as f64;
        let p_present = (present[0] + present[1]) as f64 / total;
        let ig = entropy(self.total_docs)
            - p_present * entropy(present)
            - (1.0 - p_present) * entropy(absent);
        // Floating-point cancellation can leave a tiny negative residue.
        ig.max(0.0)
    }

    /// Retains the `n` terms with the highest information gain.
    ///
    /// Ties are broken lexicographically; the surviving terms are re-indexed
    /// densely, again in lexicographic order.
    pub fn select_features(&self, n: usize) -> Result<Vocabulary, PipelineError> {
        if n > self.len() {
            return Err(PipelineError::NTooLarge { requested: n, available: self.len() });
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.information_gain_by_index(b)
                .partial_cmp(&self.information_gain_by_index(a))
                .expect("information gain is finite")
                .then_with(|| self.terms[a].cmp(&self.terms[b]))
        });
        let selected: BTreeSet<usize> = order.into_iter().take(n).collect();
        let mut terms = Vec::with_capacity(n);
        let mut doc_freq = Vec::with_capacity(n);
        for i in selected {
            terms.push(self.terms[i].clone());
            doc_freq.push(self.doc_freq[i]);
        }
        Ok(Vocabulary::from_parts(terms, doc_freq, self.total_docs))
    }
}

/// Base-2 entropy of a two-class count distribution.
fn entropy(counts: [u32; 2]) -> f64 {
    let total = (counts[0] + counts[1]) as f64;
    if total == 0.0 {
        return 0.0;
    }
    let mut h = 0.0;
    for c in counts {
        if c > 0 {
            let p = c as f64 / total;
            h -= p * p.log2();
        }
    }
    h
}

/// Builds the full vocabulary of a labeled corpus.
pub fn build_vocabulary(corpus: &[TokenizedEmail]) -> Result<Vocabulary, PipelineError> {
    if corpus.is_empty() {
        return Err(PipelineError::EmptyCorpus);
    }
    let mut total_docs = [0u32; 2];
    let mut df: HashMap<&str, [u32; 2]> = HashMap::new();
    for email in corpus {
        let label =
            email.label.ok_or_else(|| PipelineError::Unlabeled { id: email.id.clone() })?;
        total_docs[label.index()] += 1;
        let distinct: BTreeSet<&str> = email.tokens.iter().map(String::as_str).collect();
        for term in distinct {
            df.entry(term).or_default()[label.index()] += 1;
        }
    }
    let mut terms: Vec<String> = df.keys().map(|t| t.to_string()).collect();
    terms.sort();
    let doc_freq = terms.iter().map(|t| df[t.as_str()]).collect();
    Ok(Vocabulary::from_parts(terms, doc_freq, total_docs))
}

/// Counts vocabulary-term occurrences in one email.
///
/// Out-of-vocabulary tokens are ignored.
pub fn vectorize(email: &TokenizedEmail, vocab: &Vocabulary) -> FeatureVector {
    let mut counts = vec![0u32; vocab.len()];
    for token in &email.tokens {
        if let Some(i) = vocab.index_of(token) {
            counts[i] += 1;
        }
    }
    FeatureVector { counts }
}

/// Clamps counts to presence indicators. Shrinks the value range the
/// encrypted evaluation has to cover.
pub fn binarize(v: &mut FeatureVector) {
    for c in &mut v.counts {
        *c = (*c).min(1);
    }
}
