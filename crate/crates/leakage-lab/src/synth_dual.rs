//! Dual-label synthetic corpus.
//!
//! Every generated email carries two labels drawn independently: a public
//! spam/ham label and a private category in `0..private_classes`. Each label
//! controls its own disjoint marker-word pool, and the remaining tokens come
//! from a shared background pool, so both tasks are learnable from the text
//! while the labels themselves share no information by construction. The
//! emails are emitted already tokenized; the marker names encode the class
//! they were planted for, which is what [`crate::make_private_labels`]
//! recovers for the synthetic-category scheme.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use text_pipeline::synth::word_pool;
use text_pipeline::{Label, TokenizedEmail};

/// Shape of the generated corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct DualLabelConfig {
    pub emails: usize,
    pub private_classes: usize,
    pub background_terms: usize,
    pub public_markers_per_class: usize,
    pub private_markers_per_class: usize,
    pub tokens_per_email: usize,
    pub public_marker_tokens: usize,
    pub private_marker_tokens: usize,
    pub seed: u64,
}

impl Default for DualLabelConfig {
    fn default() -> DualLabelConfig {
        DualLabelConfig {
            emails: 600,
            private_classes: 3,
            background_terms: 20,
            public_markers_per_class: 8,
            private_markers_per_class: 6,
            tokens_per_email: 24,
            public_marker_tokens: 6,
            private_marker_tokens: 7,
            seed: 7,
        }
    }
}

/// Generated emails with their two independent label sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct DualLabelCorpus {
    pub emails: Vec<TokenizedEmail>,
    pub public: Vec<Label>,
    pub private: Vec<usize>,
}

/// Marker words for one public class.
pub fn public_marker_pool(label: Label, count: usize) -> Vec<String> {
    let stem = match label {
        Label::Ham => "hamcue",
        Label::Spam => "spamcue",
    };
    (0..count).map(|j| format!("{stem}{j}")).collect()
}

/// Marker words for one private class.
pub fn private_marker_pool(class: usize, count: usize) -> Vec<String> {
    (0..count).map(|j| format!("cat{class}word{j}")).collect()
}

/// The private class a marker token was planted for, if it is one.
pub fn private_class_of(token: &str) -> Option<usize> {
    let rest = token.strip_prefix("cat")?;
    let digits: String = rest.chars().take_while(char::is_ascii_digit).collect();
    if digits.is_empty() || !rest[digits.len()..].starts_with("word") {
        return None;
    }
    digits.parse().ok()
}

/// Generates the corpus described by `config`.
pub fn generate_dual(config: &DualLabelConfig) -> DualLabelCorpus {
    assert!(config.private_classes >= 2, "need at least two private classes");
    assert!(
        config.tokens_per_email >= config.public_marker_tokens + config.private_marker_tokens,
        "marker tokens exceed the email length"
    );
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let background = word_pool(0, config.background_terms);
    let public_pools = [
        public_marker_pool(Label::Ham, config.public_markers_per_class),
        public_marker_pool(Label::Spam, config.public_markers_per_class),
    ];
    let private_pools: Vec<Vec<String>> = (0..config.private_classes)
        .map(|c| private_marker_pool(c, config.private_markers_per_class))
        .collect();

    let mut emails = Vec::with_capacity(config.emails);
    let mut public = Vec::with_capacity(config.emails);
    let mut private = Vec::with_capacity(config.emails);
    for i in 0..config.emails {
        let pub_label = if rng.gen_bool(0.5) {
            Label::Spam
        } else {
            Label::Ham
        };
        let pri_class = rng.gen_range(0..config.private_classes);

        let mut tokens = Vec::with_capacity(config.tokens_per_email);
        let pub_pool = &public_pools[pub_label.index()];
        for _ in 0..config.public_marker_tokens {
            tokens.push(pub_pool[rng.gen_range(0..pub_pool.len())].clone());
        }
        let pri_pool = &private_pools[pri_class];
        for _ in 0..config.private_marker_tokens {
            tokens.push(pri_pool[rng.gen_range(0..pri_pool.len())].clone());
        }
        while tokens.len() < config.tokens_per_email {
            tokens.push(background[rng.gen_range(0..background.len())].clone());
        }
        tokens.shuffle(&mut rng);

        emails.push(TokenizedEmail {
            id: format!("dual-{i:05}"),
            tokens,
            label: Some(pub_label),
        });
        public.push(pub_label);
        private.push(pri_class);
    }
    DualLabelCorpus {
        emails,
        public,
        private,
    }
}

/// Plug-in mutual information between two label sequences, in bits.
pub fn mutual_information_bits(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "label sequences must align");
    if a.is_empty() {
        return 0.0;
    }
    let ka = a.iter().max().unwrap() + 1;
    let kb = b.iter().max().unwrap() + 1;
    let mut joint = vec![0.0f64; ka * kb];
    let mut pa = vec![0.0f64; ka];
    let mut pb = vec![0.0f64; kb];
    let n = a.len() as f64;
    for (&x, &y) in a.iter().zip(b) {
        joint[x * kb + y] += 1.0 / n;
        pa[x] += 1.0 / n;
        pb[y] += 1.0 / n;
    }
    let mut mi = 0.0;
    for x in 0..ka {
        for y in 0..kb {
            let pxy = joint[x * kb + y];
            if pxy > 0.0 {
                mi += pxy * (pxy / (pa[x] * pb[y])).log2();
            }
        }
    }
    mi
}
