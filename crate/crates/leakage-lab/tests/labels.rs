//! Private labeling schemes end to end on generated corpora.

use leakage_lab::{
    generate_dual, majority_rate, make_private_labels, mutual_information_bits,
    rank_by_information_gain, DualLabelConfig, LeakError, PrivateScheme,
};
use text_pipeline::{build_vocabulary, Label, TokenizedEmail};

fn email(id: &str, tokens: &[&str], label: Label) -> TokenizedEmail {
    TokenizedEmail {
        id: id.to_string(),
        tokens: tokens.iter().map(|t| t.to_string()).collect(),
        label: Some(label),
    }
}

#[test]
fn word_presence_labels_follow_the_designated_term() {
    let corpus = generate_dual(&DualLabelConfig::default());
    let vocab = build_vocabulary(&corpus.emails).unwrap();
    for designated in [0, 3] {
        let labeling = make_private_labels(
            &corpus.emails,
            &vocab,
            &PrivateScheme::WordPresence { k: 10, designated },
        )
        .unwrap();
        assert_eq!(labeling.classes, 2);
        assert_eq!(labeling.labels.len(), corpus.emails.len());
        assert_eq!(labeling.terms.len(), 10);
        let word = &labeling.terms[designated];
        for (e, &l) in corpus.emails.iter().zip(&labeling.labels) {
            assert_eq!(l, usize::from(e.tokens.iter().any(|t| t == word)));
        }
        assert!(labeling.labels.iter().any(|&l| l == 0));
        assert!(labeling.labels.iter().any(|&l| l == 1));
    }
}

#[test]
fn designated_terms_are_ranked_by_information_gain() {
    let corpus = generate_dual(&DualLabelConfig::default());
    let vocab = build_vocabulary(&corpus.emails).unwrap();
    let ranked = rank_by_information_gain(&vocab);
    assert_eq!(ranked.len(), vocab.len());
    for pair in ranked.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (ga, gb) = (
            vocab.information_gain_by_index(a),
            vocab.information_gain_by_index(b),
        );
        assert!(ga > gb || (ga == gb && a < b), "ranking out of order at {a},{b}");
    }
    let labeling = make_private_labels(
        &corpus.emails,
        &vocab,
        &PrivateScheme::WordPresence { k: 5, designated: 0 },
    )
    .unwrap();
    for (i, term) in labeling.terms.iter().enumerate() {
        assert_eq!(term, vocab.term(ranked[i]));
    }
}

#[test]
fn invalid_word_presence_parameters_are_rejected() {
    let corpus = generate_dual(&DualLabelConfig {
        emails: 40,
        ..DualLabelConfig::default()
    });
    let vocab = build_vocabulary(&corpus.emails).unwrap();
    let err = make_private_labels(
        &corpus.emails,
        &vocab,
        &PrivateScheme::WordPresence { k: vocab.len() + 1, designated: 0 },
    )
    .unwrap_err();
    assert!(matches!(err, LeakError::KTooLarge { .. }));

    let err = make_private_labels(
        &corpus.emails,
        &vocab,
        &PrivateScheme::WordPresence { k: 4, designated: 4 },
    )
    .unwrap_err();
    assert!(matches!(err, LeakError::KTooLarge { .. }));
}

#[test]
fn degenerate_word_presence_labelings_are_rejected() {
    let twins = vec![
        email("a", &["offer", "code", "win"], Label::Spam),
        email("b", &["offer", "code", "win"], Label::Ham),
    ];
    let vocab = build_vocabulary(&twins).unwrap();
    let err = make_private_labels(
        &twins,
        &vocab,
        &PrivateScheme::WordPresence { k: 2, designated: 0 },
    )
    .unwrap_err();
    assert!(
        matches!(err, LeakError::DegenerateLabeling { ref reason } if reason.contains("every")),
        "{err}"
    );

    let elsewhere = vec![
        email("c", &["totally", "different"], Label::Spam),
        email("d", &["tokens", "here"], Label::Ham),
    ];
    let err = make_private_labels(
        &elsewhere,
        &vocab,
        &PrivateScheme::WordPresence { k: 2, designated: 0 },
    )
    .unwrap_err();
    assert!(
        matches!(err, LeakError::DegenerateLabeling { ref reason } if reason.contains("no document")),
        "{err}"
    );
}

#[test]
fn synthetic_labels_match_the_generator() {
    let corpus = generate_dual(&DualLabelConfig {
        emails: 200,
        ..DualLabelConfig::default()
    });
    let vocab = build_vocabulary(&corpus.emails).unwrap();
    let labeling = make_private_labels(
        &corpus.emails,
        &vocab,
        &PrivateScheme::SyntheticCategory { classes: 3 },
    )
    .unwrap();
    assert_eq!(labeling.classes, 3);
    assert_eq!(labeling.labels, corpus.private);
}

#[test]
fn synthetic_scheme_rejects_undeclared_classes() {
    let corpus = generate_dual(&DualLabelConfig {
        emails: 60,
        private_classes: 4,
        ..DualLabelConfig::default()
    });
    let vocab = build_vocabulary(&corpus.emails).unwrap();
    let err = make_private_labels(
        &corpus.emails,
        &vocab,
        &PrivateScheme::SyntheticCategory { classes: 2 },
    )
    .unwrap_err();
    assert!(matches!(err, LeakError::DegenerateLabeling { .. }));
}

#[test]
fn single_category_corpora_are_rejected() {
    let corpus = vec![
        email("a", &["cat0word0", "filler"], Label::Ham),
        email("b", &["cat0word1", "filler"], Label::Spam),
    ];
    let vocab = build_vocabulary(&corpus).unwrap();
    let err = make_private_labels(
        &corpus,
        &vocab,
        &PrivateScheme::SyntheticCategory { classes: 3 },
    )
    .unwrap_err();
    assert!(
        matches!(err, LeakError::DegenerateLabeling { ref reason } if reason.contains("one category")),
        "{err}"
    );
}

#[test]
fn public_and_private_labels_are_independent() {
    let corpus = generate_dual(&DualLabelConfig {
        emails: 10_000,
        ..DualLabelConfig::default()
    });
    let public: Vec<usize> = corpus.public.iter().map(|l| l.index()).collect();
    let mi = mutual_information_bits(&public, &corpus.private);
    assert!(mi <= 0.01, "labels share {mi} bits");
    assert!(majority_rate(&corpus.private) < 0.45, "private classes badly skewed");
}
