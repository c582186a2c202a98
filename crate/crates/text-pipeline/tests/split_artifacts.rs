use std::path::Path;

use text_pipeline::artifacts;
use text_pipeline::error::PipelineError;
use text_pipeline::split::split_stratified;
use text_pipeline::types::{Label, TokenizedEmail};
use text_pipeline::vocab::build_vocabulary;

fn labeled_ids(ham: usize, spam: usize) -> Vec<(String, Label)> {
    let mut items = Vec::new();
    for i in 0..ham {
        items.push((format!("h{i}"), Label::Ham));
    }
    for i in 0..spam {
        items.push((format!("s{i}"), Label::Spam));
    }
    items
}

#[test]
fn ten_docs_split_seven_three() {
    for (ham, spam) in [(5, 5), (6, 4), (3, 7)] {
        let (train, test) = split_stratified(labeled_ids(ham, spam), 0.7, 42).unwrap();
        assert_eq!(train.len(), 7, "{ham}/{spam}");
        assert_eq!(test.len(), 3, "{ham}/{spam}");
    }
}

#[test]
fn split_is_deterministic_and_partitions() {
    let (train_a, test_a) = split_stratified(labeled_ids(40, 25), 0.7, 99).unwrap();
    let (train_b, test_b) = split_stratified(labeled_ids(40, 25), 0.7, 99).unwrap();
    assert_eq!(train_a, train_b);
    assert_eq!(test_a, test_b);

    let mut all: Vec<String> = train_a.iter().chain(test_a.iter()).map(|(id, _)| id.clone()).collect();
    all.sort();
    let mut expected: Vec<String> = labeled_ids(40, 25).into_iter().map(|(id, _)| id).collect();
    expected.sort();
    assert_eq!(all, expected);

    let (train_c, _) = split_stratified(labeled_ids(40, 25), 0.7, 100).unwrap();
    assert_ne!(train_a, train_c, "different seeds should shuffle differently");
}

#[test]
fn split_preserves_class_proportions_within_one_document() {
    let (train, test) = split_stratified(labeled_ids(7817, 11361), 0.7, 7).unwrap();
    let count = |items: &[(String, Label)], label: Label| {
        items.iter().filter(|(_, l)| *l == label).count() as f64
    };
    for label in [Label::Ham, Label::Spam] {
        let total = count(&train, label) + count(&test, label);
        let exact = total * 0.7;
        assert!((count(&train, label) - exact).abs() <= 1.0, "{label:?}");
    }
    assert_eq!(train.len() + test.len(), 7817 + 11361);
}

#[test]
fn degenerate_split_is_an_error() {
    match split_stratified(labeled_ids(1, 1), 0.7, 1) {
        Err(PipelineError::DegenerateSplit { .. }) => {}
        other => panic!("expected DegenerateSplit, got {other:?}"),
    }
}

#[test]
fn split_file_bytes_are_reproducible() {
    let (train, test) = split_stratified(labeled_ids(20, 20), 0.7, 5).unwrap();
    let ids = |items: &[(String, Label)]| -> Vec<String> {
        items.iter().map(|(id, _)| id.clone()).collect()
    };
    let a = artifacts::split_to_string(&ids(&train), &ids(&test), 0.7, 5);
    let b = artifacts::split_to_string(&ids(&train), &ids(&test), 0.7, 5);
    assert_eq!(a, b);
    assert!(a.starts_with("format_version: 1\nkind: split\nratio: 0.7\nseed: 5\n"));
}

fn sample_corpus() -> Vec<TokenizedEmail> {
    vec![
        TokenizedEmail {
            id: "a1".into(),
            tokens: vec!["free".into(), "money".into()],
            label: Some(Label::Spam),
        },
        TokenizedEmail {
            id: "b2".into(),
            tokens: vec!["meet".into(), "monday".into()],
            label: Some(Label::Ham),
        },
    ]
}

#[test]
fn corpus_artifact_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corpus.txt");
    let corpus = sample_corpus();
    artifacts::write_corpus(&path, &corpus).unwrap();
    let loaded = artifacts::read_corpus(&path).unwrap();
    assert_eq!(loaded, corpus);
}

#[test]
fn vocabulary_artifact_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("vocab.txt");
    let vocab = build_vocabulary(&sample_corpus()).unwrap();
    artifacts::write_vocabulary(&path, &vocab).unwrap();
    let loaded = artifacts::read_vocabulary(&path).unwrap();
    assert_eq!(loaded.terms(), vocab.terms());
    assert_eq!(loaded.total_docs(), vocab.total_docs());
    for i in 0..vocab.len() {
        assert_eq!(loaded.doc_freq(i), vocab.doc_freq(i));
    }
}

#[test]
fn split_artifact_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("split.txt");
    let train = vec!["a".to_string(), "b".to_string()];
    let test = vec!["c".to_string()];
    artifacts::write_split(&path, &train, &test, 0.7, 9).unwrap();
    let (t, e) = artifacts::read_split(&path).unwrap();
    assert_eq!(t, train);
    assert_eq!(e, test);
}

fn write_and_read_corpus(dir: &Path, contents: &str) -> Result<Vec<TokenizedEmail>, PipelineError> {
    let path = dir.join("broken.txt");
    std::fs::write(&path, contents).unwrap();
    artifacts::read_corpus(&path)
}

#[test]
fn malformed_artifacts_yield_structured_errors() {
    let dir = tempfile::tempdir().unwrap();

    let err = write_and_read_corpus(dir.path(), "format_version: 9\nkind: corpus\n").unwrap_err();
    assert!(matches!(err, PipelineError::Format { line: 1, .. }), "{err}");

    let err = write_and_read_corpus(dir.path(), "format_version: 1\nkind: vocabulary\n").unwrap_err();
    assert!(matches!(err, PipelineError::Format { line: 2, .. }), "{err}");

    let err = write_and_read_corpus(
        dir.path(),
        "format_version: 1\nkind: corpus\nid-only-line\n",
    )
    .unwrap_err();
    assert!(matches!(err, PipelineError::Format { line: 3, .. }), "{err}");

    let err = write_and_read_corpus(
        dir.path(),
        "format_version: 1\nkind: corpus\nd1\tham\tUPPER case\n",
    )
    .unwrap_err();
    assert!(matches!(err, PipelineError::Format { line: 3, .. }), "{err}");
}
