//! Shared experiment context: one synthetic dual-label corpus with a
//! pretrained encrypted part and pretrained frozen heads, built once per
//! test binary.
#![allow(dead_code)]

use std::sync::OnceLock;

use ndarray::Array2;
use quad_net::params::QuadNetParams;
use quad_net::train::{design_matrix, encrypted_part_forward_batch, train, TrainConfig};
use text_pipeline::{build_vocabulary, vectorize, DatasetSplit, Vocabulary};

use leakage_lab::{
    make_private_labels, train_and_eval, train_adversary, DualLabelConfig, DualLabelCorpus,
    generate_dual, Head, HeadConfig, PrivateLabeling, PrivateScheme,
};

pub struct LabContext {
    pub corpus: DualLabelCorpus,
    pub vocab: Vocabulary,
    /// Design matrix over the whole corpus, in corpus order, bias column 0.
    pub x: Array2<f64>,
    pub y_pub: Vec<usize>,
    pub y_pri: Vec<usize>,
    pub labeling: PrivateLabeling,
    /// Encrypted part pretrained on the public task.
    pub fe: QuadNetParams,
    /// Frozen public head trained on the pretrained outputs.
    pub pub_head: Head,
    pub pub_baseline: f64,
    /// Frozen adversary trained on the pretrained outputs.
    pub adv_head: Head,
    pub adv_baseline: f64,
}

pub const PUB_SEED: u64 = 31;
pub const ADV_SEED: u64 = 32;

pub fn context() -> &'static LabContext {
    static CTX: OnceLock<LabContext> = OnceLock::new();
    CTX.get_or_init(|| {
        let corpus = generate_dual(&DualLabelConfig::default());
        let vocab = build_vocabulary(&corpus.emails).unwrap();
        let examples: Vec<_> = corpus
            .emails
            .iter()
            .map(|e| (vectorize(e, &vocab), e.label.unwrap()))
            .collect();
        let (x, _) = design_matrix(&examples);
        let y_pub: Vec<usize> = corpus.public.iter().map(|l| l.index()).collect();
        let y_pri = corpus.private.clone();
        let labeling = make_private_labels(
            &corpus.emails,
            &vocab,
            &PrivateScheme::SyntheticCategory { classes: 3 },
        )
        .unwrap();
        assert_eq!(labeling.labels, y_pri, "generator and labeler disagree");

        let split = DatasetSplit::new(examples, 0.8, 17).unwrap();
        let train_cfg = TrainConfig { epochs: 30, d: 40, t: 20, ..TrainConfig::default() };
        let fe = train(&split, &train_cfg).unwrap().params;

        let (_, _, q) = encrypted_part_forward_batch(&fe, &x);
        let (pub_head, pub_baseline) =
            train_and_eval(&q, &y_pub, &HeadConfig::public_clone(PUB_SEED)).unwrap();
        let (adv_head, adv_baseline) =
            train_adversary(&fe, &x, &labeling, &HeadConfig::adversary(3, ADV_SEED)).unwrap();

        LabContext {
            corpus,
            vocab,
            x,
            y_pub,
            y_pri,
            labeling,
            fe,
            pub_head,
            pub_baseline,
            adv_head,
            adv_baseline,
        }
    })
}
