/// Binary classification label for an email.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Ham,
    Spam,
}

impl Label {
    /// Dense index used for class-indexed tables: ham = 0, spam = 1.
    pub fn index(self) -> usize {
        match self {
            Label::Ham => 0,
            Label::Spam => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Label> {
        match i {
            0 => Some(Label::Ham),
            1 => Some(Label::Spam),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Ham => "ham",
            Label::Spam => "spam",
        }
    }

    pub fn parse(s: &str) -> Option<Label> {
        match s {
            "ham" => Some(Label::Ham),
            "spam" => Some(Label::Spam),
            _ => None,
        }
    }
}

/// An email as loaded from disk, before any normalization.
///
/// `label` is present for training corpora and absent for emails submitted
/// for classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEmail {
    pub id: String,
    pub subject: String,
    pub body: String,
    pub label: Option<Label>,
}

/// A preprocessed email: lowercase stemmed tokens in original order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedEmail {
    pub id: String,
    pub tokens: Vec<String>,
    pub label: Option<Label>,
}

/// Term-count vector over a fixed vocabulary.
///
/// `counts[i]` is the number of occurrences of vocabulary term `i` in the
/// email. The length always equals the vocabulary size it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureVector {
    pub counts: Vec<u32>,
}

/// Stratified train/test partition of a vectorized dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub train: Vec<(FeatureVector, Label)>,
    pub test: Vec<(FeatureVector, Label)>,
    pub seed: u64,
    pub ratio: f64,
}

impl DatasetSplit {
    /// Splits `items` with [`crate::split::split_stratified`].
    pub fn new(
        items: Vec<(FeatureVector, Label)>,
        ratio: f64,
        seed: u64,
    ) -> Result<DatasetSplit, crate::error::PipelineError> {
        let (train, test) = crate::split::split_stratified(items, ratio, seed)?;
        Ok(DatasetSplit { train, test, seed, ratio })
    }
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Total token count captured by the vector.
    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    /// Largest single count in the vector, 0 for an all-zero vector.
    pub fn max_count(&self) -> u32 {
        self.counts.iter().copied().max().unwrap_or(0)
    }
}
