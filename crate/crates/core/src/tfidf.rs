//! TF-IDF fitting and scoring, the dedup-and-sort transform, and score
//! bucketization.
//!
//! Scores follow the count-based form `tf * idf` with `tf = c/n` and
//! `idf = ln(N / (1 + d))`. The logarithm base is natural throughout; a
//! different base only rescales features and the tie-break rule keeps the
//! dedup-sort order base-independent for distinct scores. Negative IDF
//! (a feature present in every document) is kept as-is, no clipping.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric;
use crate::text::Document;

/// A feature is a contiguous token-id tuple (unigram, bigram, ...).
pub type Feature = Vec<usize>;

/// Fitted TF-IDF statistics: document count, per-feature document
/// frequencies, and the selected top-K feature set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfidfModel {
    /// Number of training documents (N).
    pub n_docs: usize,
    /// Selected features, most frequent first.
    pub features: Vec<Feature>,
    /// Document frequency d_i, parallel to `features`.
    pub doc_freq: Vec<usize>,
    /// Longest n-gram length in the feature set.
    pub n_max: usize,
    /// Apply `1 + ln(c)` to the term frequency instead of `c/n`.
    pub sublinear: bool,
    #[serde(skip)]
    index: BTreeMap<Feature, usize>,
}

impl TfidfModel {
    pub fn rebuild_index(&mut self) {
        self.index = self
            .features
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), i))
            .collect();
    }

    pub fn feature_count(&self) -> usize {
        self.features.len()
    }

    pub fn feature_index(&self, feature: &[usize]) -> Option<usize> {
        self.index.get(feature).copied()
    }

    /// IDF for a feature; absent features have d = 0, so IDF = ln N.
    pub fn idf(&self, feature: &[usize]) -> f64 {
        let d = self
            .feature_index(feature)
            .map_or(0, |i| self.doc_freq[i]);
        numeric::ln(self.n_docs as f64 / (1.0 + d as f64))
    }

    fn weight(&self, count: usize, n: usize) -> f64 {
        if self.sublinear {
            if count > 0 {
                1.0 + numeric::ln(count as f64)
            } else {
                0.0
            }
        } else {
            count as f64 / n as f64
        }
    }
}

/// Sparse feature vector over a fitted feature set; zero components are
/// unstored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVec {
    pub dim: usize,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseVec {
    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn get(&self, i: usize) -> f64 {
        match self.indices.binary_search(&i) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }
}

fn ngram_counts(tokens: &[usize], n_max: usize) -> BTreeMap<Feature, usize> {
    let mut counts = BTreeMap::new();
    for n in 1..=n_max {
        if n > tokens.len() {
            break;
        }
        for window in tokens.windows(n) {
            *counts.entry(window.to_vec()).or_insert(0) += 1;
        }
    }
    counts
}

/// Fit document frequencies for the top-K most frequent word n-grams
/// (n in `1..=n_max`) of the training set. Ties break lexicographically
/// on the token-id tuple.
pub fn fit_tfidf(
    train_docs: &[Document],
    n_max: usize,
    k: usize,
    sublinear: bool,
) -> Result<TfidfModel> {
    if train_docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if n_max < 1 || k < 1 {
        return Err(Error::InvalidConfig("fit_tfidf needs n_max >= 1 and K >= 1".into()));
    }
    let mut total: BTreeMap<Feature, usize> = BTreeMap::new();
    let mut doc_freq: BTreeMap<Feature, usize> = BTreeMap::new();
    for doc in train_docs {
        let stream = doc.token_stream();
        for (feature, count) in ngram_counts(&stream, n_max) {
            *total.entry(feature.clone()).or_insert(0) += count;
            *doc_freq.entry(feature).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(Feature, usize)> = total.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(k);

    let features: Vec<Feature> = ranked.into_iter().map(|(f, _)| f).collect();
    let freqs: Vec<usize> = features.iter().map(|f| doc_freq[f]).collect();
    let mut model = TfidfModel {
        n_docs: train_docs.len(),
        features,
        doc_freq: freqs,
        n_max,
        sublinear,
        index: BTreeMap::new(),
    };
    model.rebuild_index();
    Ok(model)
}

/// TF-IDF score of one feature in a token sequence of length n.
pub fn tfidf_score(model: &TfidfModel, feature: &[usize], tokens: &[usize]) -> Result<f64> {
    if tokens.is_empty() {
        return Err(Error::EmptyDocument);
    }
    let count = if feature.len() > tokens.len() {
        0
    } else {
        tokens.windows(feature.len()).filter(|w| *w == feature).count()
    };
    Ok(model.weight(count, tokens.len()) * model.idf(feature))
}

/// Sparse TF-IDF vector of length `|feature set|` for one document.
pub fn featurize_vector(model: &TfidfModel, tokens: &[usize]) -> Result<SparseVec> {
    if tokens.is_empty() {
        return Err(Error::EmptyDocument);
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for n in 1..=model.n_max {
        if n > tokens.len() {
            break;
        }
        for window in tokens.windows(n) {
            if let Some(i) = model.feature_index(window) {
                *counts.entry(i).or_insert(0) += 1;
            }
        }
    }
    let n = tokens.len();
    let mut indices = Vec::with_capacity(counts.len());
    let mut values = Vec::with_capacity(counts.len());
    for (i, c) in counts {
        indices.push(i);
        values.push(model.weight(c, n) * {
            let d = model.doc_freq[i];
            numeric::ln(model.n_docs as f64 / (1.0 + d as f64))
        });
    }
    Ok(SparseVec { dim: model.feature_count(), indices, values })
}

/// Per-occurrence unigram score for every position of a token sequence.
/// Term frequencies are counted on the sequence before deduplication.
pub fn occurrence_scores(model: &TfidfModel, tokens: &[usize]) -> Result<Vec<f64>> {
    if tokens.is_empty() {
        return Err(Error::EmptyDocument);
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &t in tokens {
        *counts.entry(t).or_insert(0) += 1;
    }
    let n = tokens.len();
    let mut per_token: BTreeMap<usize, f64> = BTreeMap::new();
    for (&t, &c) in &counts {
        per_token.insert(t, model.weight(c, n) * model.idf(&[t]));
    }
    Ok(tokens.iter().map(|t| per_token[t]).collect())
}

/// Remove duplicate tokens and sort the survivors by decreasing TF-IDF,
/// truncating to `max_len`.
///
/// Ties break by ascending token id so the output is a pure function of the
/// input multiset: any permutation of the input yields the same output.
pub fn dedup_sort(model: &TfidfModel, tokens: &[usize], max_len: usize) -> Vec<usize> {
    if tokens.is_empty() {
        return Vec::new();
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &t in tokens {
        *counts.entry(t).or_insert(0) += 1;
    }
    let n = tokens.len();
    let mut scored: Vec<(usize, f64)> = counts
        .into_iter()
        .map(|(t, c)| (t, model.weight(c, n) * model.idf(&[t])))
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scored.truncate(max_len);
    scored.into_iter().map(|(t, _)| t).collect()
}

/// Equal-frequency score buckets fitted on the training distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketModel {
    pub n_buckets: usize,
    /// B - 1 empirical quantile boundaries, nondecreasing.
    pub boundaries: Vec<f64>,
}

/// Type-7 (linear interpolation) quantile of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = numeric::floor(h) as usize;
    let frac = h - lo as f64;
    if lo + 1 < sorted.len() {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[lo]
    }
}

/// Bucketize the pooled per-occurrence unigram score distribution of the
/// training set into B equal-frequency buckets.
pub fn fit_buckets(model: &TfidfModel, train_docs: &[Document], b: usize) -> Result<BucketModel> {
    if b < 1 {
        return Err(Error::InvalidConfig("bucket count must be >= 1".into()));
    }
    let mut pooled = Vec::new();
    for doc in train_docs {
        pooled.extend(occurrence_scores(model, &doc.token_stream())?);
    }
    if pooled.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    pooled.sort_by(f64::total_cmp);
    let boundaries = (1..b)
        .map(|k| quantile_sorted(&pooled, k as f64 / b as f64))
        .collect();
    Ok(BucketModel { n_buckets: b, boundaries })
}

/// Bucket index of a score, always in `[0, B)`. A score strictly below a
/// boundary stays in the lower bucket; boundary values go up.
pub fn bucket_of(bm: &BucketModel, score: f64) -> usize {
    bm.boundaries.partition_point(|b| *b <= score)
}
