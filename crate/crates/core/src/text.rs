//! Tokenization, vocabulary construction, paragraph segmentation, and
//! length statistics.
//!
//! The tokenizer is a lowercasing whitespace/punctuation splitter: the
//! attention and bag-of-words mechanisms under study are tokenizer-agnostic,
//! so sub-word fidelity is not needed. Paragraph boundaries are blank lines
//! when only raw text is given; an explicit paragraph list overrides.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reserved token ids, fixed for every vocabulary.
pub const PAD_ID: usize = 0;
pub const UNK_ID: usize = 1;
pub const CLS_ID: usize = 2;
pub const SEP_ID: usize = 3;
pub const RESERVED_TOKENS: &[&str] = &["[pad]", "[unk]", "[cls]", "[sep]"];

/// Token string to dense-id map with fixed reserved ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    id_to_token: Vec<String>,
    #[serde(skip)]
    token_to_id: BTreeMap<String, usize>,
}

impl Vocabulary {
    /// Build from content tokens (reserved ids are prepended automatically).
    pub fn from_tokens<I: IntoIterator<Item = String>>(tokens: I) -> Self {
        let mut id_to_token: Vec<String> =
            RESERVED_TOKENS.iter().map(|s| (*s).to_owned()).collect();
        id_to_token.extend(tokens);
        let token_to_id = id_to_token
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Vocabulary { id_to_token, token_to_id }
    }

    /// Rebuild the lookup map after deserialization.
    pub fn rebuild_index(&mut self) {
        self.token_to_id = self
            .id_to_token
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
    }

    pub fn size(&self) -> usize {
        self.id_to_token.len()
    }

    pub fn id_of(&self, token: &str) -> Option<usize> {
        self.token_to_id.get(token).copied()
    }

    pub fn token_of(&self, id: usize) -> Option<&str> {
        self.id_to_token.get(id).map(String::as_str)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    SingleLabel,
    MultiLabel,
}

/// What a classification task looks like: its label set and input budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub kind: TaskKind,
    pub labels: Vec<String>,
    pub max_input_length: usize,
}

impl TaskSpec {
    pub fn new(kind: TaskKind, labels: Vec<String>, max_input_length: usize) -> Result<Self> {
        if kind == TaskKind::SingleLabel && labels.len() < 2 {
            return Err(Error::InvalidConfig(
                "single_label task needs at least 2 labels".into(),
            ));
        }
        if max_input_length < 1 {
            return Err(Error::InvalidConfig("max_input_length must be >= 1".into()));
        }
        Ok(TaskSpec { kind, labels, max_input_length })
    }

    pub fn n_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn label_id(&self, name: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| Error::UnknownLabel(name.to_owned()))
    }
}

/// A tokenized document with paragraph boundaries and gold labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub paragraphs: Vec<Vec<usize>>,
    pub labels: BTreeSet<usize>,
    /// Token count before any transform.
    pub raw_length: usize,
}

impl Document {
    /// Checks the invariants: at least one non-empty paragraph, token ids
    /// inside the vocabulary, labels inside the task's label set.
    pub fn new(
        id: String,
        paragraphs: Vec<Vec<usize>>,
        labels: BTreeSet<usize>,
        vocab: &Vocabulary,
        task: &TaskSpec,
    ) -> Result<Self> {
        if paragraphs.is_empty() || paragraphs.iter().any(Vec::is_empty) {
            return Err(Error::EmptyDocument);
        }
        for p in &paragraphs {
            for &t in p {
                if t >= vocab.size() {
                    return Err(Error::DimensionMismatch {
                        expected: vocab.size(),
                        got: t,
                    });
                }
            }
        }
        for &l in &labels {
            if l >= task.n_labels() {
                return Err(Error::UnknownLabel(alloc::format!("#{l}")));
            }
        }
        let raw_length = paragraphs.iter().map(Vec::len).sum();
        Ok(Document { id, paragraphs, labels, raw_length })
    }

    /// All tokens in order, paragraph boundaries dropped.
    pub fn token_stream(&self) -> Vec<usize> {
        self.paragraphs.iter().flatten().copied().collect()
    }
}

/// Lowercase and split into alphanumeric runs; everything else separates.
pub fn split_words(text: &str) -> Vec<String> {
    let mut words = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            current.extend(ch.to_lowercase());
        } else if !current.is_empty() {
            words.push(core::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        words.push(current);
    }
    words
}

/// Split raw text into paragraphs at blank lines.
pub fn split_paragraphs(text: &str) -> Vec<&str> {
    text.split("\n\n")
        .flat_map(|chunk| chunk.split("\r\n\r\n"))
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .collect()
}

/// Map a text to token ids; OOV words become UNK. Total and deterministic.
pub fn tokenize(text: &str, vocab: &Vocabulary) -> Vec<usize> {
    split_words(text)
        .iter()
        .map(|w| vocab.id_of(w).unwrap_or(UNK_ID))
        .collect()
}

/// Tokenize a text into paragraphs (blank-line boundaries). Paragraphs with
/// no tokens (e.g. punctuation-only) are dropped.
pub fn tokenize_paragraphs(text: &str, vocab: &Vocabulary) -> Vec<Vec<usize>> {
    split_paragraphs(text)
        .into_iter()
        .map(|p| tokenize(p, vocab))
        .filter(|p| !p.is_empty())
        .collect()
}

/// Keep tokens with frequency >= `min_count`, ordered by (frequency desc,
/// token asc), at most `max_size` content tokens after the reserved ids.
pub fn build_vocab(corpus: &[&str], min_count: usize, max_size: usize) -> Result<Vocabulary> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for text in corpus {
        for w in split_words(text) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    let mut entries: Vec<(String, usize)> = counts
        .into_iter()
        .filter(|(_, c)| *c >= min_count)
        .collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    entries.truncate(max_size);
    Ok(Vocabulary::from_tokens(entries.into_iter().map(|(t, _)| t)))
}

/// Pack a document into hierarchical segments.
///
/// Each segment is `[CLS]` plus up to `seg_len - 1` tokens from a single
/// paragraph; paragraphs longer than a segment are split greedily left to
/// right, and the result is truncated to `max_segments`.
pub fn segment_paragraphs(
    doc: &Document,
    max_segments: usize,
    seg_len: usize,
) -> Result<Vec<Vec<usize>>> {
    if max_segments < 1 || seg_len < 2 {
        return Err(Error::InvalidConfig(
            "segment_paragraphs needs max_segments >= 1 and seg_len >= 2".into(),
        ));
    }
    let body = seg_len - 1;
    let mut segments = Vec::new();
    'outer: for para in &doc.paragraphs {
        for chunk in para.chunks(body) {
            if segments.len() == max_segments {
                break 'outer;
            }
            let mut seg = Vec::with_capacity(chunk.len() + 1);
            seg.push(CLS_ID);
            seg.extend_from_slice(chunk);
            segments.push(seg);
        }
    }
    Ok(segments)
}

/// Per-document lengths plus mean and max.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthStats {
    pub per_doc: Vec<usize>,
    pub mean: f64,
    pub max: usize,
}

/// Token counts per document; with `dedup` the count of distinct token ids.
pub fn length_stats(docs: &[Document], dedup: bool) -> Result<LengthStats> {
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let per_doc: Vec<usize> = docs
        .iter()
        .map(|d| {
            if dedup {
                d.token_stream().into_iter().collect::<BTreeSet<_>>().len()
            } else {
                d.raw_length
            }
        })
        .collect();
    let max = per_doc.iter().copied().max().unwrap_or(0);
    let mean = per_doc.iter().sum::<usize>() as f64 / per_doc.len() as f64;
    Ok(LengthStats { per_doc, mean, max })
}
