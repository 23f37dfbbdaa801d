//! Micro/macro-F1 over label sets and harmonic-mean aggregation.
//!
//! Single-label predictions are evaluated as singleton sets so one F1
//! implementation serves both task kinds.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Pooled (micro) and per-class averaged (macro) F1.
///
/// Macro averages over the whole label universe `0..n_labels`; a class with
/// zero TP+FP+FN contributes an F1 of 0.
pub fn f1_scores(
    gold: &[BTreeSet<usize>],
    pred: &[BTreeSet<usize>],
    n_labels: usize,
) -> Result<(f64, f64)> {
    if gold.len() != pred.len() {
        return Err(Error::DimensionMismatch { expected: gold.len(), got: pred.len() });
    }
    let mut tp = vec![0usize; n_labels];
    let mut fp = vec![0usize; n_labels];
    let mut fne = vec![0usize; n_labels];
    for (g, p) in gold.iter().zip(pred.iter()) {
        for &l in p {
            if g.contains(&l) {
                tp[l] += 1;
            } else {
                fp[l] += 1;
            }
        }
        for &l in g {
            if !p.contains(&l) {
                fne[l] += 1;
            }
        }
    }
    let f1 = |tp: usize, fp: usize, fne: usize| -> f64 {
        let denom = 2 * tp + fp + fne;
        if denom == 0 {
            0.0
        } else {
            2.0 * tp as f64 / denom as f64
        }
    };
    let micro = f1(tp.iter().sum(), fp.iter().sum(), fne.iter().sum());
    let macro_ = if n_labels == 0 {
        0.0
    } else {
        (0..n_labels).map(|l| f1(tp[l], fp[l], fne[l])).sum::<f64>() / n_labels as f64
    };
    Ok((micro, macro_))
}

/// Harmonic mean of strictly positive scores.
pub fn harmonic_mean(scores: &[f64]) -> Result<f64> {
    if scores.is_empty() || scores.iter().any(|&s| s <= 0.0) {
        return Err(Error::InvalidConfig(
            "harmonic mean needs at least one strictly positive score".into(),
        ));
    }
    Ok(scores.len() as f64 / scores.iter().map(|s| 1.0 / s).sum::<f64>())
}

/// Argmax converted to a singleton set (ties go to the lowest label id).
pub fn argmax_singleton(scores: &[f64]) -> BTreeSet<usize> {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    let mut set = BTreeSet::new();
    if !scores.is_empty() {
        set.insert(best);
    }
    set
}

/// Labels with scores strictly above the threshold.
pub fn threshold_set(scores: &[f64], threshold: f64) -> BTreeSet<usize> {
    scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > threshold)
        .map(|(i, _)| i)
        .collect()
}
