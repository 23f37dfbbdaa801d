//! Linear max-margin baseline over sparse TF-IDF vectors.
//!
//! One-vs-rest hinge loss with L2 regularization, minimized by seeded
//! stochastic subgradient descent with step size `eta0 / (1 + reg * t)`.
//! A subgradient solver keeps the crate dependency-free and is adequate at
//! desk scale.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{argmax_singleton, threshold_set};
use crate::rng;
use crate::text::{TaskKind, TaskSpec};
use crate::tfidf::SparseVec;

const ETA0: f64 = 1.0;

/// Per-label weight vectors plus biases over a fixed TF-IDF feature set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub reg: f64,
    pub task_kind: TaskKind,
    pub dim: usize,
    /// Total objective (hinge + L2 term, summed over labels) after each epoch.
    pub loss_history: Vec<f64>,
}

impl LinearModel {
    pub fn decision_scores(&self, x: &SparseVec) -> Result<Vec<f64>> {
        if x.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.dim });
        }
        Ok(self
            .weights
            .iter()
            .zip(self.bias.iter())
            .map(|(w, b)| sparse_dot(w, x) + b)
            .collect())
    }
}

#[inline]
fn sparse_dot(w: &[f64], x: &SparseVec) -> f64 {
    let mut acc = 0.0;
    for (&i, &v) in x.indices.iter().zip(x.values.iter()) {
        acc += w[i] * v;
    }
    acc
}

fn objective(
    weights: &[Vec<f64>],
    bias: &[f64],
    features: &[SparseVec],
    targets: &[Vec<f64>],
    reg: f64,
) -> f64 {
    let m = features.len() as f64;
    let mut total = 0.0;
    for (l, w) in weights.iter().enumerate() {
        let l2: f64 = w.iter().map(|v| v * v).sum();
        let mut hinge = 0.0;
        for (x, ys) in features.iter().zip(targets.iter()) {
            let margin = ys[l] * (sparse_dot(w, x) + bias[l]);
            hinge += (1.0 - margin).max(0.0);
        }
        total += 0.5 * reg * l2 + hinge / m;
    }
    total
}

/// Fit one-vs-rest linear classifiers. Every label in the task must have at
/// least one positive training example.
pub fn train_linear(
    features: &[SparseVec],
    labels: &[BTreeSet<usize>],
    task: &TaskSpec,
    reg: f64,
    epochs: usize,
    seed: u64,
) -> Result<LinearModel> {
    if features.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if features.len() != labels.len() {
        return Err(Error::DimensionMismatch { expected: features.len(), got: labels.len() });
    }
    if reg <= 0.0 {
        return Err(Error::InvalidConfig("regularization must be > 0".into()));
    }
    let n_labels = task.n_labels();
    for l in 0..n_labels {
        if !labels.iter().any(|set| set.contains(&l)) {
            return Err(Error::LabelUnseen(task.labels[l].clone()));
        }
    }
    let dim = features[0].dim;
    if features.iter().any(|x| x.dim != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: 0 });
    }

    // +1/-1 targets per label, fixed once
    let targets: Vec<Vec<f64>> = labels
        .iter()
        .map(|set| {
            (0..n_labels)
                .map(|l| if set.contains(&l) { 1.0 } else { -1.0 })
                .collect()
        })
        .collect();

    let mut weights = vec![vec![0.0; dim]; n_labels];
    let mut bias = vec![0.0; n_labels];
    let mut order: Vec<usize> = (0..features.len()).collect();
    let mut rng = rng::seeded(seed);
    let mut loss_history = Vec::with_capacity(epochs);
    let mut t = 0u64;

    for _ in 0..epochs {
        rng::shuffle(&mut rng, &mut order);
        for &i in &order {
            t += 1;
            let eta = ETA0 / (1.0 + reg * t as f64);
            let x = &features[i];
            for l in 0..n_labels {
                let y = targets[i][l];
                let margin = y * (sparse_dot(&weights[l], x) + bias[l]);
                let w = &mut weights[l];
                let shrink = 1.0 - eta * reg;
                w.iter_mut().for_each(|v| *v *= shrink);
                if margin < 1.0 {
                    for (&j, &v) in x.indices.iter().zip(x.values.iter()) {
                        w[j] += eta * y * v;
                    }
                    bias[l] += eta * y;
                }
            }
        }
        loss_history.push(objective(&weights, &bias, features, &targets, reg));
    }

    Ok(LinearModel {
        weights,
        bias,
        reg,
        task_kind: task.kind,
        dim,
        loss_history,
    })
}

/// Argmax for single-label tasks (ties to the lowest label id); labels with
/// positive scores for multi-label tasks (the empty set is allowed).
pub fn predict_linear(model: &LinearModel, x: &SparseVec) -> Result<BTreeSet<usize>> {
    let scores = model.decision_scores(x)?;
    Ok(match model.task_kind {
        TaskKind::SingleLabel => argmax_singleton(&scores),
        TaskKind::MultiLabel => threshold_set(&scores, 0.0),
    })
}
