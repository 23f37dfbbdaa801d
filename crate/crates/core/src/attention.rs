//! Multi-head attention kernels: dense masked attention, sliding-window
//! attention with global tokens, and the masks that relate them.
//!
//! The sliding-window kernel never materializes the full n x n score matrix
//! for non-global rows; each such row touches only its window plus the
//! global positions, which is what makes the cost linear in sequence length
//! at a fixed window. Global rows attend everywhere.
//!
//! Both kernels enumerate key positions in ascending order and subtract the
//! row maximum before exponentiating, so in 64-bit mode the sparse kernel
//! reproduces the dense result exactly, not just within tolerance.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::numeric;

/// Which positions get global attention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlobalMode {
    ClsOnly,
    ClsAndParagraphSep,
}

/// Head count, head width, window width, and global-token scheme.
///
/// `window` is the total width: a token attends to `window / 2` neighbors on
/// each side plus itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttentionConfig {
    pub heads: usize,
    pub head_dim: usize,
    pub window: usize,
    pub global_mode: GlobalMode,
}

impl AttentionConfig {
    pub fn model_dim(&self) -> usize {
        self.heads * self.head_dim
    }
}

/// Positions that attend to, and are attended by, every token.
///
/// The sequence must start with CLS; in paragraph mode every SEP position is
/// global as well.
pub fn global_positions(
    tokens: &[usize],
    mode: GlobalMode,
    cls_id: usize,
    sep_id: usize,
) -> Result<Vec<usize>> {
    if tokens.first() != Some(&cls_id) {
        return Err(Error::MissingCls);
    }
    let mut positions = vec![0];
    if mode == GlobalMode::ClsAndParagraphSep {
        positions.extend(
            tokens
                .iter()
                .enumerate()
                .skip(1)
                .filter(|(_, &t)| t == sep_id)
                .map(|(i, _)| i),
        );
    }
    Ok(positions)
}

/// Boolean n x n attention mask.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionMask {
    n: usize,
    bits: Vec<bool>,
}

impl AttentionMask {
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn allowed(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }
}

/// `M[i][j] = |i - j| <= w/2 or i in globals or j in globals`.
pub fn build_attention_mask(n: usize, w: usize, globals: &[usize]) -> AttentionMask {
    let half = w / 2;
    let mut bits = vec![false; n * n];
    for i in 0..n {
        let lo = i.saturating_sub(half);
        let hi = (i + half).min(n.saturating_sub(1));
        for j in lo..=hi {
            bits[i * n + j] = true;
        }
    }
    for &g in globals {
        for j in 0..n {
            bits[g * n + j] = true;
            bits[j * n + g] = true;
        }
    }
    AttentionMask { n, bits }
}

fn check_shapes(q: &[Mat], k: &[Mat], v: &[Mat], n: usize) -> Result<usize> {
    if q.is_empty() || q.len() != k.len() || q.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: q.len(), got: k.len().max(v.len()) });
    }
    let dh = q[0].cols();
    for m in q.iter().chain(k).chain(v) {
        if m.rows() != n || m.cols() != dh {
            return Err(Error::DimensionMismatch { expected: n * dh, got: m.rows() * m.cols() });
        }
    }
    Ok(dh)
}

/// Full masked multi-head attention; heads are concatenated in order.
///
/// Masked entries are excluded from the softmax (treated as minus infinity).
pub fn dense_attention(q: &[Mat], k: &[Mat], v: &[Mat], mask: &AttentionMask) -> Result<Mat> {
    let n = mask.n();
    let dh = check_shapes(q, k, v, n)?;
    let heads = q.len();
    let scale = 1.0 / numeric::sqrt(dh as f64);
    let mut out = Mat::zeros(n, heads * dh);

    let mut logits: Vec<f64> = Vec::with_capacity(n);
    let mut keys: Vec<usize> = Vec::with_capacity(n);
    for h in 0..heads {
        for i in 0..n {
            logits.clear();
            keys.clear();
            let qi = q[h].row(i);
            for j in 0..n {
                if mask.allowed(i, j) {
                    keys.push(j);
                    logits.push(numeric::dot(qi, k[h].row(j)) * scale);
                }
            }
            if keys.is_empty() {
                return Err(Error::InvalidConfig("attention row fully masked".into()));
            }
            let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut denom = 0.0;
            for l in logits.iter_mut() {
                *l = numeric::exp(*l - max);
                denom += *l;
            }
            let out_row = &mut out.row_mut(i)[h * dh..(h + 1) * dh];
            for (&j, &w) in keys.iter().zip(logits.iter()) {
                numeric::axpy(w / denom, v[h].row(j), out_row);
            }
        }
    }
    Ok(out)
}

/// Sparse attention pattern in CSR form: for every query row, the ascending
/// list of key positions it attends to.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionPattern {
    n: usize,
    row_ptr: Vec<usize>,
    idx: Vec<usize>,
    globals: Vec<usize>,
}

impl AttentionPattern {
    /// Every row attends to every position.
    pub fn full(n: usize) -> Self {
        let mut idx = Vec::with_capacity(n * n);
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        for _ in 0..n {
            idx.extend(0..n);
            row_ptr.push(idx.len());
        }
        AttentionPattern { n, row_ptr, idx, globals: Vec::new() }
    }

    /// Window of total width `w` plus global positions. Global rows attend
    /// everywhere; `globals` must be sorted, deduplicated, and within range.
    pub fn windowed(n: usize, w: usize, globals: &[usize]) -> Self {
        let half = w / 2;
        let mut idx = Vec::new();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        for i in 0..n {
            if globals.binary_search(&i).is_ok() {
                idx.extend(0..n);
            } else {
                let lo = i.saturating_sub(half);
                let hi = (i + half).min(n - 1);
                // merge sorted globals with the window range, ascending
                let mut g = globals.iter().copied().peekable();
                while let Some(&p) = g.peek() {
                    if p >= lo {
                        break;
                    }
                    idx.push(p);
                    g.next();
                }
                idx.extend(lo..=hi);
                for p in g {
                    if p > hi {
                        idx.push(p);
                    }
                }
            }
            row_ptr.push(idx.len());
        }
        AttentionPattern { n, row_ptr, idx, globals: globals.to_vec() }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[usize] {
        &self.idx[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    #[inline]
    pub fn is_global(&self, i: usize) -> bool {
        self.globals.binary_search(&i).is_ok()
    }

    pub fn globals(&self) -> &[usize] {
        &self.globals
    }

    /// Key visits per row; the realization of the linear-cost claim that the
    /// instrumentation tests assert against.
    pub fn row_key_counts(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.row(i).len()).collect()
    }
}

/// Per-call instrumentation for the sparse kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseStats {
    /// Keys visited per query row per head.
    pub per_row_keys: Vec<usize>,
}

/// Sliding-window attention with global tokens.
///
/// Equal to [`dense_attention`] under [`build_attention_mask`]`(n, w,
/// globals)`, but each non-global row does O(w + |globals|) work.
pub fn sliding_window_attention(
    q: &[Mat],
    k: &[Mat],
    v: &[Mat],
    w: usize,
    globals: &[usize],
) -> Result<Mat> {
    sliding_window_attention_with_stats(q, k, v, w, globals).map(|(out, _)| out)
}

/// As [`sliding_window_attention`], also returning key-visit counts.
pub fn sliding_window_attention_with_stats(
    q: &[Mat],
    k: &[Mat],
    v: &[Mat],
    w: usize,
    globals: &[usize],
) -> Result<(Mat, SparseStats)> {
    let n = q.first().map_or(0, Mat::rows);
    let dh = check_shapes(q, k, v, n)?;
    let mut sorted = globals.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.iter().any(|&g| g >= n) {
        return Err(Error::DimensionMismatch { expected: n, got: *sorted.last().unwrap() });
    }
    let pattern = AttentionPattern::windowed(n, w, &sorted);
    let out = pattern_attention(q, k, v, &pattern, dh)?;
    let stats = SparseStats { per_row_keys: pattern.row_key_counts() };
    Ok((out, stats))
}

/// Attention over an arbitrary precomputed pattern. This is the kernel the
/// encoder runs for every variant; the pattern decides dense vs sparse.
pub fn pattern_attention(
    q: &[Mat],
    k: &[Mat],
    v: &[Mat],
    pattern: &AttentionPattern,
    dh: usize,
) -> Result<Mat> {
    let n = pattern.n();
    let heads = q.len();
    let scale = 1.0 / numeric::sqrt(dh as f64);
    let mut out = Mat::zeros(n, heads * dh);
    let mut weights: Vec<f64> = Vec::new();
    for h in 0..heads {
        for i in 0..n {
            let keys = pattern.row(i);
            if keys.is_empty() {
                return Err(Error::InvalidConfig("attention row fully masked".into()));
            }
            let qi = q[h].row(i);
            weights.clear();
            weights.extend(
                keys.iter()
                    .map(|&j| numeric::dot(qi, k[h].row(j)) * scale),
            );
            let max = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut denom = 0.0;
            for l in weights.iter_mut() {
                *l = numeric::exp(*l - max);
                denom += *l;
            }
            let out_row = &mut out.row_mut(i)[h * dh..(h + 1) * dh];
            for (&j, &wgt) in keys.iter().zip(weights.iter()) {
                numeric::axpy(wgt / denom, v[h].row(j), out_row);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::*;

    fn random_mat(rng: &mut rng::SeededRng, rows: usize, cols: usize) -> Mat {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                *m.at_mut(i, j) = rng::normal(rng);
            }
        }
        m
    }

    fn random_qkv(seed: u64, heads: usize, n: usize, dh: usize) -> (Vec<Mat>, Vec<Mat>, Vec<Mat>) {
        let mut r = rng::seeded(seed);
        let gen = |r: &mut rng::SeededRng| (0..heads).map(|_| random_mat(r, n, dh)).collect();
        (gen(&mut r), gen(&mut r), gen(&mut r))
    }

    /// Independent naive attention: no stabilization, direct double loop.
    fn naive_attention(q: &[Mat], k: &[Mat], v: &[Mat], mask: &AttentionMask) -> Mat {
        let n = mask.n();
        let dh = q[0].cols();
        let mut out = Mat::zeros(n, q.len() * dh);
        for h in 0..q.len() {
            for i in 0..n {
                let mut denom = 0.0;
                let mut weighted = alloc::vec![0.0; dh];
                for j in 0..n {
                    if !mask.allowed(i, j) {
                        continue;
                    }
                    let mut s = 0.0;
                    for d in 0..dh {
                        s += q[h].at(i, d) * k[h].at(j, d);
                    }
                    let e = numeric::exp(s / numeric::sqrt(dh as f64));
                    denom += e;
                    for d in 0..dh {
                        weighted[d] += e * v[h].at(j, d);
                    }
                }
                for d in 0..dh {
                    *out.at_mut(i, h * dh + d) = weighted[d] / denom;
                }
            }
        }
        out
    }

    fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
        a.as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(x, y)| numeric::abs(x - y))
            .fold(0.0, f64::max)
    }

    #[test]
    fn globals_cls_only() {
        use crate::text::{CLS_ID, SEP_ID};
        let toks = [CLS_ID, 7, 9];
        assert_eq!(
            global_positions(&toks, GlobalMode::ClsOnly, CLS_ID, SEP_ID).unwrap(),
            vec![0]
        );
    }

    #[test]
    fn globals_paragraph_seps() {
        use crate::text::{CLS_ID, SEP_ID};
        let toks = [CLS_ID, 7, SEP_ID, 9, SEP_ID];
        assert_eq!(
            global_positions(&toks, GlobalMode::ClsAndParagraphSep, CLS_ID, SEP_ID).unwrap(),
            vec![0, 2, 4]
        );
        let no_sep = [CLS_ID, 7, 9];
        assert_eq!(
            global_positions(&no_sep, GlobalMode::ClsAndParagraphSep, CLS_ID, SEP_ID).unwrap(),
            vec![0]
        );
    }

    #[test]
    fn globals_require_cls() {
        use crate::text::{CLS_ID, SEP_ID};
        assert_eq!(
            global_positions(&[7, 9], GlobalMode::ClsOnly, CLS_ID, SEP_ID),
            Err(Error::MissingCls)
        );
        assert_eq!(
            global_positions(&[], GlobalMode::ClsOnly, CLS_ID, SEP_ID),
            Err(Error::MissingCls)
        );
    }

    #[test]
    fn mask_window_covers_sequence() {
        let m = build_attention_mask(4, 8, &[]);
        for i in 0..4 {
            for j in 0..4 {
                assert!(m.allowed(i, j));
            }
        }
    }

    #[test]
    fn mask_band_plus_global_row_and_column() {
        let m = build_attention_mask(5, 2, &[0]);
        for i in 0..5 {
            for j in 0..5 {
                let expected = i.abs_diff(j) <= 1 || i == 0 || j == 0;
                assert_eq!(m.allowed(i, j), expected, "({i},{j})");
            }
        }
    }

    #[test]
    fn mask_zero_window_is_identity() {
        let m = build_attention_mask(4, 0, &[]);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m.allowed(i, j), i == j);
            }
        }
    }

    #[test]
    fn dense_single_row_returns_v() {
        let (q, k, v) = random_qkv(0, 2, 1, 3);
        let out = dense_attention(&q, &k, &v, &build_attention_mask(1, 0, &[])).unwrap();
        assert_eq!(&out.row(0)[..3], v[0].row(0));
        assert_eq!(&out.row(0)[3..], v[1].row(0));
    }

    #[test]
    fn dense_zero_queries_average_permitted_rows() {
        let n = 5;
        let q = vec![Mat::zeros(n, 2)];
        let (_, k, v) = random_qkv(1, 1, n, 2);
        let mask = build_attention_mask(n, 2, &[]);
        let out = dense_attention(&q, &k, &v, &mask).unwrap();
        for i in 0..n {
            let js: Vec<usize> = (0..n).filter(|&j| mask.allowed(i, j)).collect();
            for d in 0..2 {
                let mean = js.iter().map(|&j| v[0].at(j, d)).sum::<f64>() / js.len() as f64;
                assert!((out.at(i, d) - mean).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dense_matches_naive_oracle() {
        let (q, k, v) = random_qkv(2, 2, 6, 4);
        let mask = build_attention_mask(6, 2, &[0]);
        let ours = dense_attention(&q, &k, &v, &mask).unwrap();
        let naive = naive_attention(&q, &k, &v, &mask);
        assert!(max_abs_diff(&ours, &naive) < 1e-10);
    }

    #[test]
    fn sparse_short_sequence_equals_unmasked_dense() {
        let (q, k, v) = random_qkv(3, 2, 5, 4);
        let dense = dense_attention(&q, &k, &v, &build_attention_mask(5, 8, &[])).unwrap();
        let sparse = sliding_window_attention(&q, &k, &v, 8, &[]).unwrap();
        assert_eq!(dense, sparse);
    }

    #[test]
    fn sparse_equals_masked_dense() {
        let (q, k, v) = random_qkv(4, 2, 64, 4);
        let globals = [0usize];
        let dense = dense_attention(&q, &k, &v, &build_attention_mask(64, 8, &globals)).unwrap();
        let sparse = sliding_window_attention(&q, &k, &v, 8, &globals).unwrap();
        assert!(max_abs_diff(&dense, &sparse) < 1e-10);
    }

    #[test]
    fn sparse_rows_are_convex_combinations() {
        // With V = identity, each output row is exactly its weight vector.
        let n = 12;
        let (q, k, _) = random_qkv(5, 1, n, n);
        let mut eye = Mat::zeros(n, n);
        for i in 0..n {
            *eye.at_mut(i, i) = 1.0;
        }
        let out = sliding_window_attention(&q, &k, &[eye], 4, &[0, 5]).unwrap();
        for i in 0..n {
            let row = out.row(i);
            assert!(row.iter().all(|&p| p >= 0.0));
            let sum: f64 = row.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sparse_row_work_is_bounded() {
        let n = 256;
        let w = 8;
        let globals = [0usize, 5];
        let pattern = AttentionPattern::windowed(n, w, &globals);
        let counts = pattern.row_key_counts();
        for i in 0..n {
            if pattern.is_global(i) {
                continue;
            }
            assert!(
                counts[i] <= 2 * (w + globals.len() + 1),
                "row {i} visits {} keys",
                counts[i]
            );
        }
    }

    #[test]
    fn windowed_pattern_rows_are_sorted_unique() {
        let pattern = AttentionPattern::windowed(40, 6, &[0, 3, 17]);
        for i in 0..40 {
            let row = pattern.row(i);
            assert!(row.windows(2).all(|p| p[0] < p[1]), "row {i}: {row:?}");
            assert!(row.contains(&i));
        }
    }

    proptest! {
        #[test]
        fn mask_is_symmetric(n in 1usize..24, w in 0usize..12, g1 in 0usize..24, g2 in 0usize..24) {
            let globals: Vec<usize> = [g1 % n, g2 % n].into_iter().collect();
            let m = build_attention_mask(n, w, &globals);
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(m.allowed(i, j), m.allowed(j, i));
                }
            }
        }

        #[test]
        fn sparse_dense_equivalence(seed in 0u64..50, n in 1usize..32, w in prop::sample::select(alloc::vec![0usize, 2, 8]), with_globals in 0usize..3) {
            let globals: Vec<usize> = match with_globals {
                0 => alloc::vec![],
                1 => alloc::vec![0],
                _ => {
                    if n > 5 { alloc::vec![0, 5] } else { alloc::vec![0] }
                }
            };
            let (q, k, v) = random_qkv(seed, 2, n, 3);
            let dense = dense_attention(&q, &k, &v, &build_attention_mask(n, w, &globals)).unwrap();
            let sparse = sliding_window_attention(&q, &k, &v, w, &globals).unwrap();
            prop_assert!(max_abs_diff(&dense, &sparse) < 1e-10);
        }
    }
}
