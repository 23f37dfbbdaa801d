//! Core algorithms for long-document text classification.
//!
//! This crate implements the two families of models this project studies,
//! together with everything needed to compare them on a desk-scale corpus:
//!
//! - **Bag-of-words transforms** over a transformer encoder: TF-IDF fitting
//!   and scoring ([`tfidf`]), the dedup-and-sort input transform, and TF-IDF
//!   bucket embeddings.
//! - **Sparse attention** with a sliding window and global tokens
//!   ([`attention`]), plus warm-start transforms that extend a trained
//!   encoder to longer inputs by cloning positional embeddings
//!   ([`warm_start`]).
//! - A from-scratch transformer [`encoder`] (flat dense, flat sparse, and
//!   hierarchical variants) with exact reverse-mode gradients, a linear
//!   max-margin baseline ([`linear`]), and the training/evaluation protocol
//!   ([`train`], [`metrics`]).
//!
//! Everything here is pure computation over in-memory values: deterministic
//! given its inputs and free of IO. File formats, dataset loading, and the
//! command-line surface live in the companion `longdoc-cli` crate.
//!
//! The crate is `no_std`-compatible (with `alloc`); enable the `libm`
//! feature instead of the default `std` for such builds.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("longdoc-core requires either the `std` or the `libm` feature");

pub mod attention;
pub mod encoder;
pub mod error;
pub mod linear;
pub mod mat;
pub mod metrics;
pub mod numeric;
pub mod rng;
pub mod synth;
pub mod text;
pub mod tfidf;
pub mod train;
pub mod warm_start;

pub use error::{Error, Result};
pub use mat::Mat;
