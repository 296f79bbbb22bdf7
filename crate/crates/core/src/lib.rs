//! Single-hidden-layer neural networks for multi-label classification.
//!
//! The crate is `no_std` (it needs `alloc`) and holds every numerical piece:
//! sparse instances and tf-idf weighting, the feed-forward network with its
//! two cost functions and hand-derived backpropagation, the SGD family of
//! optimizers, per-example threshold calibration, the ranking and
//! bipartition evaluation measures, and the training loop that ties them
//! together. File formats, model persistence and the command line live in
//! the `mlnn` crate.
//!
//! ```
//! use mlnn_core::data::{LabelSet, SparseVector};
//! use mlnn_core::metrics::rank_loss;
//!
//! let y = LabelSet::new(3, vec![0, 2]).unwrap();
//! assert_eq!(rank_loss(&[0.9, 0.1, 0.8], &y), Some(0.0));
//! let x = SparseVector::new(4, vec![(1, 0.5), (3, 2.0)]).unwrap();
//! assert_eq!(x.nnz(), 2);
//! ```
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod data;
mod error;
pub mod landscape;
pub mod metrics;
pub mod network;
pub mod optim;
pub mod rng;
pub mod tfidf;
pub mod threshold;
pub mod train;

pub use error::{Error, Result};
