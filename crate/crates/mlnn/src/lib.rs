//! File formats, model persistence and the command-line front end for
//! [`mlnn_core`].
//!
//! - [`svmlight`] and [`dense`] read datasets; svmlight is also written.
//! - [`model_file`] stores a trained network and its threshold predictor in
//!   a versioned little-endian container.
//! - [`config`] parses flat `key = value` run configurations.
//! - [`report`] and [`logs`] serialize evaluation reports, learning curves
//!   and cost landscapes.
//! - [`vocab`] reads tokenized documents and persists fitted tf-idf
//!   vocabularies.
//! - [`commands`] implements the `mlnn` subcommands.

pub mod commands;
pub mod config;
pub mod dense;
mod error;
mod float;
pub mod logs;
pub mod model_file;
pub mod report;
pub mod svmlight;
pub mod vocab;

pub use error::FormatError;
pub use float::format_f64;
