//! Pool-based deep active learning for binary text classification, with
//! selection by the diversity of local gradient interpretations alongside
//! the usual uncertainty and diversity baselines.
//!
//! The crate is organized bottom-up:
//!
//! - [`autodiff`]: a small reverse-mode tape over dense `f64` tensors.
//! - [`data`]: synthetic 2-D points, corpora, vocabularies, word vectors.
//! - [`models`]: MLP, mean-pool and CNN classifiers with a single logit.
//! - [`interpret`]: input and word-embedding gradient interpretations.
//! - [`acquisition`]: the selection strategies and k-means utilities.
//! - [`experiment`]: the active-learning loop, metrics, the 2-D region
//!   experiment and CSV outputs.
//! - [`cli`]: the `alden` command-line front end.

pub mod acquisition;
pub mod autodiff;
pub mod cli;
pub mod data;
pub mod error;
pub mod experiment;
pub mod interpret;
pub mod models;
pub mod output;
pub mod rng;

pub use error::{Error, Result};
