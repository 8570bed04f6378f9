//! Binary classifiers on top of the autodiff tape and their training loop.

pub mod checkpoint;
mod config;
mod model;
mod train;

pub use config::{ModelConfig, ModelKind};
pub use model::{Bound, Embedded, Input, Model, Param};
pub use train::{accuracy, logits, mc_dropout_passes, predict_proba, train, MaskSource, TrainConfig, TrainReport};
