use rand::seq::SliceRandom;

use super::corpus::Sentence;
use crate::error::{Error, Result};
use crate::rng::{purpose, rng_for};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<Sentence>,
    pub validation: Vec<Sentence>,
    pub test: Vec<Sentence>,
}

pub const DEFAULT_RATIOS: (f64, f64, f64) = (0.6, 0.2, 0.2);

/// Seeded shuffle followed by a cut: train and validation sizes are
/// `floor(n * ratio)`, the remainder goes to test.
pub fn split(sentences: &[Sentence], ratios: (f64, f64, f64), seed: u64) -> Result<Split> {
    if sentences.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let (a, b, c) = ratios;
    if [a, b, c].iter().any(|r| !(0.0..=1.0).contains(r)) || (a + b + c - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("split ratios must be in [0,1] and sum to 1, got {ratios:?}")));
    }
    let n = sentences.len();
    let n_train = ((n as f64) * a + 1e-9).floor() as usize;
    let n_val = (((n as f64) * b + 1e-9).floor() as usize).min(n - n_train);
    let mut shuffled = sentences.to_vec();
    shuffled.shuffle(&mut rng_for(seed, &[purpose::SPLIT]));
    let test = shuffled.split_off(n_train + n_val);
    let validation = shuffled.split_off(n_train);
    Ok(Split {
        train: shuffled,
        validation,
        test,
    })
}
