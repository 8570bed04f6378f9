use rand::seq::SliceRandom;
use rand::SeedableRng;
use rayon::prelude::*;

use super::model::{Input, Model};
use crate::autodiff::{sigmoid, Tape, Tensor};
use crate::data::PAD;
use crate::error::{Error, Result};
use crate::rng::{purpose, rng_for, Rng};

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub lr: f64,
    pub epochs: usize,
    pub batch: usize,
    pub seed: u64,
    /// Redraw all parameters from `seed` before training.
    pub reinit: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr: 0.05,
            epochs: 30,
            batch: 32,
            seed: 0,
            reinit: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainReport {
    /// Mean minibatch loss per epoch, measured before each update.
    pub epoch_losses: Vec<f64>,
}

/// Minimizes mean binary cross-entropy with plain minibatch SGD.
pub fn train(model: &mut Model, inputs: &[Input<'_>], labels: &[u8], cfg: &TrainConfig) -> Result<TrainReport> {
    if inputs.is_empty() {
        return Err(Error::EmptyLabeled);
    }
    if inputs.len() != labels.len() {
        return Err(Error::Input(format!(
            "{} inputs but {} labels",
            inputs.len(),
            labels.len()
        )));
    }
    if cfg.batch == 0 || !(cfg.lr > 0.0) {
        return Err(Error::Config("batch size and learning rate must be positive".into()));
    }
    if cfg.reinit {
        model.reinitialize(cfg.seed);
    }
    let mut rng = rng_for(cfg.seed, &[purpose::TRAIN]);
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    let mut report = TrainReport::default();
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        let mut batches = 0;
        for (b, chunk) in order.chunks(cfg.batch).enumerate() {
            let loss = step(model, inputs, labels, chunk, cfg.lr, &mut rng)?;
            if !loss.is_finite() || !model.all_finite() {
                return Err(Error::NonFinite(format!(
                    "training loss {loss} at epoch {epoch}, batch {b}"
                )));
            }
            total += loss;
            batches += 1;
        }
        report.epoch_losses.push(total / batches as f64);
    }
    model.bump_version();
    Ok(report)
}

fn step(model: &mut Model, inputs: &[Input<'_>], labels: &[u8], batch: &[usize], lr: f64, rng: &mut Rng) -> Result<f64> {
    let mut tape = Tape::new();
    let bound = model.bind(&mut tape, true);
    let mut logits = Vec::with_capacity(batch.len());
    let mut targets = Vec::with_capacity(batch.len());
    for &i in batch {
        let x = model.embed(&mut tape, &bound, inputs[i], false)?;
        let f = model.features(&mut tape, &bound, x.var)?;
        let mask = (model.config().dropout > 0.0).then(|| model.draw_mask(rng));
        logits.push(model.head(&mut tape, &bound, f, mask.as_ref())?);
        targets.push(f64::from(labels[i]));
    }
    let z = tape.concat(&logits)?;
    let loss = tape.bce_with_logits(z, &targets)?;
    let value = tape.value(loss).item()?;
    if !value.is_finite() {
        return Ok(value);
    }
    tape.backward(loss)?;
    let vars = bound.vars().to_vec();
    let embedding = model.embedding_index();
    for (i, (p, v)) in model.params_mut().iter_mut().zip(vars).enumerate() {
        let Some(g) = tape.grad(v) else { continue };
        let dim = *p.value.shape().last().unwrap_or(&1);
        let data = p.value.data_mut();
        for (w, gw) in data.iter_mut().zip(g) {
            *w -= lr * gw;
        }
        if Some(i) == embedding {
            // PAD row stays zero
            data[PAD * dim..(PAD + 1) * dim].fill(0.0);
        }
    }
    Ok(value)
}

/// Evaluation-mode logits, computed in parallel over inputs.
pub fn logits(model: &Model, inputs: &[Input<'_>]) -> Result<Vec<f64>> {
    inputs.par_iter().map(|x| model.logit(*x)).collect()
}

pub fn predict_proba(model: &Model, inputs: &[Input<'_>]) -> Result<Vec<f64>> {
    Ok(logits(model, inputs)?.into_iter().map(sigmoid).collect())
}

/// Fraction of inputs whose thresholded probability matches the label.
pub fn accuracy(model: &Model, inputs: &[Input<'_>], labels: &[u8]) -> Result<f64> {
    if inputs.is_empty() {
        return Err(Error::Input("accuracy of an empty set".into()));
    }
    let probs = predict_proba(model, inputs)?;
    let correct = probs
        .iter()
        .zip(labels)
        .filter(|(p, &y)| u8::from(**p >= 0.5) == y)
        .count();
    Ok(correct as f64 / inputs.len() as f64)
}

/// How MC-dropout masks are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaskSource {
    /// Pass `t` draws its mask from its own stream `(seed, t)`.
    Random,
    /// Every mask is all ones (no stochasticity); for tests.
    AllOnes,
}

/// `passes` probabilities from independent dropout masks over the features
/// feeding the output layer. Pass `t` uses stream `t` of `seed`, so a prefix
/// of a longer run equals a shorter run.
pub fn mc_dropout_passes(model: &Model, input: Input<'_>, passes: usize, seed: u64, source: MaskSource) -> Result<Vec<f64>> {
    if model.config().dropout == 0.0 {
        return Err(Error::Config("MC dropout needs a dropout rate above 0".into()));
    }
    if passes < 2 {
        return Err(Error::Config(format!("MC dropout needs at least 2 passes, got {passes}")));
    }
    let features = model.representation(input)?;
    let mut rng = Rng::seed_from_u64(seed);
    (0..passes)
        .map(|t| {
            let mask = match source {
                MaskSource::Random => {
                    rng.set_stream(t as u64);
                    rng.set_word_pos(0);
                    model.draw_mask(&mut rng)
                }
                MaskSource::AllOnes => Tensor::vector(vec![1.0; features.len()]),
            };
            Ok(sigmoid(model.logit_from_features(&features, Some(&mask))?))
        })
        .collect()
}
