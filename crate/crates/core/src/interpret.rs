//! Local gradient interpretations.
//!
//! For a sample `x` with model output `y`, the sample interpretation is
//! `dy/dx`. For a sentence, word `j` with embedding `e_j` gets the scalar
//! `dy/de_j . e_j`, optionally kept as the elementwise product
//! `dy/de_j * e_j` whose components sum to the scalar. With a piecewise
//! linear network and no biases these contributions add up to `y` exactly.

use std::fmt::Write as _;
use std::path::Path;

use crate::autodiff::{dot, sigmoid, Tape};
use crate::data::Sentence;
use crate::error::{Error, Result};
use crate::models::{Input, Model};
use crate::output::write_atomic;

/// Which model output is differentiated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Target {
    /// The pre-sigmoid logit.
    #[default]
    Logit,
    /// The predicted probability `sigmoid(logit)`.
    Probability,
}

/// How a word interpretation is compared to another one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum WordMode {
    /// The scalar `dy/de . e`.
    #[default]
    Scalar,
    /// The length-`d` vector `dy/de * e`.
    Elementwise,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleInterpretation {
    pub sample: usize,
    pub values: Vec<f64>,
    /// Differentiated output at the time of computation.
    pub output: f64,
    pub version: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WordInterpretation {
    pub sample: usize,
    pub position: usize,
    pub token: usize,
    pub value: f64,
    pub contribution: Option<Vec<f64>>,
}

impl WordInterpretation {
    /// The vector compared under `mode`.
    pub fn signature(&self, mode: WordMode) -> Vec<f64> {
        match (mode, &self.contribution) {
            (WordMode::Elementwise, Some(c)) => c.clone(),
            _ => vec![self.value],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SentenceInterpretation {
    pub sample: usize,
    pub output: f64,
    pub version: u64,
    pub words: Vec<WordInterpretation>,
}

/// Per-position embedding gradients of one sentence.
#[derive(Clone, Debug)]
pub(crate) struct EmbeddingGradients {
    pub logit: f64,
    /// `(position, token, d logit / d e, e)` for every non-PAD word.
    pub rows: Vec<(usize, usize, Vec<f64>, Vec<f64>)>,
}

pub(crate) fn embedding_gradients(model: &Model, tokens: &[usize]) -> Result<EmbeddingGradients> {
    let mut tape = Tape::new();
    let bound = model.bind(&mut tape, false);
    let emb = model.embed(&mut tape, &bound, Input::Tokens(tokens), true)?;
    let f = model.features(&mut tape, &bound, emb.var)?;
    let y = model.head(&mut tape, &bound, f, None)?;
    let logit = tape.value(y).item()?;
    tape.backward(y)?;
    let grad = tape.grad(emb.var).expect("input leaf requires grad");
    let values = tape.value(emb.var);
    let d = values.cols();
    let rows = emb
        .positions
        .iter()
        .enumerate()
        .filter_map(|(r, pos)| {
            pos.map(|j| {
                (
                    j,
                    tokens[j],
                    grad[r * d..(r + 1) * d].to_vec(),
                    values.row(r).to_vec(),
                )
            })
        })
        .collect();
    Ok(EmbeddingGradients { logit, rows })
}

fn target_scale(target: Target, logit: f64) -> (f64, f64) {
    match target {
        Target::Logit => (logit, 1.0),
        Target::Probability => {
            let p = sigmoid(logit);
            (p, p * (1.0 - p))
        }
    }
}

/// Gradient of the output with respect to the raw input coordinates.
pub fn interpret_sample(model: &Model, sample: usize, x: &[f64], target: Target) -> Result<SampleInterpretation> {
    let mut tape = Tape::new();
    let bound = model.bind(&mut tape, false);
    let input = model.embed(&mut tape, &bound, Input::Point(x), true)?;
    let f = model.features(&mut tape, &bound, input.var)?;
    let y = model.head(&mut tape, &bound, f, None)?;
    let logit = tape.value(y).item()?;
    tape.backward(y)?;
    let (output, scale) = target_scale(target, logit);
    let values = tape
        .grad(input.var)
        .expect("input leaf requires grad")
        .iter()
        .map(|g| g * scale)
        .collect();
    Ok(SampleInterpretation {
        sample,
        values,
        output,
        version: model.version(),
    })
}

/// Word-level interpretations from a single backward pass. PAD positions
/// are skipped.
pub fn interpret_words(model: &Model, sentence: &Sentence, target: Target, keep_contributions: bool) -> Result<SentenceInterpretation> {
    let grads = embedding_gradients(model, &sentence.tokens)?;
    let (output, scale) = target_scale(target, grads.logit);
    let words = grads
        .rows
        .into_iter()
        .map(|(position, token, g, e)| {
            let value = dot(&g, &e) * scale;
            let contribution = keep_contributions.then(|| g.iter().zip(&e).map(|(a, b)| a * b * scale).collect());
            WordInterpretation {
                sample: sentence.id,
                position,
                token,
                value,
                contribution,
            }
        })
        .collect();
    Ok(SentenceInterpretation {
        sample: sentence.id,
        output,
        version: model.version(),
        words,
    })
}

/// How far the output is from its first-order reconstruction through the
/// origin: `|y - I . x|` for points, `|y - sum_j I_j|` for sentences.
/// Whatever remains plays the role of the bias term.
pub fn linear_residual(model: &Model, input: Input<'_>) -> Result<f64> {
    match input {
        Input::Point(x) => {
            let s = interpret_sample(model, 0, x, Target::Logit)?;
            Ok((s.output - dot(&s.values, x)).abs())
        }
        Input::Tokens(tokens) => {
            let g = embedding_gradients(model, tokens)?;
            let total: f64 = g.rows.iter().map(|(_, _, gr, e)| dot(gr, e)).sum();
            Ok((g.logit - total).abs())
        }
    }
}

/// Writes `sample_id,position,token,interp` rows.
pub fn write_interpretations_csv(path: &Path, interps: &[SentenceInterpretation]) -> Result<()> {
    let mut out = String::from("sample_id,position,token,interp\n");
    for s in interps {
        for w in &s.words {
            writeln!(out, "{},{},{},{}", w.sample, w.position, w.token, w.value).expect("string write");
        }
    }
    write_atomic(path, &out)
}

/// Fails if any interpretation was produced under a different model version.
pub fn ensure_version(interps: &[SentenceInterpretation], version: u64) -> Result<()> {
    match interps.iter().find(|s| s.version != version) {
        Some(s) => Err(Error::Input(format!(
            "interpretation of sample {} has model version {} but {version} was expected",
            s.sample, s.version
        ))),
        None => Ok(()),
    }
}
