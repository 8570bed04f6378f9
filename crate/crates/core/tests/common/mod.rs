#![allow(dead_code)]

pub mod oracles;

use alden::autodiff::{Tape, Tensor, Var};
use alden::models::{Input, Model, ModelConfig, ModelKind};
use alden::Result;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small random instance of `kind`, cheap enough to finite-difference.
pub fn small_config(kind: ModelKind, bias: bool) -> ModelConfig {
    let mut c = match kind {
        ModelKind::Mlp2d => ModelConfig::mlp2d(),
        ModelKind::MeanPool => ModelConfig::meanpool(30),
        ModelKind::Cnn => ModelConfig::cnn(30),
    };
    c.bias = bias;
    match kind {
        ModelKind::Mlp2d => {
            c.hidden = 16;
            c.hidden_layers = 2;
        }
        ModelKind::MeanPool => {
            c.hidden = 12;
            c.embedding_dim = 8;
        }
        ModelKind::Cnn => {
            c.hidden = 4;
            c.embedding_dim = 6;
        }
    }
    c
}

/// Random model with nonzero biases so the bias paths are exercised too.
pub fn random_model(kind: ModelKind, bias: bool, seed: u64) -> Model {
    let mut m = Model::new(small_config(kind, bias), seed).unwrap();
    let mut r = rng(seed ^ 0xb1a5);
    let names: Vec<String> = m.params().iter().map(|p| p.name.clone()).collect();
    for name in names {
        if name.ends_with("bias") {
            let t = m.param(&name).unwrap().clone();
            let v: Vec<f64> = (0..t.len()).map(|_| r.gen_range(-0.3..0.3)).collect();
            m.set_param(&name, Tensor::new(t.shape().to_vec(), v).unwrap()).unwrap();
        }
    }
    m
}

pub fn random_tokens(r: &mut impl Rng, vocab: usize, min: usize, max: usize) -> Vec<usize> {
    let n = r.gen_range(min..=max);
    (0..n).map(|_| r.gen_range(2..vocab)).collect()
}

/// The tensor a model differentiates against for `input`: the point itself
/// or the embedding rows of the tokens.
pub fn input_tensor(model: &Model, input: Input<'_>) -> Tensor {
    match input {
        Input::Point(x) => Tensor::matrix(1, x.len(), x.to_vec()).unwrap(),
        Input::Tokens(t) => {
            let table = model.embeddings().unwrap();
            let d = table.cols();
            let rows: Vec<f64> = t.iter().flat_map(|&i| table.row(i).to_vec()).collect();
            Tensor::matrix(t.len(), d, rows).unwrap()
        }
    }
}

/// Evaluation-mode logit as a function of the input tensor.
pub fn logit_fn(model: &Model) -> impl Fn(&mut Tape, Var) -> Result<Var> + '_ {
    move |tape: &mut Tape, x: Var| {
        let b = model.bind(tape, false);
        let f = model.features(tape, &b, x)?;
        model.head(tape, &b, f, None)
    }
}

pub fn eval_at(f: &impl Fn(&mut Tape, Var) -> Result<Var>, p: &Tensor) -> f64 {
    let mut t = Tape::new();
    let x = t.leaf(p.clone(), false);
    let y = f(&mut t, x).unwrap();
    t.value(y).item().unwrap()
}

/// True when `f` is affine along every coordinate within `+-span` of `p`.
/// All models here are piecewise linear in their inputs, so a vanishing
/// second difference means no ReLU or max-pool switch lies that close.
pub fn off_kink(f: &impl Fn(&mut Tape, Var) -> Result<Var>, p: &Tensor, span: f64) -> bool {
    let y0 = eval_at(f, p);
    (0..p.len()).all(|i| {
        let mut a = p.clone();
        a.data_mut()[i] += span;
        let mut b = p.clone();
        b.data_mut()[i] -= span;
        let second = eval_at(f, &a) - 2.0 * y0 + eval_at(f, &b);
        second.abs() <= 1e-10 * y0.abs().max(1.0)
    })
}

/// A random 20-sentence pool for the selection oracles: tokens from a
/// small vocabulary, interpretations on a 0.1 grid and integer embeddings,
/// so that ties in every comparison are common.
pub struct ToyPool {
    pub sentences: Vec<oracles::ToySentence>,
    pub embeddings: Vec<Vec<f64>>,
    pub labeled: Vec<usize>,
}

impl ToyPool {
    pub fn random(seed: u64, size: usize) -> Self {
        let mut r = rng(seed);
        let vocab = 10;
        let embeddings: Vec<Vec<f64>> = (0..vocab)
            .map(|_| (0..3).map(|_| r.gen_range(0..3) as f64).collect())
            .collect();
        let sentences = (0..size)
            .map(|_| {
                let n = r.gen_range(1..=4);
                (0..n)
                    .map(|_| (r.gen_range(2..vocab), r.gen_range(-10..=10) as f64 / 10.0))
                    .collect()
            })
            .collect();
        let mut labeled: Vec<usize> = rand::seq::index::sample(&mut r, size, 3).into_vec();
        labeled.sort_unstable();
        Self {
            sentences,
            embeddings,
            labeled,
        }
    }

    pub fn pool(&self) -> alden::acquisition::PoolState {
        let unlabeled = (0..self.sentences.len()).filter(|i| !self.labeled.contains(i));
        alden::acquisition::PoolState::new(self.labeled.iter().copied(), unlabeled).unwrap()
    }

    pub fn interpretations(&self) -> Vec<alden::interpret::SentenceInterpretation> {
        use alden::interpret::{SentenceInterpretation, WordInterpretation};
        self.sentences
            .iter()
            .enumerate()
            .map(|(i, s)| SentenceInterpretation {
                sample: i,
                output: 0.0,
                version: 1,
                words: s
                    .iter()
                    .enumerate()
                    .map(|(j, &(token, value))| WordInterpretation {
                        sample: i,
                        position: j,
                        token,
                        value,
                        contribution: None,
                    })
                    .collect(),
            })
            .collect()
    }

    pub fn embedding_tensor(&self) -> Tensor {
        let d = self.embeddings[0].len();
        Tensor::matrix(self.embeddings.len(), d, self.embeddings.concat()).unwrap()
    }
}

/// Random 2-D points as an id-keyed map.
pub fn random_points(seed: u64, n: usize) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    (0..n).map(|_| vec![r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0)]).collect()
}
