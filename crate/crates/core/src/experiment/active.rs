use std::collections::HashMap;

use rand::seq::index;
use rayon::prelude::*;

use super::metrics::normalized_auc;
use super::oracle::Oracle;
use crate::acquisition::{
    alden_select, badge_embedding, badge_select, bald_score, coreset_select, egl_word_score, random_select, top_k,
    PoolState, Selection, Strategy,
};
use crate::data::{split, Corpus, EmbeddingMatrix, Sentence, DEFAULT_EMBEDDING_DIM, DEFAULT_RATIOS};
use crate::error::{Error, Result};
use crate::interpret::{interpret_words, SentenceInterpretation, Target, WordMode};
use crate::models::{accuracy, train, Input, Model, ModelConfig, ModelKind, TrainConfig};
use crate::rng::{derive_seed, purpose, rng_for};

/// A labeled corpus plus optional pretrained word vectors.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub name: String,
    pub corpus: Corpus,
    pub embeddings: Option<EmbeddingMatrix>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    /// Hidden width, or feature maps per filter width for the CNN.
    pub hidden: usize,
    /// Ignored when pretrained vectors are supplied.
    pub embedding_dim: usize,
    pub strategy: Strategy,
    pub seed_fraction: f64,
    pub budget_fraction: f64,
    pub iterations: usize,
    pub runs: usize,
    pub base_seed: u64,
    /// `seed` is replaced per run and iteration.
    pub train: TrainConfig,
    pub bald_passes: usize,
    pub word_mode: WordMode,
    pub target: Target,
    /// Subsample the training split to at most this many sentences.
    pub max_train: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::Cnn,
            hidden: 100,
            embedding_dim: DEFAULT_EMBEDDING_DIM,
            strategy: Strategy::Alden,
            seed_fraction: 0.02,
            budget_fraction: 0.02,
            iterations: 24,
            runs: 10,
            base_seed: 0,
            train: TrainConfig::default(),
            bald_passes: 20,
            word_mode: WordMode::Scalar,
            target: Target::Logit,
            max_train: None,
        }
    }
}

/// `floor(x + 0.5)`.
pub fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor().max(0.0) as usize
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if !self.model.is_text() {
            return fail(format!("{} cannot classify sentences", self.model));
        }
        for (name, f) in [("seed fraction", self.seed_fraction), ("budget fraction", self.budget_fraction)] {
            if !(f > 0.0 && f <= 1.0) {
                return fail(format!("{name} must lie in (0, 1], got {f}"));
            }
        }
        let used = self.seed_fraction + self.iterations as f64 * self.budget_fraction;
        if used > 1.0 + 1e-9 {
            return fail(format!("seed fraction plus {} iterations of budget exceeds the pool ({used})", self.iterations));
        }
        if self.runs == 0 {
            return fail("at least one run is required".into());
        }
        if self.hidden == 0 || self.embedding_dim == 0 {
            return fail("hidden width and embedding dimension must be positive".into());
        }
        if self.strategy == Strategy::Bald && self.bald_passes < 2 {
            return fail(format!("BALD needs at least 2 passes, got {}", self.bald_passes));
        }
        if self.max_train == Some(0) {
            return fail("max train size must be positive".into());
        }
        Ok(())
    }

    /// `(seed set size, per-iteration budget)` for a training split of `n`.
    pub fn sizes(&self, n: usize) -> Result<(usize, usize)> {
        let seed = round_half_up(self.seed_fraction * n as f64);
        let k = round_half_up(self.budget_fraction * n as f64);
        if seed == 0 || k == 0 {
            return Err(Error::Config(format!(
                "a training split of {n} gives seed set {seed} and budget {k}; both must be at least 1"
            )));
        }
        if seed + self.iterations * k > n {
            return Err(Error::Budget {
                requested: seed + self.iterations * k,
                available: n,
            });
        }
        Ok((seed, k))
    }

    fn model_config(&self, dataset: &Dataset) -> Result<ModelConfig> {
        let mut cfg = ModelConfig::text(self.model, dataset.corpus.vocab.len())?;
        cfg.hidden = self.hidden;
        cfg.embedding_dim = match &dataset.embeddings {
            Some(e) => e.dim(),
            None => self.embedding_dim,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub iteration: usize,
    pub labeled_fraction: f64,
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearningCurve {
    pub points: Vec<CurvePoint>,
    /// `None` for a single-point curve.
    pub nauc: Option<f64>,
}

impl LearningCurve {
    fn from_points(points: Vec<CurvePoint>) -> Result<Self> {
        let nauc = if points.len() >= 2 {
            let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.labeled_fraction, p.accuracy)).collect();
            Some(normalized_auc(&xy)?)
        } else {
            None
        };
        Ok(Self { points, nauc })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelectionRecord {
    pub iteration: usize,
    /// 1-based position within the iteration's batch.
    pub rank: usize,
    pub sample: usize,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub run: usize,
    pub strategy: Strategy,
    pub curve: LearningCurve,
    pub selections: Vec<SelectionRecord>,
    pub train_size: usize,
    pub budget: usize,
    /// Labels handed out by the oracle after the seed set.
    pub label_queries: usize,
}

/// Everything a strategy may look at: the current model, the pool and the
/// label-stripped training sentences.
struct Context<'a> {
    model: &'a Model,
    pool: &'a PoolState,
    sentences: &'a HashMap<usize, Sentence>,
    config: &'a ExperimentConfig,
    seed: u64,
}

impl Context<'_> {
    fn tokens(&self, id: usize) -> &[usize] {
        &self.sentences[&id].tokens
    }

    fn map_ids<T: Send>(&self, ids: Vec<usize>, f: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<(usize, T)>> {
        ids.into_par_iter().map(|id| Ok((id, f(id)?))).collect()
    }

    fn unlabeled(&self) -> Vec<usize> {
        self.pool.unlabeled().iter().copied().collect()
    }

    fn everything(&self) -> Vec<usize> {
        self.pool.labeled().iter().chain(self.pool.unlabeled()).copied().collect()
    }

    fn select(&self, k: usize) -> Result<Vec<Selection>> {
        let m = self.model;
        match self.config.strategy {
            Strategy::Random => random_select(self.pool, k, self.seed),
            Strategy::Alden => {
                let keep = self.config.word_mode == WordMode::Elementwise;
                let interps: Vec<SentenceInterpretation> = self
                    .map_ids(self.everything(), |id| {
                        interpret_words(m, &self.sentences[&id], self.config.target, keep)
                    })?
                    .into_iter()
                    .map(|(_, s)| s)
                    .collect();
                let table = m
                    .embeddings()
                    .ok_or_else(|| Error::Config("ALDEN needs a model with word embeddings".into()))?;
                alden_select(self.pool, &interps, table, self.config.word_mode, k)
            }
            Strategy::EglWord => {
                let scores = self.map_ids(self.unlabeled(), |id| egl_word_score(m, self.tokens(id)))?;
                top_k(scores.into_iter().map(|(id, score)| Selection { id, score }).collect(), k)
            }
            Strategy::Bald => {
                let passes = self.config.bald_passes;
                let scores = self.map_ids(self.unlabeled(), |id| {
                    bald_score(m, self.tokens(id), passes, derive_seed(self.seed, &[id as u64]))
                })?;
                top_k(scores.into_iter().map(|(id, score)| Selection { id, score }).collect(), k)
            }
            Strategy::Coreset => {
                let reps = self.map_ids(self.everything(), |id| m.representation(Input::Tokens(self.tokens(id))))?;
                coreset_select(self.pool, &reps.into_iter().collect(), k)
            }
            Strategy::Badge => {
                let emb = self.map_ids(self.unlabeled(), |id| badge_embedding(m, Input::Tokens(self.tokens(id))))?;
                badge_select(self.pool, &emb.into_iter().collect(), k, self.seed)
            }
        }
    }
}

fn evaluate(model: &Model, test: &[Sentence]) -> Result<f64> {
    let inputs: Vec<Input<'_>> = test.iter().map(|s| Input::Tokens(&s.tokens)).collect();
    let labels: Vec<u8> = test
        .iter()
        .map(|s| s.label.ok_or_else(|| Error::Input(format!("test sentence {} has no label", s.id))))
        .collect::<Result<_>>()?;
    accuracy(model, &inputs, &labels)
}

fn fit(model: &mut Model, sentences: &HashMap<usize, Sentence>, labels: &HashMap<usize, u8>, cfg: &TrainConfig) -> Result<()> {
    let ids: Vec<usize> = {
        let mut v: Vec<usize> = labels.keys().copied().collect();
        v.sort_unstable();
        v
    };
    let inputs: Vec<Input<'_>> = ids.iter().map(|id| Input::Tokens(&sentences[id].tokens)).collect();
    let ys: Vec<u8> = ids.iter().map(|id| labels[id]).collect();
    train(model, &inputs, &ys, cfg).map(|_| ())
}

/// One active-learning run: split, seed set, initial model, then
/// `iterations` rounds of select, query, retrain. Test accuracy is recorded
/// after every training, the seed model included.
pub fn run_active_learning(dataset: &Dataset, config: &ExperimentConfig, run: usize) -> Result<RunOutcome> {
    config.validate()?;
    let model_config = config.model_config(dataset)?;
    let run_seed = derive_seed(config.base_seed, &[run as u64]);

    let parts = split(&dataset.corpus.sentences, DEFAULT_RATIOS, run_seed)?;
    let mut train_split = parts.train;
    if let Some(max) = config.max_train {
        if train_split.len() > max {
            let mut keep = index::sample(&mut rng_for(run_seed, &[purpose::SUBSAMPLE]), train_split.len(), max).into_vec();
            keep.sort_unstable();
            train_split = keep.into_iter().map(|i| train_split[i].clone()).collect();
        }
    }
    let n = train_split.len();
    let (seed_size, k) = config.sizes(n)?;

    let (mut oracle, stripped) = Oracle::new(&train_split)?;
    drop(train_split);
    let ids: Vec<usize> = stripped.iter().map(|s| s.id).collect();
    let sentences: HashMap<usize, Sentence> = stripped.into_iter().map(|s| (s.id, s)).collect();

    let seed_ids: Vec<usize> = index::sample(&mut rng_for(run_seed, &[purpose::SEED_SET]), n, seed_size)
        .into_iter()
        .map(|i| ids[i])
        .collect();
    let mut labels: HashMap<usize, u8> = seed_ids.iter().copied().zip(oracle.seed(&seed_ids)?).collect();
    let mut pool = PoolState::new(
        seed_ids.iter().copied(),
        ids.iter().copied().filter(|id| !labels.contains_key(id)),
    )?;

    let mut model = match &dataset.embeddings {
        Some(e) => Model::with_embeddings(model_config, e.clone(), derive_seed(run_seed, &[purpose::INIT]))?,
        None => Model::new(model_config, derive_seed(run_seed, &[purpose::INIT]))?,
    };
    let train_cfg = |iteration: usize| TrainConfig {
        seed: derive_seed(run_seed, &[purpose::TRAIN, iteration as u64]),
        ..config.train.clone()
    };

    fit(&mut model, &sentences, &labels, &train_cfg(0))?;
    let mut points = vec![CurvePoint {
        iteration: 0,
        labeled_fraction: pool.labeled().len() as f64 / n as f64,
        accuracy: evaluate(&model, &parts.test)?,
    }];
    let mut selections = Vec::with_capacity(config.iterations * k);

    for iteration in 1..=config.iterations {
        let wrap = |e: Error| Error::Iteration {
            iteration,
            source: Box::new(e),
        };
        let picked = Context {
            model: &model,
            pool: &pool,
            sentences: &sentences,
            config,
            seed: derive_seed(run_seed, &[purpose::STRATEGY, config.strategy.tag(), iteration as u64]),
        }
        .select(k)
        .map_err(wrap)?;
        let batch: Vec<usize> = picked.iter().map(|s| s.id).collect();
        let ys = oracle.query(&batch).map_err(wrap)?;
        pool.label(&batch).map_err(wrap)?;
        labels.extend(batch.iter().copied().zip(ys));
        selections.extend(picked.iter().enumerate().map(|(r, s)| SelectionRecord {
            iteration,
            rank: r + 1,
            sample: s.id,
            score: s.score,
        }));

        fit(&mut model, &sentences, &labels, &train_cfg(iteration)).map_err(wrap)?;
        points.push(CurvePoint {
            iteration,
            labeled_fraction: pool.labeled().len() as f64 / n as f64,
            accuracy: evaluate(&model, &parts.test).map_err(wrap)?,
        });
    }

    Ok(RunOutcome {
        run,
        strategy: config.strategy,
        curve: LearningCurve::from_points(points)?,
        selections,
        train_size: n,
        budget: k,
        label_queries: oracle.queries(),
    })
}

/// All runs of `config`, in parallel, ordered by run index.
pub fn run_experiment(dataset: &Dataset, config: &ExperimentConfig) -> Result<Vec<RunOutcome>> {
    config.validate()?;
    (0..config.runs)
        .into_par_iter()
        .map(|run| run_active_learning(dataset, config, run))
        .collect()
}
