use std::fmt;

use rayon::prelude::*;

use super::metrics::adjusted_rand_index;
use crate::acquisition::{badge_embedding, kmeans};
use crate::data::generate_synthetic;
use crate::error::{Error, Result};
use crate::interpret::{interpret_sample, Target};
use crate::models::{train, Input, Model, ModelConfig, TrainConfig};
use crate::rng::{derive_seed, purpose};

/// What each synthetic point is represented by before clustering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Representation {
    /// Gradient of the logit with respect to the input.
    Interpretation,
    /// Last hidden layer.
    Coreset,
    /// Output-layer loss gradient at the predicted label.
    Badge,
}

impl Representation {
    pub const ALL: [Representation; 3] = [Representation::Interpretation, Representation::Coreset, Representation::Badge];

    pub fn name(self) -> &'static str {
        match self {
            Representation::Interpretation => "interpretation",
            Representation::Coreset => "coreset",
            Representation::Badge => "badge",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Figure1Config {
    pub n: usize,
    pub seed: u64,
    pub clusters: usize,
    pub model: ModelConfig,
    /// `seed` is replaced by one derived from the experiment seed.
    pub train: TrainConfig,
    pub kmeans_iters: usize,
}

impl Figure1Config {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            seed,
            clusters: 4,
            model: ModelConfig::mlp2d(),
            train: TrainConfig {
                lr: 0.01,
                epochs: 30,
                batch: 32,
                seed: 0,
                reinit: true,
            },
            kmeans_iters: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Figure1Report {
    pub seed: u64,
    /// ARI against the true regions, in [`Representation::ALL`] order.
    pub ari: [f64; 3],
    pub train_accuracy: f64,
}

impl Figure1Report {
    pub fn get(&self, r: Representation) -> f64 {
        self.ari[r as usize]
    }
}

/// Trains the 2-D classifier on synthetic points, clusters three
/// representations of every point with k-means and scores each clustering
/// against the triangle regions.
pub fn figure1_experiment(cfg: &Figure1Config) -> Result<Figure1Report> {
    if cfg.n == 0 {
        return Err(Error::Config("point count must be positive".into()));
    }
    if cfg.clusters == 0 || cfg.clusters > cfg.n {
        return Err(Error::Config(format!("cannot form {} clusters from {} points", cfg.clusters, cfg.n)));
    }
    let points = generate_synthetic(cfg.n, cfg.seed)?;
    let inputs: Vec<Input<'_>> = points.iter().map(|p| Input::Point(&p.x)).collect();
    let labels: Vec<u8> = points.iter().map(|p| p.label).collect();
    let truth: Vec<usize> = points.iter().map(|p| p.region.index()).collect();

    let mut model = Model::new(cfg.model.clone(), derive_seed(cfg.seed, &[purpose::INIT]))?;
    let train_cfg = TrainConfig {
        seed: derive_seed(cfg.seed, &[purpose::TRAIN]),
        ..cfg.train.clone()
    };
    train(&mut model, &inputs, &labels, &train_cfg)?;
    let train_accuracy = crate::models::accuracy(&model, &inputs, &labels)?;

    let mut ari = [0.0; 3];
    for r in Representation::ALL {
        let reps: Vec<Vec<f64>> = points
            .par_iter()
            .enumerate()
            .map(|(i, p)| match r {
                Representation::Interpretation => Ok(interpret_sample(&model, i, &p.x, Target::Logit)?.values),
                Representation::Coreset => model.representation(Input::Point(&p.x)),
                Representation::Badge => badge_embedding(&model, Input::Point(&p.x)),
            })
            .collect::<Result<_>>()?;
        let clusters = kmeans(&reps, cfg.clusters, derive_seed(cfg.seed, &[purpose::KMEANS, r as u64]), cfg.kmeans_iters)?;
        ari[r as usize] = adjusted_rand_index(&clusters.assignments, &truth)?;
    }
    Ok(Figure1Report {
        seed: cfg.seed,
        ari,
        train_accuracy,
    })
}
