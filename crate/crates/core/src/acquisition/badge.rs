use std::collections::HashMap;

use rand::SeedableRng;

use super::kmeans::kmeans_pp;
use super::pool::{PoolState, Selection};
use crate::autodiff::sigmoid;
use crate::error::{Error, Result};
use crate::models::{Input, Model};
use crate::rng::Rng;

/// Gradient of the cross-entropy at the model's own hard prediction with
/// respect to the output-layer weights: `(p - y_hat) * features`.
pub fn badge_embedding(model: &Model, input: Input<'_>) -> Result<Vec<f64>> {
    let features = model.representation(input)?;
    let p = sigmoid(model.logit_from_features(&features, None)?);
    let pseudo = if p >= 0.5 { 1.0 } else { 0.0 };
    Ok(features.iter().map(|h| (p - pseudo) * h).collect())
}

/// k-means++ seeding over the gradient embeddings of the unlabeled pool
/// (ids in ascending order); the seeds are the selection. Scores are the
/// squared distances at pick time (0 for the first seed).
pub fn badge_select(pool: &PoolState, embeddings: &HashMap<usize, Vec<f64>>, k: usize, seed: u64) -> Result<Vec<Selection>> {
    badge_select_from(pool, embeddings, k, seed, None)
}

/// As [`badge_select`], optionally forcing the first seed to the unlabeled
/// sample with id `first`.
pub fn badge_select_from(
    pool: &PoolState,
    embeddings: &HashMap<usize, Vec<f64>>,
    k: usize,
    seed: u64,
    first: Option<usize>,
) -> Result<Vec<Selection>> {
    pool.check_budget(k)?;
    if k == 0 {
        return Ok(Vec::new());
    }
    let ids: Vec<usize> = pool.unlabeled().iter().copied().collect();
    let points: Vec<&[f64]> = ids
        .iter()
        .map(|id| {
            embeddings
                .get(id)
                .map(Vec::as_slice)
                .ok_or_else(|| Error::Input(format!("no gradient embedding for sample {id}")))
        })
        .collect::<Result<_>>()?;
    let first = match first {
        Some(id) => Some(ids.iter().position(|&i| i == id).ok_or(Error::UnknownSample(id))?),
        None => None,
    };
    let mut rng = Rng::seed_from_u64(seed);
    Ok(kmeans_pp(&points, k, first, &mut rng)?
        .into_iter()
        .map(|(i, d2)| Selection { id: ids[i], score: d2 })
        .collect())
}
