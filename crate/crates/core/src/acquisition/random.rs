use rand::seq::index;

use super::pool::{PoolState, Selection};
use crate::error::Result;
use crate::rng::Rng;
use rand::SeedableRng;

/// `k` distinct unlabeled ids drawn uniformly without replacement.
pub fn random_select(pool: &PoolState, k: usize, seed: u64) -> Result<Vec<Selection>> {
    pool.check_budget(k)?;
    let ids: Vec<usize> = pool.unlabeled().iter().copied().collect();
    let mut rng = Rng::seed_from_u64(seed);
    Ok(index::sample(&mut rng, ids.len(), k)
        .into_iter()
        .map(|i| Selection { id: ids[i], score: 0.0 })
        .collect())
}
