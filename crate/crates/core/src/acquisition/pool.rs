use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Labeled and unlabeled sample ids. The two sets are disjoint and their
/// union never changes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoolState {
    labeled: BTreeSet<usize>,
    unlabeled: BTreeSet<usize>,
}

impl PoolState {
    pub fn new(labeled: impl IntoIterator<Item = usize>, unlabeled: impl IntoIterator<Item = usize>) -> Result<Self> {
        let labeled: BTreeSet<usize> = labeled.into_iter().collect();
        let mut u = BTreeSet::new();
        for id in unlabeled {
            if labeled.contains(&id) {
                return Err(Error::AlreadyLabeled(id));
            }
            u.insert(id);
        }
        Ok(Self { labeled, unlabeled: u })
    }

    pub fn labeled(&self) -> &BTreeSet<usize> {
        &self.labeled
    }

    pub fn unlabeled(&self) -> &BTreeSet<usize> {
        &self.unlabeled
    }

    pub fn is_labeled(&self, id: usize) -> bool {
        self.labeled.contains(&id)
    }

    pub fn len(&self) -> usize {
        self.labeled.len() + self.unlabeled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Moves `ids` from U to L.
    pub fn label(&mut self, ids: &[usize]) -> Result<()> {
        for &id in ids {
            if self.labeled.contains(&id) {
                return Err(Error::AlreadyLabeled(id));
            }
            if !self.unlabeled.contains(&id) {
                return Err(Error::UnknownSample(id));
            }
        }
        for &id in ids {
            self.unlabeled.remove(&id);
            self.labeled.insert(id);
        }
        Ok(())
    }

    pub(crate) fn check_budget(&self, k: usize) -> Result<()> {
        if k > self.unlabeled.len() {
            return Err(Error::Budget {
                requested: k,
                available: self.unlabeled.len(),
            });
        }
        Ok(())
    }
}

/// A selected sample and the score it was selected with.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Selection {
    pub id: usize,
    pub score: f64,
}

/// The `k` highest scores; ties go to the smaller id.
pub fn top_k(mut scores: Vec<Selection>, k: usize) -> Result<Vec<Selection>> {
    if let Some(bad) = scores.iter().find(|s| !s.score.is_finite()) {
        return Err(Error::NonFinite(format!("score of sample {} is {}", bad.id, bad.score)));
    }
    if k > scores.len() {
        return Err(Error::Budget {
            requested: k,
            available: scores.len(),
        });
    }
    scores.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.id.cmp(&b.id)));
    scores.truncate(k);
    Ok(scores)
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
