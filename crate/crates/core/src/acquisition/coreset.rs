use std::collections::HashMap;

use super::pool::{sq_dist, PoolState, Selection};
use crate::error::{Error, Result};

/// Greedy k-center: repeatedly take the unlabeled point farthest from its
/// nearest labeled (or already selected) point. Scores are those
/// distances. Ties go to the smaller id.
pub fn coreset_select(pool: &PoolState, representations: &HashMap<usize, Vec<f64>>, k: usize) -> Result<Vec<Selection>> {
    pool.check_budget(k)?;
    if pool.labeled().is_empty() {
        return Err(Error::EmptyLabeled);
    }
    let rep = |id: &usize| {
        representations
            .get(id)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Input(format!("no representation for sample {id}")))
    };
    let candidates: Vec<usize> = pool.unlabeled().iter().copied().collect();
    let cand_reps: Vec<&[f64]> = candidates.iter().map(rep).collect::<Result<_>>()?;
    let anchors: Vec<&[f64]> = pool.labeled().iter().map(rep).collect::<Result<_>>()?;
    let mut min_d2: Vec<f64> = cand_reps
        .iter()
        .map(|r| anchors.iter().map(|a| sq_dist(r, a)).fold(f64::INFINITY, f64::min))
        .collect();
    let mut taken = vec![false; candidates.len()];
    let mut picks = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<usize> = None;
        for i in 0..candidates.len() {
            if !taken[i] && best.is_none_or(|b| min_d2[i] > min_d2[b]) {
                best = Some(i);
            }
        }
        let b = best.expect("budget checked");
        taken[b] = true;
        picks.push(Selection {
            id: candidates[b],
            score: min_d2[b].sqrt(),
        });
        let center = cand_reps[b];
        for (i, r) in cand_reps.iter().enumerate() {
            let d = sq_dist(r, center);
            if d < min_d2[i] {
                min_d2[i] = d;
            }
        }
    }
    Ok(picks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_fixture() {
        let reps: HashMap<usize, Vec<f64>> = [(0, vec![0.0]), (1, vec![3.0]), (2, vec![10.0])].into();
        let pool = PoolState::new([0], [1, 2]).unwrap();
        let one = coreset_select(&pool, &reps, 1).unwrap();
        assert_eq!(one[0].id, 2);
        assert_eq!(one[0].score, 10.0);
        let two: Vec<usize> = coreset_select(&pool, &reps, 2).unwrap().iter().map(|s| s.id).collect();
        assert_eq!(two, vec![2, 1]);
    }
}
