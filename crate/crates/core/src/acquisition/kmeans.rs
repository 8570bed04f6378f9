use rand::Rng as _;

use super::pool::sq_dist;
use crate::error::{Error, Result};
use crate::rng::{purpose, rng_for, Rng};

/// Draws an index with probability proportional to `weights`: with
/// `r = u * total` for `u` uniform in `[0, 1)`, the first index whose
/// running sum exceeds `r`. Zero-weight entries are never returned; `None`
/// when all weights are zero.
pub fn weighted_pick(weights: &[f64], rng: &mut Rng) -> Option<usize> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let r = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = None;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last_positive = Some(i);
        if acc > r {
            return Some(i);
        }
    }
    // rounding can leave `acc` a hair below `r`
    last_positive
}

/// k-means++ seeding. The first center is `first` or uniform; each further
/// center is drawn with probability proportional to its squared distance to
/// the nearest chosen center. If every remaining point coincides with a
/// center, the lowest unchosen index is taken. Returns `(index, D^2 at pick)`.
pub fn kmeans_pp(points: &[&[f64]], k: usize, first: Option<usize>, rng: &mut Rng) -> Result<Vec<(usize, f64)>> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(Error::Config(format!("cannot seed {k} centers from {n} points")));
    }
    let first = match first {
        Some(f) if f < n => f,
        Some(f) => return Err(Error::UnknownSample(f)),
        None => rng.gen_range(0..n),
    };
    let mut chosen = vec![(first, 0.0)];
    let mut taken = vec![false; n];
    taken[first] = true;
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, points[first])).collect();
    d2[first] = 0.0;
    while chosen.len() < k {
        let next = weighted_pick(&d2, rng)
            .filter(|&i| !taken[i])
            .unwrap_or_else(|| (0..n).find(|&i| !taken[i]).expect("k <= n"));
        chosen.push((next, d2[next]));
        taken[next] = true;
        for (i, p) in points.iter().enumerate() {
            let d = sq_dist(p, points[next]);
            if d < d2[i] {
                d2[i] = d;
            }
        }
        d2[next] = 0.0;
    }
    Ok(chosen)
}

#[derive(Clone, Debug, PartialEq)]
pub struct KMeansResult {
    pub assignments: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    pub inertia: f64,
    /// Inertia after every assignment step.
    pub inertia_history: Vec<f64>,
    pub iterations: usize,
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = sq_dist(p, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Lloyd's algorithm from a k-means++ start. Stops when assignments stop
/// changing or after `max_iters` assignment steps. A cluster left empty is
/// re-seeded at the point farthest from its own center.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, max_iters: usize) -> Result<KMeansResult> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(Error::Config(format!("k = {k} must lie in 1..={n}")));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::Input("points differ in dimension".into()));
    }
    let mut rng = rng_for(seed, &[purpose::KMEANS]);
    let refs: Vec<&[f64]> = points.iter().map(Vec::as_slice).collect();
    let mut centers: Vec<Vec<f64>> = kmeans_pp(&refs, k, None, &mut rng)?
        .into_iter()
        .map(|(i, _)| points[i].clone())
        .collect();
    let mut assignments = vec![usize::MAX; n];
    let mut history = Vec::new();
    let mut iterations = 0;
    while iterations < max_iters.max(1) {
        iterations += 1;
        let mut changed = false;
        let mut inertia = 0.0;
        let mut dists = vec![0.0; n];
        for (i, p) in points.iter().enumerate() {
            let (c, d) = nearest(p, &centers);
            if assignments[i] != c {
                assignments[i] = c;
                changed = true;
            }
            dists[i] = d;
            inertia += d;
        }
        history.push(inertia);
        if !changed || iterations == max_iters.max(1) {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &c) in points.iter().zip(&assignments) {
            counts[c] += 1;
            for (s, v) in sums[c].iter_mut().zip(p) {
                *s += v;
            }
        }
        let mut used = vec![false; n];
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            } else {
                let mut far = None;
                for i in 0..n {
                    if !used[i] && far.is_none_or(|f: usize| dists[i] > dists[f]) {
                        far = Some(i);
                    }
                }
                let f = far.expect("k <= n");
                used[f] = true;
                centers[c] = points[f].clone();
            }
        }
    }
    let inertia = *history.last().expect("at least one step");
    Ok(KMeansResult {
        assignments,
        centers,
        inertia,
        inertia_history: history,
        iterations,
    })
}
