//! Naive reference implementations. Each one recomputes everything from
//! scratch at every step and shares no code with the library beyond the
//! random generator.

use alden::rng::{purpose, rng_for};
use rand::Rng;

fn sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// A sentence as `(token, interpretation)` pairs.
pub type ToySentence = Vec<(usize, f64)>;

/// Greedy interpretation-diversity selection, recomputed in full per pick.
/// `sentences[i]` has id `i`; `labeled` are the initial labeled ids.
pub fn alden_naive(sentences: &[ToySentence], embeddings: &[Vec<f64>], labeled: &[usize], k: usize) -> Vec<usize> {
    let mut l: Vec<usize> = labeled.to_vec();
    let mut picks = Vec::new();
    for _ in 0..k {
        let mut vocab: Vec<usize> = l.iter().flat_map(|&i| sentences[i].iter().map(|w| w.0)).collect();
        vocab.sort_unstable();
        vocab.dedup();
        let mut best: Option<(usize, f64)> = None;
        for u in 0..sentences.len() {
            if l.contains(&u) {
                continue;
            }
            let mut d_sample = f64::NEG_INFINITY;
            for &(tok, val) in &sentences[u] {
                let neighbor = if vocab.contains(&tok) {
                    tok
                } else {
                    let mut nb = vocab[0];
                    for &t in &vocab[1..] {
                        if sq(&embeddings[tok], &embeddings[t]) < sq(&embeddings[tok], &embeddings[nb]) {
                            nb = t;
                        }
                    }
                    nb
                };
                let mut d_word = f64::INFINITY;
                for &m in &l {
                    for &(t, v) in &sentences[m] {
                        if t == neighbor {
                            d_word = d_word.min((val - v).abs());
                        }
                    }
                }
                d_sample = d_sample.max(d_word);
            }
            if best.is_none_or(|(_, b)| d_sample > b) {
                best = Some((u, d_sample));
            }
        }
        let (u, _) = best.unwrap();
        picks.push(u);
        l.push(u);
    }
    picks
}

/// Greedy k-center over `reps[i]` (id `i`).
pub fn coreset_naive(reps: &[Vec<f64>], labeled: &[usize], k: usize) -> Vec<usize> {
    let mut l: Vec<usize> = labeled.to_vec();
    let mut picks = Vec::new();
    for _ in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for u in 0..reps.len() {
            if l.contains(&u) {
                continue;
            }
            let d = l.iter().map(|&m| sq(&reps[u], &reps[m]).sqrt()).fold(f64::INFINITY, f64::min);
            if best.is_none_or(|(_, b)| d > b) {
                best = Some((u, d));
            }
        }
        picks.push(best.unwrap().0);
        l.push(best.unwrap().0);
    }
    picks
}

/// k-means++ then Lloyd, following the documented sampling rule: first
/// center uniform via `gen_range`, then `r = u * total` with `u` from
/// `gen::<f64>()` and the first index whose running D^2 sum exceeds `r`.
pub fn kmeans_naive(points: &[Vec<f64>], k: usize, seed: u64, max_iters: usize) -> Vec<usize> {
    let n = points.len();
    let mut rng = rng_for(seed, &[purpose::KMEANS]);
    let mut chosen = vec![rng.gen_range(0..n)];
    while chosen.len() < k {
        let d2: Vec<f64> = (0..n)
            .map(|i| chosen.iter().map(|&c| sq(&points[i], &points[c])).fold(f64::INFINITY, f64::min))
            .collect();
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let r = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    acc += w;
                    pick = Some(i);
                    if acc > r {
                        break;
                    }
                }
            }
            pick.unwrap()
        } else {
            (0..n).find(|i| !chosen.contains(i)).unwrap()
        };
        chosen.push(next);
    }
    let mut centers: Vec<Vec<f64>> = chosen.iter().map(|&c| points[c].clone()).collect();
    let mut assign = vec![usize::MAX; n];
    for it in 1..=max_iters.max(1) {
        let mut changed = false;
        let mut dist = vec![0.0; n];
        for i in 0..n {
            let mut best = (0, f64::INFINITY);
            for (c, center) in centers.iter().enumerate() {
                let d = sq(&points[i], center);
                if d < best.1 {
                    best = (c, d);
                }
            }
            changed |= assign[i] != best.0;
            assign[i] = best.0;
            dist[i] = best.1;
        }
        if !changed || it == max_iters.max(1) {
            break;
        }
        let mut used = vec![false; n];
        for c in 0..k {
            let members: Vec<usize> = (0..n).filter(|&i| assign[i] == c).collect();
            if members.is_empty() {
                let mut far: Option<usize> = None;
                for i in 0..n {
                    if !used[i] && far.is_none_or(|f| dist[i] > dist[f]) {
                        far = Some(i);
                    }
                }
                used[far.unwrap()] = true;
                centers[c] = points[far.unwrap()].clone();
            } else {
                let dim = points[0].len();
                centers[c] = (0..dim)
                    .map(|j| members.iter().map(|&i| points[i][j]).sum::<f64>() / members.len() as f64)
                    .collect();
            }
        }
    }
    assign
}
