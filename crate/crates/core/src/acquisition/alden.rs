//! Selection by diversity of word-level interpretations.
//!
//! A candidate word occurrence is compared with the labeled occurrences of
//! its *neighbor word*: the word itself when it already occurs in the
//! labeled set, otherwise the labeled word whose embedding is closest. Its
//! diversity is the smallest interpretation distance to those occurrences;
//! a sentence's diversity is the largest diversity among its words. The
//! selector greedily takes the most diverse sentence, adds it to the labeled
//! index and repeats, all under one fixed set of interpretations.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::pool::{sq_dist, PoolState, Selection};
use crate::autodiff::Tensor;
use crate::error::{Error, Result};
use crate::interpret::{SentenceInterpretation, WordMode};

#[derive(Clone, Debug, PartialEq)]
struct Word {
    position: usize,
    token: usize,
    signature: Vec<f64>,
}

/// Distance between two interpretation signatures.
pub fn interpretation_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() == 1 && b.len() == 1 {
        (a[0] - b[0]).abs()
    } else {
        sq_dist(a, b).sqrt()
    }
}

/// Labeled-set view used to score unlabeled sentences.
///
/// Holds every sentence's word interpretations (computed once, under one
/// model version) and an index from token id to its labeled occurrences.
#[derive(Clone, Debug)]
pub struct DiversityIndex<'a> {
    embeddings: &'a Tensor,
    words: HashMap<usize, Vec<Word>>,
    labeled: BTreeSet<usize>,
    occurrences: BTreeMap<usize, Vec<(usize, usize)>>,
}

impl<'a> DiversityIndex<'a> {
    pub fn new(
        pool: &PoolState,
        interpretations: &[SentenceInterpretation],
        embeddings: &'a Tensor,
        mode: WordMode,
    ) -> Result<Self> {
        if let Some(first) = interpretations.first() {
            if let Some(stale) = interpretations.iter().find(|s| s.version != first.version) {
                return Err(Error::Input(format!(
                    "interpretations mix model versions {} and {} (sample {})",
                    first.version, stale.version, stale.sample
                )));
            }
        }
        let mut words = HashMap::with_capacity(interpretations.len());
        for s in interpretations {
            let ws: Vec<Word> = s
                .words
                .iter()
                .map(|w| Word {
                    position: w.position,
                    token: w.token,
                    signature: w.signature(mode),
                })
                .collect();
            if let Some(w) = ws.iter().find(|w| w.token >= embeddings.rows()) {
                return Err(Error::Input(format!("token {} has no embedding row", w.token)));
            }
            words.insert(s.sample, ws);
        }
        for id in pool.labeled().iter().chain(pool.unlabeled()) {
            match words.get(id) {
                None => return Err(Error::Input(format!("no interpretation for sample {id}"))),
                Some(ws) if ws.is_empty() => {
                    return Err(Error::Input(format!("sample {id} has no non-PAD words")))
                }
                Some(_) => {}
            }
        }
        let mut index = Self {
            embeddings,
            words,
            labeled: BTreeSet::new(),
            occurrences: BTreeMap::new(),
        };
        for &id in pool.labeled() {
            index.insert(id)?;
        }
        Ok(index)
    }

    /// Adds a sample's word occurrences to the labeled index.
    pub fn insert(&mut self, sample: usize) -> Result<()> {
        let ws = self.words.get(&sample).ok_or(Error::UnknownSample(sample))?;
        if !self.labeled.insert(sample) {
            return Err(Error::AlreadyLabeled(sample));
        }
        for (k, w) in ws.iter().enumerate() {
            self.occurrences.entry(w.token).or_default().push((sample, k));
        }
        Ok(())
    }

    pub fn labeled_vocabulary(&self) -> impl Iterator<Item = usize> + '_ {
        self.occurrences.keys().copied()
    }

    fn embedding_sq_dist(&self, a: usize, b: usize) -> f64 {
        sq_dist(self.embeddings.row(a), self.embeddings.row(b))
    }

    /// The labeled word a token is compared against: itself if labeled,
    /// else the labeled token with the nearest embedding (smaller id on ties).
    pub fn neighbor(&self, token: usize) -> Result<usize> {
        if self.occurrences.contains_key(&token) {
            return Ok(token);
        }
        let mut best: Option<(usize, f64)> = None;
        for &t in self.occurrences.keys() {
            let d = self.embedding_sq_dist(token, t);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((t, d));
            }
        }
        best.map(|(t, _)| t).ok_or(Error::EmptyLabeled)
    }

    fn word(&self, sample: usize, k: usize) -> &Word {
        &self.words[&sample][k]
    }

    /// Smallest interpretation distance from `signature` to a labeled
    /// occurrence of `neighbor`.
    fn min_distance(&self, signature: &[f64], neighbor: usize) -> f64 {
        self.occurrences[&neighbor]
            .iter()
            .map(|&(m, w)| interpretation_distance(signature, &self.word(m, w).signature))
            .fold(f64::INFINITY, f64::min)
    }

    /// Diversity of the word at `position` of `sample`.
    pub fn word_diversity(&self, sample: usize, position: usize) -> Result<f64> {
        let ws = self.words.get(&sample).ok_or(Error::UnknownSample(sample))?;
        let w = ws
            .iter()
            .find(|w| w.position == position)
            .ok_or_else(|| Error::Input(format!("sample {sample} has no word at position {position}")))?;
        let n = self.neighbor(w.token)?;
        Ok(self.min_distance(&w.signature, n))
    }

    /// Largest word diversity in `sample`.
    pub fn sample_diversity(&self, sample: usize) -> Result<f64> {
        let ws = self.words.get(&sample).ok_or(Error::UnknownSample(sample))?;
        if ws.is_empty() {
            return Err(Error::Input(format!("sample {sample} has no non-PAD words")));
        }
        let mut best = f64::NEG_INFINITY;
        for w in ws {
            best = best.max(self.word_diversity(sample, w.position)?);
        }
        Ok(best)
    }
}

/// Greedy selection of `k` sentences by interpretation diversity.
///
/// Equivalent to recomputing every unlabeled sentence's diversity after each
/// pick, but only the words affected by the pick are revisited: words whose
/// neighbor gained occurrences, and words whose neighbor changed because the
/// labeled vocabulary grew.
pub fn alden_select(
    pool: &PoolState,
    interpretations: &[SentenceInterpretation],
    embeddings: &Tensor,
    mode: WordMode,
    k: usize,
) -> Result<Vec<Selection>> {
    pool.check_budget(k)?;
    if pool.labeled().is_empty() {
        return Err(Error::EmptyLabeled);
    }
    let mut index = DiversityIndex::new(pool, interpretations, embeddings, mode)?;

    let mut remaining: BTreeSet<usize> = pool.unlabeled().clone();
    // token -> (neighbor, squared embedding distance)
    let mut nearest: HashMap<usize, (usize, f64)> = HashMap::new();
    // token -> unlabeled occurrences (sample, word slot)
    let mut unlabeled_by_token: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    let mut word_div: HashMap<usize, Vec<f64>> = HashMap::with_capacity(remaining.len());
    let mut sample_div: HashMap<usize, f64> = HashMap::with_capacity(remaining.len());

    for &id in &remaining {
        let ws = &index.words[&id];
        let mut divs = Vec::with_capacity(ws.len());
        for (slot, w) in ws.iter().enumerate() {
            unlabeled_by_token.entry(w.token).or_default().push((id, slot));
            let (n, _) = *match nearest.get(&w.token) {
                Some(hit) => hit,
                None => {
                    let n = index.neighbor(w.token)?;
                    let d = index.embedding_sq_dist(w.token, n);
                    nearest.entry(w.token).or_insert((n, d))
                }
            };
            divs.push(index.min_distance(&w.signature, n));
        }
        sample_div.insert(id, divs.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        word_div.insert(id, divs);
    }

    let mut picks = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for &id in &remaining {
            let d = sample_div[&id];
            if best.is_none_or(|(_, bd)| d > bd) {
                best = Some((id, d));
            }
        }
        let (chosen, score) = best.expect("budget checked");
        picks.push(Selection { id: chosen, score });
        remaining.remove(&chosen);

        let chosen_words = index.words[&chosen].clone();
        let new_tokens: BTreeSet<usize> = chosen_words
            .iter()
            .map(|w| w.token)
            .filter(|t| !index.occurrences.contains_key(t))
            .collect();
        let chosen_tokens: BTreeSet<usize> = chosen_words.iter().map(|w| w.token).collect();
        index.insert(chosen)?;

        let mut touched: BTreeSet<usize> = BTreeSet::new();
        for (&token, occs) in &unlabeled_by_token {
            let (old_n, old_d) = nearest[&token];
            let mut cur = (old_n, old_d);
            if new_tokens.contains(&token) {
                cur = (token, 0.0);
            } else if old_n != token {
                for &t in &new_tokens {
                    let d = index.embedding_sq_dist(token, t);
                    if d < cur.1 || (d == cur.1 && t < cur.0) {
                        cur = (t, d);
                    }
                }
            }
            let changed = cur.0 != old_n;
            if !changed && !chosen_tokens.contains(&old_n) {
                continue;
            }
            nearest.insert(token, cur);
            for &(id, slot) in occs {
                if !remaining.contains(&id) {
                    continue;
                }
                let sig = &index.words[&id][slot].signature;
                let d = if changed {
                    index.min_distance(sig, cur.0)
                } else {
                    let fresh = chosen_words
                        .iter()
                        .filter(|w| w.token == cur.0)
                        .map(|w| interpretation_distance(sig, &w.signature))
                        .fold(f64::INFINITY, f64::min);
                    word_div[&id][slot].min(fresh)
                };
                word_div.get_mut(&id).expect("tracked")[slot] = d;
                touched.insert(id);
            }
        }
        for id in touched {
            let m = word_div[&id].iter().copied().fold(f64::NEG_INFINITY, f64::max);
            sample_div.insert(id, m);
        }
    }
    Ok(picks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpret::WordInterpretation;

    fn sentence(id: usize, words: &[(usize, f64)]) -> SentenceInterpretation {
        SentenceInterpretation {
            sample: id,
            output: 0.0,
            version: 1,
            words: words
                .iter()
                .enumerate()
                .map(|(position, &(token, value))| WordInterpretation {
                    sample: id,
                    position,
                    token,
                    value,
                    contribution: None,
                })
                .collect(),
        }
    }

    fn embeddings(rows: &[[f64; 2]]) -> Tensor {
        Tensor::matrix(rows.len(), 2, rows.iter().flatten().copied().collect()).unwrap()
    }

    #[test]
    fn word_in_labeled_set_uses_its_own_occurrences() {
        let e = embeddings(&[[0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [5.0, 5.0]]);
        let interps = vec![
            sentence(0, &[(2, 0.2)]),
            sentence(1, &[(2, 0.9), (3, 1.0)]),
            sentence(2, &[(2, 0.5)]),
        ];
        let pool = PoolState::new([0, 1], [2]).unwrap();
        let idx = DiversityIndex::new(&pool, &interps, &e, WordMode::Scalar).unwrap();
        assert!((idx.word_diversity(2, 0).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn absent_word_falls_back_to_nearest_embedding() {
        let e = embeddings(&[[0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [5.0, 5.0], [4.0, 4.5]]);
        let interps = vec![sentence(0, &[(2, 3.0), (3, 1.0)]), sentence(1, &[(4, 0.4)])];
        let pool = PoolState::new([0], [1]).unwrap();
        let idx = DiversityIndex::new(&pool, &interps, &e, WordMode::Scalar).unwrap();
        assert_eq!(idx.neighbor(4).unwrap(), 3);
        assert!((idx.word_diversity(1, 0).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn duplicate_is_picked_after_positive_candidates() {
        let e = embeddings(&[[0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [3.0, 3.0]]);
        let interps = vec![
            sentence(0, &[(2, 0.0)]),
            sentence(1, &[(3, 1.0), (4, 2.0)]),
            sentence(2, &[(3, 1.0), (4, 2.0)]),
            sentence(3, &[(2, 0.1)]),
        ];
        let pool = PoolState::new([0], [1, 2, 3]).unwrap();
        let picks = alden_select(&pool, &interps, &e, WordMode::Scalar, 3).unwrap();
        let ids: Vec<usize> = picks.iter().map(|p| p.id).collect();
        assert_eq!(ids, vec![1, 3, 2]);
        assert_eq!(picks[2].score, 0.0);
    }

    #[test]
    fn errors() {
        let e = embeddings(&[[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]);
        let interps = vec![sentence(0, &[(2, 0.0)]), sentence(1, &[(2, 1.0)])];
        let empty_l = PoolState::new([], [0, 1]).unwrap();
        assert!(matches!(
            alden_select(&empty_l, &interps, &e, WordMode::Scalar, 1),
            Err(Error::EmptyLabeled)
        ));
        let pool = PoolState::new([0], [1]).unwrap();
        assert!(matches!(
            alden_select(&pool, &interps, &e, WordMode::Scalar, 2),
            Err(Error::Budget { .. })
        ));
        let mut stale = interps.clone();
        stale[1].version = 2;
        assert!(DiversityIndex::new(&pool, &stale, &e, WordMode::Scalar).is_err());
    }
}
