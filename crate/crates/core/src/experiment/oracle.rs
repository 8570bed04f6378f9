use std::collections::{HashMap, HashSet};

use crate::data::Sentence;
use crate::error::{Error, Result};

/// Holds the true labels of the training split. Strategies only ever see
/// label-stripped sentences; labels leave through [`Oracle::seed`] (the
/// initial labeled set) or [`Oracle::query`] (everything after), and every
/// query is counted.
#[derive(Debug)]
pub struct Oracle {
    labels: HashMap<usize, u8>,
    revealed: HashSet<usize>,
    queries: usize,
    seeded: usize,
}

impl Oracle {
    /// Takes ownership of the labels and returns the sentences without them.
    pub fn new(sentences: &[Sentence]) -> Result<(Oracle, Vec<Sentence>)> {
        let mut labels = HashMap::with_capacity(sentences.len());
        for s in sentences {
            let y = s
                .label
                .ok_or_else(|| Error::Input(format!("training sentence {} has no label", s.id)))?;
            labels.insert(s.id, y);
        }
        let stripped = sentences.iter().map(Sentence::unlabeled).collect();
        Ok((
            Oracle {
                labels,
                revealed: HashSet::new(),
                queries: 0,
                seeded: 0,
            },
            stripped,
        ))
    }

    fn reveal(&mut self, ids: &[usize]) -> Result<Vec<u8>> {
        let mut seen = HashSet::new();
        for &id in ids {
            if !self.labels.contains_key(&id) {
                return Err(Error::UnknownSample(id));
            }
            if self.revealed.contains(&id) || !seen.insert(id) {
                return Err(Error::AlreadyLabeled(id));
            }
        }
        self.revealed.extend(ids);
        Ok(ids.iter().map(|id| self.labels[id]).collect())
    }

    /// Labels of the initial labeled set; not counted as queries.
    pub fn seed(&mut self, ids: &[usize]) -> Result<Vec<u8>> {
        let out = self.reveal(ids)?;
        self.seeded += ids.len();
        Ok(out)
    }

    /// Labels for samples moving from U to L.
    pub fn query(&mut self, ids: &[usize]) -> Result<Vec<u8>> {
        let out = self.reveal(ids)?;
        self.queries += ids.len();
        Ok(out)
    }

    pub fn queries(&self) -> usize {
        self.queries
    }

    pub fn seeded(&self) -> usize {
        self.seeded
    }
}
