//! A generated polarity corpus for tests and examples.
//!
//! Sentences mix neutral filler words with a few polarity words; the word
//! `not` flips the polarity of the polar word that follows it, and a small
//! fraction of labels is flipped at random. The result is learnable but not
//! linearly trivial, which is enough to exercise every acquisition strategy
//! end to end without shipping a real dataset.

use rand::Rng as _;

use super::corpus::{corpus_from_texts, Corpus};
use crate::error::Result;
use crate::rng::rng_for;

#[derive(Clone, Debug)]
pub struct ToyCorpusConfig {
    pub sentences: usize,
    pub polar_words: usize,
    pub neutral_words: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub negation_rate: f64,
    pub label_noise: f64,
    pub seed: u64,
}

impl Default for ToyCorpusConfig {
    fn default() -> Self {
        Self {
            sentences: 1000,
            polar_words: 40,
            neutral_words: 600,
            min_len: 5,
            max_len: 14,
            negation_rate: 0.2,
            label_noise: 0.05,
            seed: 0,
        }
    }
}

/// `(label, text)` pairs.
pub fn toy_texts(cfg: &ToyCorpusConfig) -> Vec<(u8, String)> {
    let mut rng = rng_for(cfg.seed, &[0x70]);
    let mut out = Vec::with_capacity(cfg.sentences);
    while out.len() < cfg.sentences {
        let len = rng.gen_range(cfg.min_len..=cfg.max_len);
        // a negation stays glued to the polar word it flips
        let mut units: Vec<String> = Vec::with_capacity(len);
        let mut count = 0;
        let mut score: i32 = 0;
        let polar = rng.gen_range(1..=3usize);
        for _ in 0..polar {
            let positive = rng.gen_bool(0.5);
            let idx = rng.gen_range(0..cfg.polar_words);
            let negated = rng.gen_bool(cfg.negation_rate);
            let word = format!("{}{idx}", if positive { "pos" } else { "neg" });
            units.push(if negated { format!("not {word}") } else { word });
            count += 1 + usize::from(negated);
            score += if positive != negated { 1 } else { -1 };
        }
        while count < len {
            // Zipf-like filler distribution
            let r: f64 = rng.gen();
            let idx = ((cfg.neutral_words as f64).powf(r) as usize).saturating_sub(1);
            let at = rng.gen_range(0..=units.len());
            units.insert(at, format!("w{idx}"));
            count += 1;
        }
        if score == 0 {
            continue;
        }
        let mut label = u8::from(score > 0);
        if rng.gen_bool(cfg.label_noise) {
            label ^= 1;
        }
        out.push((label, units.join(" ")));
    }
    out
}

pub fn toy_corpus(cfg: &ToyCorpusConfig) -> Result<Corpus> {
    let texts = toy_texts(cfg);
    corpus_from_texts(texts.iter().map(|(l, t)| (Some(*l), t.as_str())))
}

/// The corpus in `label<TAB>text` form.
pub fn toy_tsv(cfg: &ToyCorpusConfig) -> String {
    toy_texts(cfg)
        .into_iter()
        .map(|(l, t)| format!("{l}\t{t}\n"))
        .collect()
}
