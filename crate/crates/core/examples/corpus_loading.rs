//! Loads a labeled corpus and shows its vocabulary and default split.
//!
//! cargo run --example corpus_loading -- data.tsv
//! cargo run --example corpus_loading -- rt-polarity.pos,rt-polarity.neg

use std::path::PathBuf;

use alden::data::toy::{toy_tsv, ToyCorpusConfig};
use alden::data::{load_corpus, split, CorpusSource, DEFAULT_RATIOS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let source = match std::env::args().nth(1) {
        Some(arg) => {
            let p = PathBuf::from(&arg);
            CorpusSource::resolve(&p, arg.ends_with(".tsv"))?
        }
        None => {
            let p = dir.path().join("toy.tsv");
            std::fs::write(&p, toy_tsv(&ToyCorpusConfig::default()))?;
            CorpusSource::Tsv(p)
        }
    };
    let corpus = load_corpus(&source)?;
    println!("{} sentences, {} vocabulary entries", corpus.sentences.len(), corpus.vocab.len());
    let first = &corpus.sentences[0];
    println!("first sentence: {:?} -> {:?}", corpus.vocab.decode(&first.tokens), first.tokens);

    let s = split(&corpus.sentences, DEFAULT_RATIOS, 0)?;
    println!("split: {} train, {} validation, {} test", s.train.len(), s.validation.len(), s.test.len());
    Ok(())
}
