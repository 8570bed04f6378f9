//! Trains a mean-pool classifier on the generated polarity corpus and
//! prints per-word interpretations for a few sentences.

use alden::data::toy::{toy_corpus, ToyCorpusConfig};
use alden::interpret::{interpret_words, Target};
use alden::models::{accuracy, train, Input, Model, ModelConfig, TrainConfig};

fn main() -> alden::Result<()> {
    let corpus = toy_corpus(&ToyCorpusConfig::default())?;
    let inputs: Vec<Input> = corpus.sentences.iter().map(|s| Input::Tokens(&s.tokens)).collect();
    let labels: Vec<u8> = corpus.sentences.iter().map(|s| s.label.unwrap()).collect();

    let mut model = Model::new(ModelConfig::meanpool(corpus.vocab.len()), 1)?;
    let cfg = TrainConfig {
        lr: 0.5,
        seed: 1,
        ..TrainConfig::default()
    };
    train(&mut model, &inputs, &labels, &cfg)?;
    println!("training accuracy {:.3}", accuracy(&model, &inputs, &labels)?);

    for s in corpus.sentences.iter().take(4) {
        let interp = interpret_words(&model, s, Target::Logit, false)?;
        println!("\nlabel {} logit {:+.3}", s.label.unwrap(), interp.output);
        for w in &interp.words {
            println!("  {:>8} {:+.4}", corpus.vocab.word(w.token).unwrap_or("?"), w.value);
        }
    }
    Ok(())
}
