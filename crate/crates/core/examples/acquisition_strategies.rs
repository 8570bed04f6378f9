//! One acquisition step of every strategy on the same trained model and
//! pool, printing the selected batch.

use std::collections::HashMap;

use alden::acquisition::{
    alden_select, badge_embedding, badge_select, bald_score, coreset_select, egl_word_score, random_select, top_k,
    PoolState, Selection,
};
use alden::data::toy::{toy_corpus, ToyCorpusConfig};
use alden::interpret::{interpret_words, Target, WordMode};
use alden::models::{train, Input, Model, ModelConfig, TrainConfig};

fn show(name: &str, picks: &[Selection]) {
    let ids: Vec<String> = picks.iter().map(|s| format!("{}({:.3})", s.id, s.score)).collect();
    println!("{name:>8}: {}", ids.join(" "));
}

fn main() -> alden::Result<()> {
    let corpus = toy_corpus(&ToyCorpusConfig {
        sentences: 400,
        ..Default::default()
    })?;
    let sentences = &corpus.sentences;
    let pool = PoolState::new(0..20, 20..sentences.len())?;
    let k = 5;

    let mut model = Model::new(ModelConfig::meanpool(corpus.vocab.len()), 0)?;
    let labeled: Vec<Input> = pool.labeled().iter().map(|&i| Input::Tokens(&sentences[i].tokens)).collect();
    let labels: Vec<u8> = pool.labeled().iter().map(|&i| sentences[i].label.unwrap()).collect();
    train(&mut model, &labeled, &labels, &TrainConfig { lr: 0.5, ..TrainConfig::default() })?;

    show("rnd", &random_select(&pool, k, 7)?);

    let interps = sentences
        .iter()
        .map(|s| interpret_words(&model, s, Target::Logit, false))
        .collect::<alden::Result<Vec<_>>>()?;
    show("alden", &alden_select(&pool, &interps, model.embeddings().unwrap(), WordMode::Scalar, k)?);

    let score = |f: &dyn Fn(&[usize]) -> alden::Result<f64>| -> alden::Result<Vec<Selection>> {
        let scores = pool
            .unlabeled()
            .iter()
            .map(|&id| Ok(Selection { id, score: f(&sentences[id].tokens)? }))
            .collect::<alden::Result<Vec<_>>>()?;
        top_k(scores, k)
    };
    show("egl", &score(&|t| egl_word_score(&model, t))?);
    show("bald", &score(&|t| bald_score(&model, t, 20, 7))?);

    let reps: HashMap<usize, Vec<f64>> = (0..sentences.len())
        .map(|i| Ok((i, model.representation(Input::Tokens(&sentences[i].tokens))?)))
        .collect::<alden::Result<_>>()?;
    show("coreset", &coreset_select(&pool, &reps, k)?);

    let grads: HashMap<usize, Vec<f64>> = pool
        .unlabeled()
        .iter()
        .map(|&i| Ok((i, badge_embedding(&model, Input::Tokens(&sentences[i].tokens))?)))
        .collect::<alden::Result<_>>()?;
    show("badge", &badge_select(&pool, &grads, k, 7)?);
    Ok(())
}
