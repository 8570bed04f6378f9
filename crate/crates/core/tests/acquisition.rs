mod common;

use std::collections::HashMap;

use alden::acquisition::{
    alden_select, badge_select, badge_select_from, bald_from_probabilities, bald_score, bald_score_with,
    coreset_select, egl_word_score, kmeans, random_select, DiversityIndex, PoolState, Selection,
};
use alden::autodiff::{sigmoid, Tensor};
use alden::interpret::WordMode;
use alden::models::{mc_dropout_passes, Input, MaskSource, Model, ModelConfig, ModelKind};
use alden::Error;
use common::oracles;
use common::ToyPool;

fn ids(s: &[Selection]) -> Vec<usize> {
    s.iter().map(|x| x.id).collect()
}

fn as_map(points: &[Vec<f64>]) -> HashMap<usize, Vec<f64>> {
    points.iter().cloned().enumerate().collect()
}

#[test]
fn alden_matches_naive_greedy() {
    for seed in 0..40 {
        let toy = ToyPool::random(seed, 20);
        let got = alden_select(&toy.pool(), &toy.interpretations(), &toy.embedding_tensor(), WordMode::Scalar, 3).unwrap();
        let want = oracles::alden_naive(&toy.sentences, &toy.embeddings, &toy.labeled, 3);
        assert_eq!(ids(&got), want, "seed {seed}");
    }
}

#[test]
fn alden_single_pick_is_argmax_of_sample_diversity() {
    for seed in 0..10 {
        let toy = ToyPool::random(seed, 15);
        let pool = toy.pool();
        let interps = toy.interpretations();
        let emb = toy.embedding_tensor();
        let index = DiversityIndex::new(&pool, &interps, &emb, WordMode::Scalar).unwrap();
        let mut best: Option<(usize, f64)> = None;
        for &u in pool.unlabeled() {
            let d = index.sample_diversity(u).unwrap();
            if best.is_none_or(|(_, b)| d > b) {
                best = Some((u, d));
            }
        }
        let got = alden_select(&pool, &interps, &emb, WordMode::Scalar, 1).unwrap();
        assert_eq!(got[0].id, best.unwrap().0);
        assert_eq!(got[0].score, best.unwrap().1);
    }
}

#[test]
fn alden_word_diversity_shrinks_as_labeled_set_grows() {
    // every token present in the initial labeled set keeps itself as neighbor
    let toy = ToyPool::random(3, 20);
    let pool = toy.pool();
    let interps = toy.interpretations();
    let emb = toy.embedding_tensor();
    let mut index = DiversityIndex::new(&pool, &interps, &emb, WordMode::Scalar).unwrap();
    let labeled_tokens: Vec<usize> = index.labeled_vocabulary().collect();
    let probe: Vec<(usize, usize)> = pool
        .unlabeled()
        .iter()
        .flat_map(|&u| {
            toy.sentences[u]
                .iter()
                .enumerate()
                .filter(|(_, w)| labeled_tokens.contains(&w.0))
                .map(move |(j, _)| (u, j))
        })
        .collect();
    assert!(!probe.is_empty());
    let mut before: Vec<f64> = probe.iter().map(|&(u, j)| index.word_diversity(u, j).unwrap()).collect();
    for &extra in pool.unlabeled().iter().take(6) {
        index.insert(extra).unwrap();
        let now: Vec<f64> = probe.iter().map(|&(u, j)| index.word_diversity(u, j).unwrap()).collect();
        for (a, b) in now.iter().zip(&before) {
            assert!(a <= b);
        }
        before = now;
    }
}

#[test]
fn alden_errors() {
    let toy = ToyPool::random(1, 6);
    let emb = toy.embedding_tensor();
    let pool = toy.pool();
    assert!(matches!(
        alden_select(&pool, &toy.interpretations(), &emb, WordMode::Scalar, 4),
        Err(Error::Budget { .. })
    ));
    let empty = PoolState::new([], 0..6).unwrap();
    assert!(matches!(
        alden_select(&empty, &toy.interpretations(), &emb, WordMode::Scalar, 1),
        Err(Error::EmptyLabeled)
    ));
    let mut stale = toy.interpretations();
    stale[2].version = 2;
    assert!(alden_select(&pool, &stale, &emb, WordMode::Scalar, 1).is_err());
}

#[test]
fn random_selection() {
    let pool = PoolState::new([0], 1..11).unwrap();
    let all = random_select(&pool, 10, 3).unwrap();
    let mut got = ids(&all);
    got.sort_unstable();
    assert_eq!(got, (1..11).collect::<Vec<_>>());
    assert_eq!(random_select(&pool, 4, 8).unwrap(), random_select(&pool, 4, 8).unwrap());

    let mut counts = [0usize; 11];
    let draws = 10_000;
    for s in 0..draws {
        counts[random_select(&pool, 1, s).unwrap()[0].id] += 1;
    }
    let sigma = (0.1f64 * 0.9 / draws as f64).sqrt();
    for &c in &counts[1..] {
        assert!((c as f64 / draws as f64 - 0.1).abs() <= 3.0 * sigma, "{counts:?}");
    }
}

/// `y = w . mean(e)` with no bias.
fn linear_meanpool(seed: u64) -> Model {
    let mut c = ModelConfig::meanpool(8);
    c.hidden_layers = 0;
    c.embedding_dim = 4;
    c.bias = false;
    Model::new(c, seed).unwrap()
}

#[test]
fn egl_one_word_by_hand() {
    let m = linear_meanpool(1);
    let w = m.output_weights().data().to_vec();
    let e = m.embeddings().unwrap().row(3).to_vec();
    let p = sigmoid(w.iter().zip(&e).map(|(a, b)| a * b).sum());
    let norm_w = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    // dCE/de = (p - y) w for a one-word sentence
    let by_hand = (1.0 - p) * (p - 0.0).abs() * norm_w + p * (p - 1.0).abs() * norm_w;
    assert!((egl_word_score(&m, &[3]).unwrap() - by_hand).abs() <= 1e-9);
}

#[test]
fn egl_saturated_and_balanced() {
    let mut m = linear_meanpool(2);
    // scale the output so the logit of token 3 is huge
    let e = m.embeddings().unwrap().row(3).to_vec();
    let scale = 60.0 / e.iter().map(|v| v * v).sum::<f64>();
    m.set_param("out.weight", Tensor::matrix(4, 1, e.iter().map(|v| v * scale).collect()).unwrap())
        .unwrap();
    assert!(1.0 - sigmoid(m.logit(Input::Tokens(&[3])).unwrap()) < 1e-20);
    assert!(egl_word_score(&m, &[3]).unwrap() <= 1e-6);

    // p = 0.5 exactly: orthogonal output weights
    let d = 4;
    let mut table = vec![0.0; 8 * d];
    table[3 * d] = 1.0;
    m.set_param("embedding", Tensor::matrix(8, d, table).unwrap()).unwrap();
    m.set_param("out.weight", Tensor::matrix(4, 1, vec![0.0, 1.5, 0.0, 0.0]).unwrap()).unwrap();
    assert_eq!(m.probability(Input::Tokens(&[3])).unwrap(), 0.5);
    // label-conditional norms are both 0.5 * ||w||
    let mean_of_conditionals = 0.5 * (0.5 * 1.5) + 0.5 * (0.5 * 1.5);
    assert!((egl_word_score(&m, &[3]).unwrap() - mean_of_conditionals).abs() < 1e-12);
}

#[test]
fn bald_properties() {
    let m = common::random_model(ModelKind::Cnn, true, 3);
    let mut r = common::rng(4);
    for s in 0..20 {
        let t = common::random_tokens(&mut r, 30, 1, 8);
        assert_eq!(bald_score_with(&m, &t, 10, s, MaskSource::AllOnes).unwrap(), 0.0);
        let b = bald_score(&m, &t, 20, s).unwrap();
        assert!((0.0..=std::f64::consts::LN_2).contains(&b));
        let passes = mc_dropout_passes(&m, Input::Tokens(&t), 8, s, MaskSource::Random).unwrap();
        assert!((bald_score(&m, &t, 8, s).unwrap() - bald_from_probabilities(&passes)).abs() <= 1e-12);
    }
    let eps = 1e-12;
    let alternating: Vec<f64> = (0..10).map(|i| if i % 2 == 0 { eps } else { 1.0 - eps }).collect();
    assert!((bald_from_probabilities(&alternating) - std::f64::consts::LN_2).abs() < 1e-9);
    let no_dropout = Model::new(ModelConfig::meanpool(30), 0)
        .map(|m| {
            let mut c = m.config().clone();
            c.dropout = 0.0;
            Model::new(c, 0).unwrap()
        })
        .unwrap();
    assert!(bald_score(&no_dropout, &[2, 3], 20, 0).is_err());
}

#[test]
fn coreset_fixtures() {
    let reps = as_map(&[vec![0.0], vec![3.0], vec![10.0]]);
    let pool = PoolState::new([0], [1, 2]).unwrap();
    assert_eq!(ids(&coreset_select(&pool, &reps, 1).unwrap()), vec![2]);
    assert_eq!(ids(&coreset_select(&pool, &reps, 2).unwrap()), vec![2, 1]);
    let empty = PoolState::new([], [0, 1, 2]).unwrap();
    assert!(matches!(coreset_select(&empty, &reps, 1), Err(Error::EmptyLabeled)));
}

#[test]
fn coreset_matches_naive_greedy_and_ignores_isometries() {
    for seed in 0..20 {
        let pts = common::random_points(seed, 20);
        let toy = ToyPool::random(seed, 20);
        let got = coreset_select(&toy.pool(), &as_map(&pts), 3).unwrap();
        assert_eq!(ids(&got), oracles::coreset_naive(&pts, &toy.labeled, 3));

        let (c, s) = (0.6f64, 0.8f64);
        let moved: Vec<Vec<f64>> = pts.iter().map(|p| vec![c * p[0] - s * p[1] + 7.0, s * p[0] + c * p[1] - 2.0]).collect();
        assert_eq!(ids(&coreset_select(&toy.pool(), &as_map(&moved), 3).unwrap()), ids(&got));
    }
}

#[test]
fn badge_fixtures() {
    let pool = PoolState::new([], [0, 1]).unwrap();
    let emb = as_map(&[vec![0.0], vec![10.0]]);
    for s in 0..50 {
        assert_eq!(ids(&badge_select_from(&pool, &emb, 2, s, Some(0)).unwrap()), vec![0, 1]);
    }

    // duplicates of a chosen center are never drawn while other mass remains
    let pool = PoolState::new([], 0..5).unwrap();
    let emb = as_map(&[vec![0.0], vec![0.0], vec![0.0], vec![5.0], vec![9.0]]);
    for s in 0..200 {
        let got = ids(&badge_select_from(&pool, &emb, 3, s, Some(0)).unwrap());
        assert_eq!(&got[1..].iter().copied().collect::<std::collections::BTreeSet<_>>(), &[3, 4].into());
    }

    let pool = PoolState::new([], 0..3).unwrap();
    let emb = as_map(&[vec![0.0], vec![1.0], vec![3.0]]);
    let trials = 10_000;
    let hits = (0..trials)
        .filter(|&s| badge_select_from(&pool, &emb, 2, s, Some(0)).unwrap()[1].id == 2)
        .count();
    // second center is 3 with probability 9/10
    let sigma = (0.9f64 * 0.1 / trials as f64).sqrt();
    assert!((hits as f64 / trials as f64 - 0.9).abs() <= 3.0 * sigma, "{hits}");
}

#[test]
fn badge_uses_the_prediction_as_label() {
    let m = common::random_model(ModelKind::MeanPool, true, 5);
    let x = Input::Tokens(&[2, 3, 4]);
    let h = m.representation(x).unwrap();
    let p = m.probability(x).unwrap();
    let y = if p >= 0.5 { 1.0 } else { 0.0 };
    let g = alden::acquisition::badge_embedding(&m, x).unwrap();
    for (a, b) in g.iter().zip(&h) {
        assert!((a - (p - y) * b).abs() < 1e-15);
    }
}

#[test]
fn kmeans_matches_naive_reference() {
    for seed in 0..20 {
        let pts = common::random_points(seed, 20);
        let k = 2 + seed as usize % 4;
        let got = kmeans(&pts, k, seed, 100).unwrap();
        assert_eq!(got.assignments, oracles::kmeans_naive(&pts, k, seed, 100), "seed {seed}");
        for w in got.inertia_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }
}

#[test]
fn strategies_return_distinct_unlabeled_ids() {
    let toy = ToyPool::random(5, 20);
    let pool = toy.pool();
    let pts = as_map(&common::random_points(5, 20));
    let picks = [
        alden_select(&pool, &toy.interpretations(), &toy.embedding_tensor(), WordMode::Scalar, 5).unwrap(),
        random_select(&pool, 5, 1).unwrap(),
        coreset_select(&pool, &pts, 5).unwrap(),
        badge_select(&pool, &pts, 5, 1).unwrap(),
    ];
    for p in &picks {
        let mut got = ids(p);
        assert_eq!(got.len(), 5);
        assert!(got.iter().all(|id| pool.unlabeled().contains(id)));
        got.sort_unstable();
        got.dedup();
        assert_eq!(got.len(), 5);
    }
    assert_eq!(badge_select(&pool, &pts, 5, 1).unwrap(), picks[3]);
}
