use crate::error::Result;
use crate::models::{mc_dropout_passes, Input, MaskSource, Model};

fn binary_entropy(p: f64) -> f64 {
    let h = |q: f64| if q > 0.0 { -q * q.ln() } else { 0.0 };
    h(p) + h(1.0 - p)
}

/// Mutual information between the prediction and the dropout mask, in nats:
/// `H(mean p_t) - mean H(p_t)`, clipped at 0.
pub fn bald_from_probabilities(probs: &[f64]) -> f64 {
    // identical passes carry no information; the mean below could round
    if probs.iter().all(|&p| p == probs[0]) {
        return 0.0;
    }
    let t = probs.len() as f64;
    let mean = probs.iter().sum::<f64>() / t;
    let expected = probs.iter().map(|&p| binary_entropy(p)).sum::<f64>() / t;
    (binary_entropy(mean) - expected).max(0.0)
}

pub fn bald_score(model: &Model, tokens: &[usize], passes: usize, seed: u64) -> Result<f64> {
    bald_score_with(model, tokens, passes, seed, MaskSource::Random)
}

pub fn bald_score_with(model: &Model, tokens: &[usize], passes: usize, seed: u64, source: MaskSource) -> Result<f64> {
    let probs = mc_dropout_passes(model, Input::Tokens(tokens), passes, seed, source)?;
    Ok(bald_from_probabilities(&probs))
}
