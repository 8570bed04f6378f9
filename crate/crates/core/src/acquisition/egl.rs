use crate::autodiff::sigmoid;
use crate::error::Result;
use crate::interpret::embedding_gradients;
use crate::models::Model;

/// Expected gradient length of the most uncertain word.
///
/// For word `j`, `sum_y p(y|x) * ||d BCE(x, y) / d e_j||`, with the
/// expectation over both labels under the model's own prediction; the
/// sentence score is the maximum over words. Since
/// `d BCE / d e_j = (p - y) * d logit / d e_j`, one backward pass through
/// the logit serves both labels.
pub fn egl_word_score(model: &Model, tokens: &[usize]) -> Result<f64> {
    let g = embedding_gradients(model, tokens)?;
    let p = sigmoid(g.logit);
    let mut best: f64 = 0.0;
    for (_, _, grad, _) in &g.rows {
        let norm = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
        let expected: f64 = [(0.0, 1.0 - p), (1.0, p)]
            .iter()
            .map(|&(y, weight)| weight * (p - y).abs() * norm)
            .sum();
        best = best.max(expected);
    }
    Ok(best)
}
