use super::{Tape, Tensor, Var};
use crate::error::{Error, Result};

/// Compares the tape gradient of a scalar function against central
/// differences and returns
/// `max_i |analytic_i - numeric_i| / max(1, |analytic_i|)`.
///
/// `f` records its computation on the tape it is handed, starting from the
/// input node. Points where `f` is not differentiable (ReLU kinks, `|x|` at
/// 0) give meaningless results; callers must stay away from them.
pub fn finite_difference_check<F>(f: F, point: &Tensor, h: f64) -> Result<f64>
where
    F: Fn(&mut Tape, Var) -> Result<Var>,
{
    if !(h > 0.0) {
        return Err(Error::Input(format!("finite difference step must be positive, got {h}")));
    }
    let mut tape = Tape::new();
    let x = tape.leaf(point.clone(), true);
    let y = f(&mut tape, x)?;
    tape.backward(y)?;
    let analytic = tape
        .grad(x)
        .map(<[f64]>::to_vec)
        .unwrap_or_else(|| vec![0.0; point.len()]);

    let eval = |p: Tensor| -> Result<f64> {
        let mut t = Tape::new();
        let x = t.leaf(p, false);
        let y = f(&mut t, x)?;
        let v = t.value(y).item()?;
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("f evaluated to {v} at a perturbed point")));
        }
        Ok(v)
    };

    let mut worst: f64 = 0.0;
    for (i, &a) in analytic.iter().enumerate() {
        let mut plus = point.clone();
        plus.data_mut()[i] += h;
        let mut minus = point.clone();
        minus.data_mut()[i] -= h;
        let numeric = (eval(plus)? - eval(minus)?) / (2.0 * h);
        worst = worst.max((a - numeric).abs() / a.abs().max(1.0));
    }
    Ok(worst)
}
