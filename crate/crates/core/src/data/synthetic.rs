use rand::Rng as _;

use crate::autodiff::sigmoid;
use crate::error::{Error, Result};
use crate::rng::{purpose, rng_for};

/// Which of the four diagonal triangles of the square a point falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    Top,
    Bottom,
    Right,
    Left,
}

impl Region {
    pub fn index(self) -> usize {
        self as usize
    }

    /// Region of `x`: the largest of `x2, -x2, x1, -x1`, ties resolved in
    /// the order top, bottom, right, left.
    pub fn of(x: [f64; 2]) -> Region {
        let candidates = [
            (x[1], Region::Top),
            (-x[1], Region::Bottom),
            (x[0], Region::Right),
            (-x[0], Region::Left),
        ];
        let mut best = candidates[0];
        for c in &candidates[1..] {
            if c.0 > best.0 {
                best = *c;
            }
        }
        best.1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticPoint {
    pub x: [f64; 2],
    pub label: u8,
    pub region: Region,
}

pub const COORD_RANGE: f64 = 5.0;

/// `P(y = 1 | x) = sigmoid(x1 * x2)`.
pub fn positive_probability(x: [f64; 2]) -> f64 {
    sigmoid(x[0] * x[1])
}

/// `n` points uniform on `[-5, 5]^2` with Bernoulli labels.
pub fn generate_synthetic(n: usize, seed: u64) -> Result<Vec<SyntheticPoint>> {
    if n == 0 {
        return Err(Error::Config("synthetic sample count must be positive".into()));
    }
    let mut rng = rng_for(seed, &[purpose::SYNTHETIC]);
    Ok((0..n)
        .map(|_| {
            let x = [
                rng.gen_range(-COORD_RANGE..=COORD_RANGE),
                rng.gen_range(-COORD_RANGE..=COORD_RANGE),
            ];
            let label = u8::from(rng.gen::<f64>() < positive_probability(x));
            SyntheticPoint {
                x,
                label,
                region: Region::of(x),
            }
        })
        .collect())
}
