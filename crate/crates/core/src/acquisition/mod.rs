//! Acquisition strategies and the geometry they rely on.

mod alden;
mod badge;
mod bald;
mod coreset;
mod egl;
mod kmeans;
mod pool;
mod random;

use std::fmt;
use std::str::FromStr;

pub use alden::{alden_select, interpretation_distance, DiversityIndex};
pub use badge::{badge_embedding, badge_select, badge_select_from};
pub use bald::{bald_from_probabilities, bald_score, bald_score_with};
pub use coreset::coreset_select;
pub use egl::egl_word_score;
pub use kmeans::{kmeans, kmeans_pp, weighted_pick, KMeansResult};
pub use pool::{top_k, PoolState, Selection};
pub use random::random_select;

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Alden,
    Random,
    EglWord,
    Bald,
    Coreset,
    Badge,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Alden,
        Strategy::Random,
        Strategy::EglWord,
        Strategy::Bald,
        Strategy::Coreset,
        Strategy::Badge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Alden => "alden",
            Strategy::Random => "rnd",
            Strategy::EglWord => "egl",
            Strategy::Bald => "bald",
            Strategy::Coreset => "coreset",
            Strategy::Badge => "badge",
        }
    }

    pub(crate) fn tag(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown strategy {s:?}")))
    }
}
