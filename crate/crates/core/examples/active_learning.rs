//! Full pool-based loops on the generated corpus, comparing learning
//! curves of several strategies started from the same seed set.
//!
//! cargo run --release --example active_learning

use alden::acquisition::Strategy;
use alden::data::toy::{toy_corpus, ToyCorpusConfig};
use alden::experiment::{median, run_experiment, Dataset, ExperimentConfig};
use alden::models::{ModelKind, TrainConfig};

fn main() -> alden::Result<()> {
    let dataset = Dataset {
        name: "toy".into(),
        corpus: toy_corpus(&ToyCorpusConfig {
            sentences: 2000,
            ..Default::default()
        })?,
        embeddings: None,
    };
    for strategy in [Strategy::Random, Strategy::Alden, Strategy::Coreset] {
        let config = ExperimentConfig {
            model: ModelKind::MeanPool,
            strategy,
            iterations: 10,
            runs: 3,
            train: TrainConfig {
                lr: 0.5,
                ..TrainConfig::default()
            },
            ..ExperimentConfig::default()
        };
        let outcomes = run_experiment(&dataset, &config)?;
        let curve: Vec<String> = outcomes[0]
            .curve
            .points
            .iter()
            .map(|p| format!("{:.2}", p.accuracy))
            .collect();
        let nauc: Vec<f64> = outcomes.iter().filter_map(|o| o.curve.nauc).collect();
        println!("{:>8}: median nAUC {:.4}  run 0: {}", strategy.name(), median(&nauc).unwrap(), curve.join(" "));
    }
    Ok(())
}
