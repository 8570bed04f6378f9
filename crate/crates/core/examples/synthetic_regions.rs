//! Trains the 2-D network on the four-triangle data and clusters three
//! representations of the points: input gradients, last hidden layer and
//! gradient embeddings. Only the gradients recover the four regions.
//!
//! cargo run --release --example synthetic_regions -- [seeds]

use alden::experiment::{figure1_experiment, median, Figure1Config, Representation};

fn main() -> alden::Result<()> {
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let mut reports = Vec::new();
    for seed in 0..seeds {
        let r = figure1_experiment(&Figure1Config::new(2000, seed))?;
        println!(
            "seed {seed}: train accuracy {:.3}, ARI interpretation {:.3} coreset {:.3} badge {:.3}",
            r.train_accuracy, r.ari[0], r.ari[1], r.ari[2]
        );
        reports.push(r);
    }
    for rep in Representation::ALL {
        let v: Vec<f64> = reports.iter().map(|r| r.get(rep)).collect();
        println!("median ARI {rep}: {:.3}", median(&v).unwrap());
    }
    Ok(())
}
