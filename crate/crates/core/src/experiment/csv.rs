use std::fmt::Write as _;

use super::active::RunOutcome;
use super::figure1::{Figure1Report, Representation};

/// `run,iteration,labeled_fraction,accuracy`.
pub fn curve_csv(outcomes: &[RunOutcome]) -> String {
    let mut out = String::from("run,iteration,labeled_fraction,accuracy\n");
    for o in outcomes {
        for p in &o.curve.points {
            writeln!(out, "{},{},{:.6},{:.6}", o.run, p.iteration, p.labeled_fraction, p.accuracy).expect("string write");
        }
    }
    out
}

/// `strategy,model,dataset,run,nauc`; runs without a curve area are skipped.
pub fn summary_csv(outcomes: &[RunOutcome], model: &str, dataset: &str) -> String {
    let mut out = String::from("strategy,model,dataset,run,nauc\n");
    for o in outcomes {
        if let Some(nauc) = o.curve.nauc {
            writeln!(out, "{},{model},{dataset},{},{nauc:.6}", o.strategy, o.run).expect("string write");
        }
    }
    out
}

/// `run,iteration,rank,sample_id,strategy,score`.
pub fn selections_csv(outcomes: &[RunOutcome]) -> String {
    let mut out = String::from("run,iteration,rank,sample_id,strategy,score\n");
    for o in outcomes {
        for s in &o.selections {
            writeln!(out, "{},{},{},{},{},{}", o.run, s.iteration, s.rank, s.sample, o.strategy, s.score).expect("string write");
        }
    }
    out
}

/// `seed,representation,ari`.
pub fn figure1_csv(reports: &[Figure1Report]) -> String {
    let mut out = String::from("seed,representation,ari\n");
    for r in reports {
        for rep in Representation::ALL {
            writeln!(out, "{},{rep},{:.6}", r.seed, r.get(rep)).expect("string write");
        }
    }
    out
}
