//! The active-learning loop, its metrics, the 2-D region experiment and
//! their CSV renderings.

mod active;
mod csv;
mod figure1;
mod metrics;
mod oracle;

pub use active::{
    round_half_up, run_active_learning, run_experiment, CurvePoint, Dataset, ExperimentConfig, LearningCurve, RunOutcome,
    SelectionRecord,
};
pub use csv::{curve_csv, figure1_csv, selections_csv, summary_csv};
pub use figure1::{figure1_experiment, Figure1Config, Figure1Report, Representation};
pub use metrics::{adjusted_rand_index, median, normalized_auc};
pub use oracle::Oracle;
