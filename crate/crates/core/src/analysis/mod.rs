//! Dataset statistics, lexical overlap, agreement bootstrap and a simple
//! baseline detector.

mod baseline;
mod bootstrap;
mod nlo;
mod stats;

pub use baseline::{baseline_detect, BaselineConfig};
pub use bootstrap::{bootstrap_agreement, bootstrap_items, bootstrap_population, percentile, BootstrapItem, BootstrapReport};
pub use nlo::{branch_pairs, nlo, nlo_counts, nlo_histogram, NloHistogram};
pub use stats::{
    derived, kneser_ney_replacement, summarize, token_counts, DatasetSummary, DerivedStats, MeanStd, StdKind,
};

use thiserror::Error;

use crate::metrics::MetricError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("lexical overlap is undefined for an empty branch")]
    EmptyBranch,
    #[error("bootstrap population is empty")]
    EmptyPopulation,
    #[error("the number of trials must be positive")]
    ZeroTrials,
    #[error("threshold must lie in [0, 1], got {0}")]
    BadThreshold(f64),
    #[error("invalid branch length window {0}..={1}")]
    BadWindow(usize, usize),
    #[error(transparent)]
    Metric(#[from] MetricError),
}
