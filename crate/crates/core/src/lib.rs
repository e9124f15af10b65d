//! Tooling for rhetorical parallelism detection data.

pub mod analysis;
pub mod assignment;
pub mod cli;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod split;
pub mod tagging;

pub use model::{
    classify_set, spans_nested, spans_overlap, Corpus, Document, ModelError, Parallelism, ParallelismKind,
    ParallelismSet, SetClass, Span,
};
