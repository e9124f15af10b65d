//! Reading annotations into the core model and writing the exchange formats.

mod align;
mod brat;
mod corpus_io;
mod normalize;
mod tsv;

pub use align::{align_to_tokens, paragraph_sections, simple_tokenize, CharParallelism, CharSpan, TokenAlignment};
pub use brat::{
    brat_document, link_to_parallelisms, parse_brat, BratEntity, BratOptions, BratRelation, EntityLabel, ParsedBrat,
    RelationLabel,
};
pub use corpus_io::{read_corpus, read_corpus_str, write_corpus, write_corpus_string, CANONICAL_INDEXING};
pub use normalize::{
    collapse_interlocking, is_punctuation, normalize_conjunctions, strip_punctuation, CollapseEvent, CollapseRule,
    Language,
};
pub use tsv::{decode_tsv, read_tsv, write_tsv, DecodedDocument, TsvDocument, TsvFile, TsvSection};

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::ModelError;
use crate::tagging::TaggingError;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("JSON syntax: {0}")]
    Json(#[from] serde_json::Error),
    #[error("document {document:?}: {path}: {message}")]
    Schema { document: String, path: String, message: String },
    #[error("line {line}: {message}")]
    Tsv { line: usize, message: String },
    #[error("{} error(s) in strict mode; first: {}", .0.iter().filter(|d| d.severity == Severity::Error).count(), .0.iter().find(|d| d.severity == Severity::Error).map(|d| d.to_string()).unwrap_or_default())]
    Strict(Vec<Diagnostic>),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Tagging(#[from] TaggingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

/// A problem found while reading input, tied to a line when there is one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub severity: Severity,
    pub message: String,
}

impl Diagnostic {
    pub fn warning(line: Option<usize>, message: impl Into<String>) -> Self {
        Diagnostic { line, severity: Severity::Warning, message: message.into() }
    }

    pub fn error(line: Option<usize>, message: impl Into<String>) -> Self {
        Diagnostic { line, severity: Severity::Error, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        match self.line {
            Some(l) => write!(f, "{sev}: line {l}: {}", self.message),
            None => write!(f, "{sev}: {}", self.message),
        }
    }
}

pub(crate) fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Error)
}
