//! Assignment-based precision, recall and F1 over parallelism sets.
//!
//! Each metric supplies a `size` for single parallelisms and a `score` for
//! pairs, with `0 <= score(a, b) <= min(size(a), size(b))`. The reference
//! and hypothesis sets of a document are aligned by the maximum-weight
//! matching on `score`, and precision/recall divide the matched weight by
//! the hypothesis/reference size totals.

mod taxonomy;

pub use taxonomy::{categorize_errors, ErrorCounts, ErrorTaxonomyReport};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assignment::{max_weight_matching, max_weight_matching_with_min_positive, WeightMatrix};
use crate::model::{Corpus, Parallelism, ParallelismSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("unknown metric {0:?} (expected epm, mpbm, mbawo or mwo)")]
    UnknownMetric(String),
    #[error("no document carries a hypothesis named {0:?}")]
    UnknownHypothesis(String),
}

/// The four score/size instantiations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Metric {
    /// Exact parallelism match.
    Epm,
    /// Maximum parallel branch match.
    Mpbm,
    /// Maximum branch-aware word overlap.
    Mbawo,
    /// Maximum word overlap.
    Mwo,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Epm, Metric::Mpbm, Metric::Mbawo, Metric::Mwo];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Epm => "EPM",
            Metric::Mpbm => "MPBM",
            Metric::Mbawo => "MBAWO",
            Metric::Mwo => "MWO",
        }
    }

    pub fn size(&self, p: &Parallelism) -> f64 {
        match self {
            Metric::Epm => 1.0,
            Metric::Mpbm => p.branches().len() as f64,
            Metric::Mbawo | Metric::Mwo => p.word_count() as f64,
        }
    }

    pub fn score(&self, a: &Parallelism, b: &Parallelism) -> f64 {
        let s = match self {
            Metric::Epm => f64::from(u8::from(a.same_branches(b))),
            Metric::Mpbm => {
                let shared = shared_branches(a, b);
                if shared >= 2 {
                    shared as f64
                } else {
                    0.0
                }
            }
            Metric::Mbawo => {
                let w = branch_overlap_matrix(a, b);
                max_weight_matching_with_min_positive(&w, 2)
            }
            Metric::Mwo => a
                .branches()
                .iter()
                .flat_map(|x| b.branches().iter().map(move |y| x.intersection_len(y)))
                .sum::<usize>() as f64,
        };
        debug_assert!(s >= 0.0 && s <= self.size(a).min(self.size(b)), "{self}: score out of bounds");
        s
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = MetricError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "epm" => Ok(Metric::Epm),
            "mpbm" => Ok(Metric::Mpbm),
            "mbawo" => Ok(Metric::Mbawo),
            "mwo" => Ok(Metric::Mwo),
            _ => Err(MetricError::UnknownMetric(s.to_string())),
        }
    }
}

/// Number of branches with identical spans in both parallelisms.
fn shared_branches(a: &Parallelism, b: &Parallelism) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    let (x, y) = (a.branches(), b.branches());
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Token overlap between every branch of `a` (rows) and of `b` (columns).
pub fn branch_overlap_matrix(a: &Parallelism, b: &Parallelism) -> WeightMatrix {
    WeightMatrix::from_fn(a.branches().len(), b.branches().len(), |r, c| {
        a.branches()[r].intersection_len(&b.branches()[c]) as f64
    })
    .expect("overlaps are non-negative")
}

/// Which zero-denominator convention, if any, shaped a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmptyConvention {
    /// Both sides empty: every score is 1.
    BothEmpty,
    /// No hypotheses: precision is vacuously 1.
    NoHypotheses,
    /// No references: recall is vacuously 1.
    NoReferences,
}

/// Matched weight and the two size totals. Aggregation is a plain sum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub m: f64,
    pub size_g: f64,
    pub size_h: f64,
}

impl std::ops::Add for Tally {
    type Output = Tally;
    fn add(self, other: Tally) -> Tally {
        Tally {
            m: self.m + other.m,
            size_g: self.size_g + other.size_g,
            size_h: self.size_h + other.size_h,
        }
    }
}

impl Tally {
    /// `(precision, recall, f1, convention)`.
    pub fn scores(&self) -> (f64, f64, f64, Option<EmptyConvention>) {
        let convention = match (self.size_h > 0.0, self.size_g > 0.0) {
            (false, false) => Some(EmptyConvention::BothEmpty),
            (false, true) => Some(EmptyConvention::NoHypotheses),
            (true, false) => Some(EmptyConvention::NoReferences),
            (true, true) => None,
        };
        let p = if self.size_h > 0.0 { self.m / self.size_h } else { 1.0 };
        let r = if self.size_g > 0.0 { self.m / self.size_g } else { 1.0 };
        let f1 = match convention {
            Some(EmptyConvention::BothEmpty) => 1.0,
            // the non-empty side forces m = 0
            Some(_) => 0.0,
            None if p + r > 0.0 => 2.0 * p * r / (p + r),
            None => 0.0,
        };
        (p, r, f1, convention)
    }

    pub fn f1(&self) -> f64 {
        self.scores().2
    }
}

/// A hypothesis/reference pair chosen by the matching, with its score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub hypothesis: usize,
    pub reference: usize,
    pub score: f64,
}

/// Full single-document result, including the matching itself.
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub tally: Tally,
    pub pairs: Vec<MatchedPair>,
    /// Per-parallelism sizes in set order.
    pub sizes_g: Vec<f64>,
    pub sizes_h: Vec<f64>,
}

/// Aligns `h` against `g` under `metric`.
pub fn align(g: &ParallelismSet, h: &ParallelismSet, metric: Metric) -> Alignment {
    let matrix = WeightMatrix::from_fn(h.len(), g.len(), |r, c| {
        metric.score(&h.as_slice()[r], &g.as_slice()[c])
    })
    .expect("scores are non-negative and finite");
    let matching = max_weight_matching(&matrix);
    let sizes_g: Vec<f64> = g.iter().map(|p| metric.size(p)).collect();
    let sizes_h: Vec<f64> = h.iter().map(|p| metric.size(p)).collect();
    let pairs = matching
        .pairs
        .iter()
        .map(|&(r, c)| MatchedPair { hypothesis: r, reference: c, score: matrix.get(r, c) })
        .collect();
    Alignment {
        tally: Tally {
            m: matching.total_weight,
            size_g: sizes_g.iter().sum(),
            size_h: sizes_h.iter().sum(),
        },
        pairs,
        sizes_g,
        sizes_h,
    }
}

/// Scores of a single document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentScore {
    pub id: String,
    pub m: f64,
    pub size_g: f64,
    pub size_h: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub metric: Metric,
    pub m: f64,
    pub size_h: f64,
    pub size_g: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub convention: Option<EmptyConvention>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub per_document: Vec<DocumentScore>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

impl MetricReport {
    fn from_tally(metric: Metric, t: Tally) -> Self {
        let (precision, recall, f1, convention) = t.scores();
        MetricReport {
            metric,
            m: t.m,
            size_h: t.size_h,
            size_g: t.size_g,
            precision,
            recall,
            f1,
            convention,
            per_document: Vec::new(),
            warnings: Vec::new(),
        }
    }
}

/// Single-document evaluation.
pub fn evaluate(g: &ParallelismSet, h: &ParallelismSet, metric: Metric) -> MetricReport {
    MetricReport::from_tally(metric, align(g, h, metric).tally)
}

/// Micro-averaged evaluation: matched weight and sizes are summed over
/// documents before computing the ratios. Documents lacking the named
/// hypothesis count as predicting nothing.
pub fn evaluate_corpus(corpus: &Corpus, hypothesis: &str, metric: Metric) -> Result<MetricReport, MetricError> {
    if !corpus.is_empty() && !corpus.documents().iter().any(|d| d.hypothesis(hypothesis).is_some()) {
        return Err(MetricError::UnknownHypothesis(hypothesis.to_string()));
    }
    let empty = ParallelismSet::empty();
    let mut warnings = Vec::new();
    if corpus.is_empty() {
        warnings.push("corpus has no documents; scores follow the empty-set convention".to_string());
    }
    let per_doc: Vec<(String, Tally)> = {
        use rayon::prelude::*;
        corpus
            .documents()
            .par_iter()
            .map(|d| {
                let h = d.hypothesis(hypothesis).unwrap_or(&empty);
                (d.id().to_string(), align(d.reference(), h, metric).tally)
            })
            .collect()
    };
    for d in corpus.documents() {
        if d.hypothesis(hypothesis).is_none() {
            warnings.push(format!("document {:?} has no hypothesis {hypothesis:?}; treated as empty", d.id()));
        }
    }
    let total = per_doc.iter().fold(Tally::default(), |acc, (_, t)| acc + *t);
    let mut report = MetricReport::from_tally(metric, total);
    report.per_document = per_doc
        .into_iter()
        .map(|(id, t)| {
            let (precision, recall, f1, _) = t.scores();
            DocumentScore { id, m: t.m, size_g: t.size_g, size_h: t.size_h, precision, recall, f1 }
        })
        .collect();
    report.warnings = warnings;
    Ok(report)
}
