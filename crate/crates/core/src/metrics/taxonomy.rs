//! Error categorisation at parallelism, branch and word granularity.
//!
//! Hypothesis and reference parallelisms sharing at least one token are
//! paired one-to-one by maximum token overlap. Unpaired hypotheses are
//! parallelism-level false positives and unpaired references are
//! parallelism-level false negatives. Each imperfect pair receives exactly
//! one category: a branch-level error when some branch of either side has
//! no counterpart, otherwise a word-level error from the boundary
//! differences of the aligned branches. A false mixture (FM) means both an
//! extra and a missing unit were found.

use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use crate::assignment::{max_weight_matching, WeightMatrix};
use crate::model::{Parallelism, ParallelismSet, Span};

use super::{branch_overlap_matrix, Metric};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorCounts {
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub fm: usize,
}

impl ErrorCounts {
    pub fn total(&self) -> usize {
        self.fp + self.fn_ + self.fm
    }

    fn record(&mut self, extra: bool, missing: bool) {
        match (extra, missing) {
            (true, true) => self.fm += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => {}
        }
    }
}

impl AddAssign for ErrorCounts {
    fn add_assign(&mut self, o: Self) {
        self.fp += o.fp;
        self.fn_ += o.fn_;
        self.fm += o.fm;
    }
}

/// Parallelism-level errors have no mixture category.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelismErrors {
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorTaxonomyReport {
    pub parallelism: ParallelismErrors,
    pub branch: ErrorCounts,
    pub word: ErrorCounts,
    /// Overlapping hypothesis/reference pairs left out by one-to-one pairing.
    pub suppressed_overlaps: usize,
}

impl ErrorTaxonomyReport {
    pub fn total(&self) -> usize {
        self.parallelism.fp + self.parallelism.fn_ + self.branch.total() + self.word.total()
    }
}

impl AddAssign<&ErrorTaxonomyReport> for ErrorTaxonomyReport {
    fn add_assign(&mut self, o: &ErrorTaxonomyReport) {
        self.parallelism.fp += o.parallelism.fp;
        self.parallelism.fn_ += o.parallelism.fn_;
        self.branch += o.branch;
        self.word += o.word;
        self.suppressed_overlaps += o.suppressed_overlaps;
    }
}

pub fn categorize_errors(g: &ParallelismSet, h: &ParallelismSet) -> ErrorTaxonomyReport {
    let mut report = ErrorTaxonomyReport::default();
    let matrix = WeightMatrix::from_fn(h.len(), g.len(), |r, c| {
        Metric::Mwo.score(&h.as_slice()[r], &g.as_slice()[c])
    })
    .expect("overlaps are non-negative");
    let matching = max_weight_matching(&matrix);

    let positive_pairs = (0..h.len())
        .flat_map(|r| (0..g.len()).map(move |c| (r, c)))
        .filter(|&(r, c)| matrix.get(r, c) > 0.0)
        .count();
    report.suppressed_overlaps = positive_pairs - matching.pairs.len();
    report.parallelism.fp = h.len() - matching.pairs.len();
    report.parallelism.fn_ = g.len() - matching.pairs.len();

    for &(r, c) in &matching.pairs {
        categorize_pair(&g.as_slice()[c], &h.as_slice()[r], &mut report);
    }
    report
}

fn categorize_pair(g: &Parallelism, h: &Parallelism, report: &mut ErrorTaxonomyReport) {
    if g.same_branches(h) {
        return;
    }
    let overlap = branch_overlap_matrix(h, g);
    let aligned = max_weight_matching(&overlap);
    let extra_branch = aligned.pairs.len() < h.branches().len();
    let missing_branch = aligned.pairs.len() < g.branches().len();
    if extra_branch || missing_branch {
        report.branch.record(extra_branch, missing_branch);
        return;
    }
    let (mut extra, mut missing) = (false, false);
    for &(hr, gc) in &aligned.pairs {
        let (hb, gb): (Span, Span) = (h.branches()[hr], g.branches()[gc]);
        extra |= hb.start() < gb.start() || hb.end() > gb.end();
        missing |= gb.start() < hb.start() || gb.end() > hb.end();
    }
    report.word.record(extra, missing);
}
