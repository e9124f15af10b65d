//! Documents, spans and parallelisms.
//!
//! Token positions are 1-based and spans are inclusive on both ends, so a
//! span `(i, j)` covers tokens `w_i ..= w_j`. Every value in this module is
//! immutable once constructed.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid span ({start}, {end}): spans are 1-based with start <= end")]
    InvalidSpan { start: usize, end: usize },
    #[error("a parallelism needs at least two branches, got {0}")]
    TooFewBranches(usize),
    #[error("branches {0} and {1} overlap")]
    OverlappingBranches(Span, Span),
    #[error("span {span} lies outside the document ({len} tokens)")]
    OutOfDocument { span: Span, len: usize },
    #[error("span {span} crosses a section boundary")]
    CrossesSection { span: Span },
    #[error("sections must partition tokens 1..={len} in order: {reason}")]
    BadSections { len: usize, reason: String },
    #[error("duplicate document id {0:?}")]
    DuplicateDocument(String),
}

/// Inclusive 1-based token span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    start: usize,
    end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Result<Self, ModelError> {
        if start == 0 || end < start {
            return Err(ModelError::InvalidSpan { start, end });
        }
        Ok(Span { start, end })
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    /// Number of tokens covered.
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn positions(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        spans_overlap(*self, *other)
    }

    /// True when `other` lies inside `self` (identity included).
    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    /// Number of tokens shared with `other`.
    pub fn intersection_len(&self, other: &Span) -> usize {
        let lo = self.start.max(other.start);
        let hi = self.end.min(other.end);
        if lo > hi {
            0
        } else {
            hi - lo + 1
        }
    }

    /// Shift by a signed token offset, used to move between section-local
    /// and document coordinates.
    pub(crate) fn shifted(&self, offset: isize) -> Result<Span, ModelError> {
        let s = self.start as isize + offset;
        let e = self.end as isize + offset;
        if s < 1 {
            return Err(ModelError::InvalidSpan {
                start: s.max(0) as usize,
                end: e.max(0) as usize,
            });
        }
        Span::new(s as usize, e as usize)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.start, self.end)
    }
}

/// Two spans overlap when they share at least one token.
pub fn spans_overlap(a: Span, b: Span) -> bool {
    (a.start <= b.start && b.start <= a.end) || (b.start <= a.start && a.start <= b.end)
}

/// Two spans nest when one contains the other.
pub fn spans_nested(a: Span, b: Span) -> bool {
    a.contains(&b) || b.contains(&a)
}

/// Word order relation between branches. Carried as metadata only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParallelismKind {
    Synchystic,
    Chiastic,
    #[default]
    Unspecified,
}

impl fmt::Display for ParallelismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParallelismKind::Synchystic => "synchystic",
            ParallelismKind::Chiastic => "chiastic",
            ParallelismKind::Unspecified => "unspecified",
        })
    }
}

/// Two or more pairwise non-overlapping branches, stored sorted by start.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Parallelism {
    branches: Vec<Span>,
    kind: ParallelismKind,
}

impl Parallelism {
    pub fn new(
        branches: impl IntoIterator<Item = Span>,
        kind: ParallelismKind,
    ) -> Result<Self, ModelError> {
        let mut branches: Vec<Span> = branches.into_iter().collect();
        if branches.len() < 2 {
            return Err(ModelError::TooFewBranches(branches.len()));
        }
        branches.sort();
        for w in branches.windows(2) {
            if w[0].overlaps(&w[1]) {
                return Err(ModelError::OverlappingBranches(w[0], w[1]));
            }
        }
        Ok(Parallelism { branches, kind })
    }

    /// Convenience constructor from `(start, end)` pairs.
    pub fn from_pairs(pairs: &[(usize, usize)], kind: ParallelismKind) -> Result<Self, ModelError> {
        let spans = pairs
            .iter()
            .map(|&(s, e)| Span::new(s, e))
            .collect::<Result<Vec<_>, _>>()?;
        Parallelism::new(spans, kind)
    }

    pub fn branches(&self) -> &[Span] {
        &self.branches
    }

    pub fn kind(&self) -> ParallelismKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: ParallelismKind) -> Self {
        self.kind = kind;
        self
    }

    /// All token positions covered by any branch.
    pub fn words(&self) -> BTreeSet<usize> {
        self.branches.iter().flat_map(|b| b.positions()).collect()
    }

    /// Token positions grouped per branch, in branch order.
    pub fn branched_words(&self) -> Vec<BTreeSet<usize>> {
        self.branches.iter().map(|b| b.positions().collect()).collect()
    }

    /// `|words(p)|`; branches are disjoint so this is a plain sum.
    pub fn word_count(&self) -> usize {
        self.branches.iter().map(Span::len).sum()
    }

    /// Equality of branch sets, ignoring kind.
    pub fn same_branches(&self, other: &Parallelism) -> bool {
        self.branches == other.branches
    }

    /// Smallest span covering every branch.
    pub fn extent(&self) -> Span {
        Span {
            start: self.branches[0].start,
            end: self.branches.iter().map(|b| b.end).max().unwrap_or(self.branches[0].end),
        }
    }
}

/// Structural class of a parallelism set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetClass {
    Flat,
    Nested,
    Overlapping,
}

impl fmt::Display for SetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetClass::Flat => "flat",
            SetClass::Nested => "nested",
            SetClass::Overlapping => "overlapping",
        })
    }
}

/// Parallelisms of one document. A member's identity is its ordinal.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParallelismSet {
    items: Vec<Parallelism>,
}

impl ParallelismSet {
    pub fn new(items: Vec<Parallelism>) -> Self {
        ParallelismSet { items }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Parallelism> {
        self.items.iter()
    }

    pub fn get(&self, ordinal: usize) -> Option<&Parallelism> {
        self.items.get(ordinal)
    }

    pub fn as_slice(&self) -> &[Parallelism] {
        &self.items
    }

    pub fn into_vec(self) -> Vec<Parallelism> {
        self.items
    }

    pub fn classify(&self) -> SetClass {
        classify_set(self)
    }

    /// Canonical content view: each parallelism as its branch list, sorted.
    /// Two sets describe the same structure iff their canonical forms match.
    pub fn canonical(&self) -> Vec<Vec<Span>> {
        let mut out: Vec<Vec<Span>> = self.items.iter().map(|p| p.branches.clone()).collect();
        out.sort();
        out
    }

    /// Tokens covered by at least one branch.
    pub fn branched_positions(&self) -> BTreeSet<usize> {
        self.items.iter().flat_map(|p| p.words()).collect()
    }
}

impl FromIterator<Parallelism> for ParallelismSet {
    fn from_iter<T: IntoIterator<Item = Parallelism>>(iter: T) -> Self {
        ParallelismSet::new(iter.into_iter().collect())
    }
}

impl IntoIterator for ParallelismSet {
    type Item = Parallelism;
    type IntoIter = std::vec::IntoIter<Parallelism>;
    fn into_iter(self) -> Self::IntoIter {
        self.items.into_iter()
    }
}

impl<'a> IntoIterator for &'a ParallelismSet {
    type Item = &'a Parallelism;
    type IntoIter = std::slice::Iter<'a, Parallelism>;
    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

/// Overlapping beats nested beats flat.
///
/// Sweeps branches sorted by start (longest first on ties) while keeping a
/// stack of open branches; the stack always forms a containment chain, so a
/// new branch either nests in the top, crosses it, or is disjoint from all.
pub fn classify_set(set: &ParallelismSet) -> SetClass {
    let mut all: Vec<Span> = set.iter().flat_map(|p| p.branches.iter().copied()).collect();
    all.sort_by(|a, b| a.start.cmp(&b.start).then(b.end.cmp(&a.end)));
    let mut stack: Vec<Span> = Vec::new();
    let mut nested = false;
    for b in all {
        while stack.last().is_some_and(|top| top.end < b.start) {
            stack.pop();
        }
        if let Some(top) = stack.last() {
            if b.end > top.end {
                return SetClass::Overlapping;
            }
            nested = true;
        }
        stack.push(b);
    }
    if nested {
        SetClass::Nested
    } else {
        SetClass::Flat
    }
}

/// A pre-tokenized document with its sections and annotation layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    id: String,
    tokens: Vec<String>,
    sections: Vec<Span>,
    reference: ParallelismSet,
    hypotheses: BTreeMap<String, ParallelismSet>,
}

impl Document {
    /// `sections` must partition `1..=tokens.len()` in order.
    pub fn new(
        id: impl Into<String>,
        tokens: Vec<String>,
        sections: Vec<Span>,
    ) -> Result<Self, ModelError> {
        let len = tokens.len();
        let bad = |reason: String| ModelError::BadSections { len, reason };
        let mut next = 1;
        for s in &sections {
            if s.start != next {
                return Err(bad(format!("section {s} should start at {next}")));
            }
            next = s.end + 1;
        }
        if next != len + 1 {
            return Err(bad(format!("sections end at {} but document has {len} tokens", next - 1)));
        }
        Ok(Document {
            id: id.into(),
            tokens,
            sections,
            reference: ParallelismSet::empty(),
            hypotheses: BTreeMap::new(),
        })
    }

    /// Single-section document.
    pub fn single_section(id: impl Into<String>, tokens: Vec<String>) -> Result<Self, ModelError> {
        let sections = if tokens.is_empty() {
            Vec::new()
        } else {
            vec![Span::new(1, tokens.len())?]
        };
        Document::new(id, tokens, sections)
    }

    pub fn with_reference(mut self, set: ParallelismSet) -> Result<Self, ModelError> {
        self.check_set(&set)?;
        self.reference = set;
        Ok(self)
    }

    pub fn with_hypothesis(
        mut self,
        name: impl Into<String>,
        set: ParallelismSet,
    ) -> Result<Self, ModelError> {
        self.check_set(&set)?;
        self.hypotheses.insert(name.into(), set);
        Ok(self)
    }

    pub fn without_hypotheses(mut self) -> Self {
        self.hypotheses.clear();
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Token at 1-based position `i`.
    pub fn token(&self, i: usize) -> &str {
        &self.tokens[i - 1]
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn sections(&self) -> &[Span] {
        &self.sections
    }

    pub fn reference(&self) -> &ParallelismSet {
        &self.reference
    }

    pub fn hypotheses(&self) -> &BTreeMap<String, ParallelismSet> {
        &self.hypotheses
    }

    pub fn hypothesis(&self, name: &str) -> Option<&ParallelismSet> {
        self.hypotheses.get(name)
    }

    /// Index of the section containing `span`, if any single section does.
    pub fn section_of(&self, span: Span) -> Option<usize> {
        let idx = self.sections.partition_point(|s| s.end < span.start);
        self.sections
            .get(idx)
            .filter(|s| s.contains(&span))
            .map(|_| idx)
    }

    /// Index of the section containing token position `pos`.
    pub fn section_at(&self, pos: usize) -> Option<usize> {
        let idx = self.sections.partition_point(|s| s.end < pos);
        self.sections.get(idx).filter(|s| s.start <= pos).map(|_| idx)
    }

    /// Checks that every parallelism lies inside the document and inside a
    /// single section.
    pub fn check_set(&self, set: &ParallelismSet) -> Result<(), ModelError> {
        for p in set {
            for &b in p.branches() {
                if b.end > self.len() {
                    return Err(ModelError::OutOfDocument { span: b, len: self.len() });
                }
                if self.section_of(b).is_none() {
                    return Err(ModelError::CrossesSection { span: b });
                }
            }
            if self.section_of(p.extent()).is_none() {
                return Err(ModelError::CrossesSection { span: p.extent() });
            }
        }
        Ok(())
    }

    /// Parallelisms of `set` that live in section `idx`, shifted to
    /// section-local coordinates.
    pub fn section_view(&self, set: &ParallelismSet, idx: usize) -> ParallelismSet {
        let sec = self.sections[idx];
        let offset = -(sec.start as isize - 1);
        set.iter()
            .filter(|p| self.section_of(p.branches()[0]) == Some(idx))
            .map(|p| {
                let spans = p.branches().iter().map(|b| b.shifted(offset).expect("inside section"));
                Parallelism::new(spans, p.kind()).expect("shift preserves validity")
            })
            .collect()
    }
}

/// A named collection of documents with unique ids.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Corpus {
    name: String,
    documents: Vec<Document>,
}

impl Corpus {
    pub fn new(name: impl Into<String>, documents: Vec<Document>) -> Result<Self, ModelError> {
        let mut seen = HashSet::new();
        for d in &documents {
            if !seen.insert(d.id.as_str()) {
                return Err(ModelError::DuplicateDocument(d.id.clone()));
            }
        }
        Ok(Corpus { name: name.into(), documents })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn document(&self, id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.id == id)
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn into_documents(self) -> Vec<Document> {
        self.documents
    }

    /// Names of every hypothesis layer present on any document.
    pub fn hypothesis_names(&self) -> BTreeSet<String> {
        self.documents
            .iter()
            .flat_map(|d| d.hypotheses.keys().cloned())
            .collect()
    }
}
