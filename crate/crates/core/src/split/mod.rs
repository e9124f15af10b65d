//! Greedy tag-count splitter and Welch-test verification of the result.
//!
//! A file's tags are encoded over all strata with an `M`-bearing scheme;
//! `O` and `M` are outer tags, all others inner. The splitter minimizes
//!
//! ```text
//! (MSE_inner + MSE_outer) / 2,   MSE_kind = mean over splits of (share - ratio)^2
//! ```
//!
//! where `share` is the split's fraction of the corpus-wide count of that
//! kind.

mod welch;

pub use welch::{ln_gamma, reg_inc_beta, student_t_two_sided, welch_t_test, WelchResult};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Document;
use crate::tagging::{encode, TagScheme, TaggingError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SplitError {
    #[error("invalid split specification: {0}")]
    BadSpec(String),
    #[error("{files} file(s) cannot fill {splits} splits")]
    TooFewFiles { files: usize, splits: usize },
    #[error("scheme {0} has no M tag; tag counting needs a BIOM-family scheme")]
    NoMTag(TagScheme),
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("document {0:?}: {1}")]
    Tagging(String, TaggingError),
    #[error("exhaustive search over {0} files is too large")]
    TooLarge(usize),
}

/// Named target ratios, in declaration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    names: Vec<String>,
    ratios: Vec<f64>,
}

impl SplitSpec {
    pub fn new(parts: Vec<(String, f64)>) -> Result<Self, SplitError> {
        if parts.is_empty() {
            return Err(SplitError::BadSpec("no splits".into()));
        }
        for (i, (name, r)) in parts.iter().enumerate() {
            if !(r.is_finite() && *r > 0.0) {
                return Err(SplitError::BadSpec(format!("ratio of {name:?} must be positive, got {r}")));
            }
            if parts[..i].iter().any(|(n, _)| n == name) {
                return Err(SplitError::BadSpec(format!("duplicate split {name:?}")));
            }
        }
        let sum: f64 = parts.iter().map(|p| p.1).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(SplitError::BadSpec(format!("ratios sum to {sum}, not 1")));
        }
        let (names, ratios) = parts.into_iter().unzip();
        Ok(SplitSpec { names, ratios })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        "training=0.7,validation=0.1,optimization=0.1,test=0.1".parse().expect("valid")
    }
}

/// Parses `name=ratio,name=ratio,...`.
impl FromStr for SplitSpec {
    type Err = SplitError;
    fn from_str(s: &str) -> Result<Self, SplitError> {
        let parts = s
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| {
                let (n, r) = p.split_once('=').ok_or_else(|| SplitError::BadSpec(format!("expected name=ratio, got {p:?}")))?;
                let r: f64 = r.trim().parse().map_err(|_| SplitError::BadSpec(format!("bad ratio in {p:?}")))?;
                Ok((n.trim().to_string(), r))
            })
            .collect::<Result<Vec<_>, SplitError>>()?;
        SplitSpec::new(parts)
    }
}

impl fmt::Display for SplitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.names.iter().zip(&self.ratios).map(|(n, r)| format!("{n}={r}")).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileTagCounts {
    pub id: String,
    pub inner: u64,
    pub outer: u64,
}

/// Inner and outer tag counts of the reference layer over all strata.
pub fn count_tags(doc: &Document, scheme: TagScheme) -> Result<FileTagCounts, SplitError> {
    if !scheme.use_m {
        return Err(SplitError::NoMTag(scheme));
    }
    let (mut inner, mut outer) = (0u64, 0u64);
    for (k, sec) in doc.sections().iter().enumerate() {
        let seq = encode(sec.len(), &doc.section_view(doc.reference(), k), scheme)
            .map_err(|e| SplitError::Tagging(doc.id().to_string(), e))?;
        let (i, o) = seq.inner_outer();
        inner += i as u64;
        outer += o as u64;
    }
    Ok(FileTagCounts { id: doc.id().to_string(), inner, outer })
}

fn shares(split_of: &[usize], files: &[FileTagCounts], k: usize) -> (Vec<f64>, Vec<f64>) {
    let (ti, to): (u64, u64) = files.iter().fold((0, 0), |(a, b), f| (a + f.inner, b + f.outer));
    let mut inner = vec![0u64; k];
    let mut outer = vec![0u64; k];
    for (f, &s) in files.iter().zip(split_of) {
        inner[s] += f.inner;
        outer[s] += f.outer;
    }
    let share = |x: u64, t: u64| if t == 0 { 0.0 } else { x as f64 / t as f64 };
    (inner.iter().map(|&x| share(x, ti)).collect(), outer.iter().map(|&x| share(x, to)).collect())
}

fn mse_of(inner: &[u64], outer: &[u64], ti: u64, to: u64, ratios: &[f64]) -> f64 {
    let k = ratios.len() as f64;
    let kind = |xs: &[u64], t: u64| {
        xs.iter()
            .zip(ratios)
            .map(|(&x, r)| {
                let s = if t == 0 { 0.0 } else { x as f64 / t as f64 };
                (s - r).powi(2)
            })
            .sum::<f64>()
            / k
    };
    (kind(inner, ti) + kind(outer, to)) / 2.0
}

/// Objective value of a full assignment (`split_of[i]` is the split of
/// `files[i]`).
pub fn split_mse(files: &[FileTagCounts], spec: &SplitSpec, split_of: &[usize]) -> f64 {
    let k = spec.len();
    let (ti, to): (u64, u64) = files.iter().fold((0, 0), |(a, b), f| (a + f.inner, b + f.outer));
    let mut inner = vec![0u64; k];
    let mut outer = vec![0u64; k];
    for (f, &s) in files.iter().zip(split_of) {
        inner[s] += f.inner;
        outer[s] += f.outer;
    }
    mse_of(&inner, &outer, ti, to, spec.ratios())
}

/// Sorts files by inner then outer count, both descending, and places each
/// into the split that minimizes the objective after the addition. Ties go
/// to the earlier split. Returns the split index of every file in input
/// order.
pub fn greedy_split(files: &[FileTagCounts], spec: &SplitSpec) -> Result<Vec<usize>, SplitError> {
    let k = spec.len();
    if files.len() < k {
        return Err(SplitError::TooFewFiles { files: files.len(), splits: k });
    }
    let (ti, to): (u64, u64) = files.iter().fold((0, 0), |(a, b), f| (a + f.inner, b + f.outer));
    let mut order: Vec<usize> = (0..files.len()).collect();
    order.sort_by(|&a, &b| (files[b].inner, files[b].outer).cmp(&(files[a].inner, files[a].outer)));
    let mut inner = vec![0u64; k];
    let mut outer = vec![0u64; k];
    let mut split_of = vec![0usize; files.len()];
    for i in order {
        let mut best = (f64::INFINITY, 0);
        for s in 0..k {
            inner[s] += files[i].inner;
            outer[s] += files[i].outer;
            let m = mse_of(&inner, &outer, ti, to, spec.ratios());
            inner[s] -= files[i].inner;
            outer[s] -= files[i].outer;
            if m < best.0 {
                best = (m, s);
            }
        }
        split_of[i] = best.1;
        inner[best.1] += files[i].inner;
        outer[best.1] += files[i].outer;
    }
    Ok(split_of)
}

/// Lowest objective over every assignment, for small inputs. Splits may
/// be left empty.
pub fn exhaustive_split(files: &[FileTagCounts], spec: &SplitSpec) -> Result<(Vec<usize>, f64), SplitError> {
    let k = spec.len();
    let total = (k as f64).powi(files.len() as i32);
    if total > 5e7 {
        return Err(SplitError::TooLarge(files.len()));
    }
    let mut cur = vec![0usize; files.len()];
    let mut best = (cur.clone(), split_mse(files, spec, &cur));
    loop {
        let mut i = 0;
        while i < cur.len() {
            cur[i] += 1;
            if cur[i] < k {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
        if i == cur.len() {
            return Ok(best);
        }
        let m = split_mse(files, spec, &cur);
        if m < best.1 {
            best = (cur.clone(), m);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitRow {
    pub name: String,
    pub target: f64,
    pub files: usize,
    pub inner: u64,
    pub outer: u64,
    /// Shares of the corpus totals, rounded to four decimals.
    pub inner_ratio: f64,
    pub outer_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TagKind {
    Inner,
    Outer,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairTest {
    pub a: String,
    pub b: String,
    pub kind: TagKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<WelchResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitReport {
    pub objective: String,
    pub mse: f64,
    pub splits: Vec<SplitRow>,
    pub tests: Vec<PairTest>,
    pub warnings: Vec<String>,
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

/// Welch test on per-file counts. Two constant samples with equal means
/// are identical and give `t = 0`, `p = 1`.
fn compare(a: &[f64], b: &[f64]) -> Result<WelchResult, SplitError> {
    let constant = |xs: &[f64]| xs.len() >= 2 && xs.iter().all(|&x| x == xs[0]);
    if constant(a) && constant(b) && a[0] == b[0] {
        return Ok(WelchResult { t: 0.0, df: (a.len() + b.len() - 2) as f64, p: 1.0 });
    }
    welch_t_test(a, b)
}

/// Per-split ratios and every pairwise Welch test on inner and outer
/// per-file counts. A pair with `p < 0.05` on either kind is reported as a
/// comparability warning.
pub fn verify_split(files: &[FileTagCounts], spec: &SplitSpec, split_of: &[usize]) -> SplitReport {
    let k = spec.len();
    let (inner_shares, outer_shares) = shares(split_of, files, k);
    let members: Vec<Vec<&FileTagCounts>> =
        (0..k).map(|s| files.iter().zip(split_of).filter(|(_, &x)| x == s).map(|(f, _)| f).collect()).collect();
    let splits = (0..k)
        .map(|s| SplitRow {
            name: spec.names()[s].clone(),
            target: spec.ratios()[s],
            files: members[s].len(),
            inner: members[s].iter().map(|f| f.inner).sum(),
            outer: members[s].iter().map(|f| f.outer).sum(),
            inner_ratio: round4(inner_shares[s]),
            outer_ratio: round4(outer_shares[s]),
        })
        .collect();
    let mut jobs = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            for kind in [TagKind::Inner, TagKind::Outer] {
                jobs.push((a, b, kind));
            }
        }
    }
    let tests: Vec<PairTest> = jobs
        .par_iter()
        .map(|&(a, b, kind)| {
            let values = |s: usize| -> Vec<f64> {
                members[s]
                    .iter()
                    .map(|f| match kind {
                        TagKind::Inner => f.inner as f64,
                        TagKind::Outer => f.outer as f64,
                    })
                    .collect()
            };
            let (result, note) = match compare(&values(a), &values(b)) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            PairTest { a: spec.names()[a].clone(), b: spec.names()[b].clone(), kind, result, note }
        })
        .collect();
    let mut warnings = Vec::new();
    for t in &tests {
        match (&t.result, &t.note) {
            (Some(r), _) if r.p < 0.05 => warnings.push(format!(
                "{} vs {} ({:?}): p = {:.4} < 0.05, splits may not be comparable",
                t.a, t.b, t.kind, r.p
            )),
            (None, Some(n)) => warnings.push(format!("{} vs {} ({:?}): not tested, {n}", t.a, t.b, t.kind)),
            _ => {}
        }
    }
    SplitReport {
        objective: "(MSE_inner + MSE_outer) / 2 with MSE = mean over splits of (share of corpus total - target ratio)^2"
            .into(),
        mse: split_mse(files, spec, split_of),
        splits,
        tests,
        warnings,
    }
}

impl SplitReport {
    pub fn render(&self) -> String {
        let mut s = format!("objective: {}\nmse: {:.8}\n\n", self.objective, self.mse);
        s.push_str(&format!(
            "{:<14} {:>7} {:>6} {:>10} {:>10} {:>11} {:>11}\n",
            "split", "target", "files", "inner", "outer", "inner ratio", "outer ratio"
        ));
        for r in &self.splits {
            s.push_str(&format!(
                "{:<14} {:>7.4} {:>6} {:>10} {:>10} {:>11.4} {:>11.4}\n",
                r.name, r.target, r.files, r.inner, r.outer, r.inner_ratio, r.outer_ratio
            ));
        }
        s.push('\n');
        s.push_str(&format!("{:<28} {:>6} {:>10} {:>10} {:>8}\n", "pair", "kind", "t", "df", "p"));
        for t in &self.tests {
            let pair = format!("{} vs {}", t.a, t.b);
            let kind = match t.kind {
                TagKind::Inner => "inner",
                TagKind::Outer => "outer",
            };
            match &t.result {
                Some(r) => s.push_str(&format!("{pair:<28} {kind:>6} {:>10.4} {:>10.4} {:>8.4}\n", r.t, r.df, r.p)),
                None => s.push_str(&format!("{pair:<28} {kind:>6} {:>10}\n", "n/a")),
            }
        }
        for w in &self.warnings {
            s.push_str(&format!("warning: {w}\n"));
        }
        s
    }
}

/// `{file id: split name}`.
pub fn assignment_map(files: &[FileTagCounts], spec: &SplitSpec, split_of: &[usize]) -> BTreeMap<String, String> {
    files.iter().zip(split_of).map(|(f, &s)| (f.id.clone(), spec.names()[s].clone())).collect()
}

/// `file<TAB>split<TAB>inner<TAB>outer` rows with a header.
pub fn assignment_manifest(files: &[FileTagCounts], spec: &SplitSpec, split_of: &[usize]) -> String {
    let mut s = String::from("file\tsplit\tinner\touter\n");
    for (f, &k) in files.iter().zip(split_of) {
        s.push_str(&format!("{}\t{}\t{}\t{}\n", f.id, spec.names()[k], f.inner, f.outer));
    }
    s
}
