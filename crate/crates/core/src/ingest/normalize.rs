//! Annotation clean-up passes. Every pass returns a set that satisfies the
//! core invariants for the same document.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use unicode_general_category::{get_general_category, GeneralCategory};

use crate::model::{Document, Parallelism, ParallelismKind, ParallelismSet, Span};

/// True when `token` is non-empty and made only of Unicode punctuation.
pub fn is_punctuation(token: &str) -> bool {
    !token.is_empty()
        && token.chars().all(|c| {
            matches!(
                get_general_category(c),
                GeneralCategory::ConnectorPunctuation
                    | GeneralCategory::DashPunctuation
                    | GeneralCategory::OpenPunctuation
                    | GeneralCategory::ClosePunctuation
                    | GeneralCategory::InitialPunctuation
                    | GeneralCategory::FinalPunctuation
                    | GeneralCategory::OtherPunctuation
            )
        })
}

/// Per-language defaults for the normalizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    #[default]
    Latin,
    Chinese,
}

impl Language {
    /// Default conjunction lexicon. Replaceable through configuration.
    pub fn conjunctions(&self) -> &'static [&'static str] {
        match self {
            Language::Latin => &["et", "atque", "ac", "aut", "uel", "nec", "neque", "sed"],
            Language::Chinese => &["而", "且", "与", "及", "和", "或", "并"],
        }
    }

    /// Latin input is lowercased at ingest.
    pub fn lowercase(&self) -> bool {
        matches!(self, Language::Latin)
    }
}

impl FromStr for Language {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "latin" | "la" => Ok(Language::Latin),
            "chinese" | "zh" => Ok(Language::Chinese),
            other => Err(format!("unknown language {other:?} (expected latin or chinese)")),
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Language::Latin => "latin",
            Language::Chinese => "chinese",
        })
    }
}

fn rebuild(branches: Vec<Span>, kind: ParallelismKind) -> Option<Parallelism> {
    Parallelism::new(branches, kind).ok()
}

/// Trims punctuation tokens from both edges of every branch.
pub fn strip_punctuation(set: &ParallelismSet, doc: &Document, punct: impl Fn(&str) -> bool) -> ParallelismSet {
    set.iter()
        .filter_map(|p| {
            let branches = p
                .branches()
                .iter()
                .filter_map(|b| {
                    let (mut s, mut e) = (b.start(), b.end());
                    while s <= e && punct(doc.token(s)) {
                        s += 1;
                    }
                    while e >= s && punct(doc.token(e)) {
                        e -= 1;
                    }
                    Span::new(s, e).ok().filter(|_| s <= e)
                })
                .collect();
            rebuild(branches, p.kind())
        })
        .collect()
}

/// Keeps conjunctions only when every branch has one.
///
/// A branch has a conjunction when it starts with one, or when the token just
/// before it is one, lies in the same section and is not part of a sibling
/// branch. If every branch has one, branches are extended left to include
/// it; otherwise leading conjunctions are removed. The rule is applied until
/// it no longer changes the set, which makes the pass idempotent.
pub fn normalize_conjunctions(set: &ParallelismSet, doc: &Document, conj: impl Fn(&str) -> bool) -> ParallelismSet {
    let mut cur: Vec<Parallelism> = set.iter().cloned().collect();
    loop {
        let next: Vec<Parallelism> = cur.iter().filter_map(|p| conjunction_pass(p, doc, &conj)).collect();
        if next == cur {
            return ParallelismSet::new(next);
        }
        cur = next;
    }
}

fn conjunction_pass(p: &Parallelism, doc: &Document, conj: &impl Fn(&str) -> bool) -> Option<Parallelism> {
    let branches = p.branches();
    let starts_with = |b: &Span| conj(doc.token(b.start()));
    let preceded_by = |b: &Span| {
        let prev = b.start() - 1;
        prev >= 1
            && doc.section_at(prev) == doc.section_at(b.start())
            && conj(doc.token(prev))
            && !branches.iter().any(|o| o.positions().contains(&prev))
    };
    let all = branches.iter().all(|b| starts_with(b) || preceded_by(b));
    let out: Vec<Span> = if all {
        branches
            .iter()
            .map(|b| if starts_with(b) { *b } else { Span::new(b.start() - 1, b.end()).expect("prev >= 1") })
            .collect()
    } else {
        branches
            .iter()
            .filter_map(|b| {
                let mut s = b.start();
                while s <= b.end() && conj(doc.token(s)) {
                    s += 1;
                }
                (s <= b.end()).then(|| Span::new(s, b.end()).expect("non-empty"))
            })
            .collect()
    };
    rebuild(out, p.kind())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CollapseRule {
    /// Two parallelisms with alternating adjacent branches merged into one.
    Interlocking,
    /// Merged branches duplicated an existing parallelism; both removed.
    InterlockingDuplicate,
    /// A parallelism whose adjacent branches exactly tile a branch of
    /// another parallelism was removed.
    Absorbed,
}

/// One change made by [`collapse_interlocking`], for auditing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollapseEvent {
    pub rule: CollapseRule,
    pub removed: Vec<Vec<(usize, usize)>>,
    pub added: Option<Vec<(usize, usize)>>,
}

fn pairs(p: &Parallelism) -> Vec<(usize, usize)> {
    p.branches().iter().map(|b| (b.start(), b.end())).collect()
}

/// Collapses interlocking parallelisms into larger branches.
///
/// Two parallelisms with the same number of branches interlock when their
/// branches alternate `p1 q1 p2 q2 ...` and each `p_i`, `q_i` pair is
/// separated by at most `slack` non-punctuation tokens. They are replaced by
/// one parallelism whose branches cover each pair, or removed when that
/// parallelism already exists. A parallelism whose branches are pairwise
/// adjacent and together cover exactly one branch of another parallelism is
/// removed as a finer reading of that branch.
pub fn collapse_interlocking(
    set: &ParallelismSet,
    doc: &Document,
    punct: impl Fn(&str) -> bool,
    slack: usize,
) -> (ParallelismSet, Vec<CollapseEvent>) {
    let adjacent = |a: Span, b: Span| {
        a.end() < b.start()
            && doc.section_at(a.end()) == doc.section_at(b.start())
            && (a.end() + 1..b.start()).filter(|&i| !punct(doc.token(i))).count() <= slack
    };
    let mut ps: Vec<Parallelism> = set.iter().cloned().collect();
    let mut events = Vec::new();
    'outer: loop {
        for i in 0..ps.len() {
            for j in i + 1..ps.len() {
                let Some(merged) = interlock(&ps[i], &ps[j], &adjacent) else { continue };
                let removed = vec![pairs(&ps[i]), pairs(&ps[j])];
                let duplicate = ps.iter().enumerate().any(|(k, r)| k != i && k != j && r.same_branches(&merged));
                if duplicate {
                    events.push(CollapseEvent { rule: CollapseRule::InterlockingDuplicate, removed, added: None });
                    ps.remove(j);
                    ps.remove(i);
                } else {
                    events.push(CollapseEvent {
                        rule: CollapseRule::Interlocking,
                        removed,
                        added: Some(pairs(&merged)),
                    });
                    ps[i] = merged;
                    ps.remove(j);
                }
                continue 'outer;
            }
        }
        for q in 0..ps.len() {
            let b = ps[q].branches();
            if !b.windows(2).all(|w| adjacent(w[0], w[1])) {
                continue;
            }
            let hull = ps[q].extent();
            let absorbed = ps.iter().enumerate().any(|(r, o)| r != q && o.branches().contains(&hull));
            if absorbed {
                events.push(CollapseEvent { rule: CollapseRule::Absorbed, removed: vec![pairs(&ps[q])], added: None });
                ps.remove(q);
                continue 'outer;
            }
        }
        break;
    }
    (ParallelismSet::new(ps), events)
}

fn interlock(p: &Parallelism, q: &Parallelism, adjacent: &impl Fn(Span, Span) -> bool) -> Option<Parallelism> {
    let (a, b) = (p.branches(), q.branches());
    if a.len() != b.len() {
        return None;
    }
    let (first, second) = if a[0] < b[0] { (a, b) } else { (b, a) };
    let mut merged = Vec::with_capacity(a.len());
    for k in 0..a.len() {
        if !adjacent(first[k], second[k]) {
            return None;
        }
        if k + 1 < a.len() && second[k].end() >= first[k + 1].start() {
            return None;
        }
        merged.push(Span::new(first[k].start(), second[k].end()).expect("ordered"));
    }
    let kind = if p.kind() == q.kind() { p.kind() } else { ParallelismKind::Unspecified };
    Parallelism::new(merged, kind).ok()
}
