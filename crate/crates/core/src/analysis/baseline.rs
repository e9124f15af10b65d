use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::nlo::nlo_counts;
use super::AnalysisError;
use crate::ingest::is_punctuation;
use crate::model::{Document, Parallelism, ParallelismKind, ParallelismSet, Span};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineConfig {
    /// Most tokens allowed between consecutive branches.
    pub max_gap: usize,
    pub min_len: usize,
    pub max_len: usize,
    /// Minimum NLO between consecutive branches; pairs with no overlap are
    /// never proposed, even at 0.
    pub threshold: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig { max_gap: 2, min_len: 2, max_len: 4, threshold: 0.3 }
    }
}

/// Exact NLO as a fraction `(intersection, union)`.
#[derive(Clone, Copy)]
struct Ratio(usize, usize);

impl Ratio {
    fn cmp(&self, o: &Ratio) -> Ordering {
        (self.0 * o.1).cmp(&(o.0 * self.1))
    }
}

/// Greedy lexical-overlap detector producing a flat set.
///
/// Scanning each section left to right, the first position that starts a
/// qualifying pair opens a parallelism with the best such pair (highest
/// NLO, then earliest and shortest second branch). The parallelism is then
/// extended with the best qualifying branch after its last branch until none
/// remains, and scanning resumes after it. Branches never start or end on
/// punctuation.
pub fn baseline_detect(doc: &Document, cfg: &BaselineConfig) -> Result<ParallelismSet, AnalysisError> {
    if !(0.0..=1.0).contains(&cfg.threshold) {
        return Err(AnalysisError::BadThreshold(cfg.threshold));
    }
    if cfg.min_len == 0 || cfg.min_len > cfg.max_len {
        return Err(AnalysisError::BadWindow(cfg.min_len, cfg.max_len));
    }
    let mut out = Vec::new();
    for sec in doc.sections() {
        let candidates = |start: usize| {
            (cfg.min_len..=cfg.max_len).filter_map(move |len| {
                let end = start + len - 1;
                (end <= sec.end() && !is_punctuation(doc.token(start)) && !is_punctuation(doc.token(end)))
                    .then(|| Span::new(start, end).expect("start >= 1"))
            })
        };
        let slice = |s: Span| &doc.tokens()[s.start() - 1..s.end()];
        let qualifies = |r: Ratio| r.0 > 0 && r.0 as f64 >= cfg.threshold * r.1 as f64;
        let best_after = |prev: Span| {
            let mut best: Option<(Ratio, Span)> = None;
            for start in prev.end() + 1..=(prev.end() + 1 + cfg.max_gap).min(sec.end()) {
                for next in candidates(start) {
                    let (i, u) = nlo_counts(slice(prev), slice(next));
                    let r = Ratio(i, u);
                    if qualifies(r) && best.as_ref().is_none_or(|(b, _)| r.cmp(b) == Ordering::Greater) {
                        best = Some((r, next));
                    }
                }
            }
            best
        };

        let mut pos = sec.start();
        while pos <= sec.end() {
            let mut opened: Option<(Ratio, Span, Span)> = None;
            for first in candidates(pos) {
                if let Some((r, second)) = best_after(first) {
                    if opened.as_ref().is_none_or(|(b, _, _)| r.cmp(b) == Ordering::Greater) {
                        opened = Some((r, first, second));
                    }
                }
            }
            let Some((_, first, second)) = opened else {
                pos += 1;
                continue;
            };
            let mut branches = vec![first, second];
            while let Some((_, next)) = best_after(*branches.last().expect("non-empty")) {
                branches.push(next);
            }
            pos = branches.last().expect("non-empty").end() + 1;
            out.push(Parallelism::new(branches, ParallelismKind::Unspecified).expect("branches are increasing"));
        }
    }
    Ok(ParallelismSet::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SERMON: &str = "quotidie dicimus hoc , et quotidie facimus , et quotidie fit in nobis .";

    fn doc(text: &str) -> Document {
        Document::single_section("d", text.split(' ').map(String::from).collect()).unwrap()
    }

    #[test]
    fn sermon_sentence() {
        let d = doc(SERMON);
        let set = baseline_detect(&d, &BaselineConfig::default()).unwrap();
        assert_eq!(set.len(), 1);
        let p = &set.as_slice()[0];
        assert_eq!(p.branches().len(), 3);
        for b in p.branches() {
            assert!(b.positions().any(|i| d.token(i) == "quotidie"), "{b}");
        }
        let pairs: Vec<(usize, usize)> = p.branches().iter().map(|b| (b.start(), b.end())).collect();
        assert_eq!(pairs, [(1, 2), (5, 6), (9, 10)]);
    }

    #[test]
    fn no_repeats_at_full_threshold() {
        let d = doc("a b c d e f g h i j");
        let cfg = BaselineConfig { threshold: 1.0, ..Default::default() };
        assert!(baseline_detect(&d, &cfg).unwrap().is_empty());
        let cfg = BaselineConfig { threshold: 0.0, ..Default::default() };
        assert!(baseline_detect(&d, &cfg).unwrap().is_empty());
    }

    #[test]
    fn invalid_config() {
        let d = doc("a b");
        let cfg = BaselineConfig { threshold: 1.5, ..Default::default() };
        assert_eq!(baseline_detect(&d, &cfg), Err(AnalysisError::BadThreshold(1.5)));
        let cfg = BaselineConfig { min_len: 3, max_len: 2, ..Default::default() };
        assert!(baseline_detect(&d, &cfg).is_err());
    }

    #[test]
    fn output_is_flat_and_valid() {
        let d = doc("a b a b a b x y x y . a b a b");
        let set = baseline_detect(&d, &BaselineConfig::default()).unwrap();
        assert!(!set.is_empty());
        assert_eq!(set.classify(), crate::model::SetClass::Flat);
        d.check_set(&set).unwrap();
    }
}
