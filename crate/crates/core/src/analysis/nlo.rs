use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;

use super::AnalysisError;
use crate::model::{Corpus, Document, Parallelism};

/// `(|a ∩ b|, |a ∪ b|)` over token multisets.
pub fn nlo_counts<T: Eq + Hash>(a: &[T], b: &[T]) -> (usize, usize) {
    let mut counts: HashMap<&T, (usize, usize)> = HashMap::new();
    for t in a {
        counts.entry(t).or_default().0 += 1;
    }
    for t in b {
        counts.entry(t).or_default().1 += 1;
    }
    counts.values().fold((0, 0), |(i, u), &(x, y)| (i + x.min(y), u + x.max(y)))
}

/// Normalized lexical overlap: multiset intersection over multiset union.
pub fn nlo<T: Eq + Hash>(a: &[T], b: &[T]) -> Result<f64, AnalysisError> {
    if a.is_empty() || b.is_empty() {
        return Err(AnalysisError::EmptyBranch);
    }
    let (i, u) = nlo_counts(a, b);
    Ok(i as f64 / u as f64)
}

/// Token slices of every unordered branch pair within `p`.
pub fn branch_pairs<'d>(doc: &'d Document, p: &Parallelism) -> Vec<(&'d [String], &'d [String])> {
    let slices: Vec<&[String]> = p.branches().iter().map(|b| &doc.tokens()[b.start() - 1..b.end()]).collect();
    let mut out = Vec::new();
    for i in 0..slices.len() {
        for j in i + 1..slices.len() {
            out.push((slices[i], slices[j]));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NloHistogram {
    /// Lower edge of every bin; the last bin is closed on the right.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub percent: Vec<f64>,
    pub pairs: u64,
}

impl NloHistogram {
    /// `bin,count,percent` rows.
    pub fn to_csv(&self) -> String {
        let width = 1.0 / self.counts.len() as f64;
        let mut s = String::from("bin,count,percent\n");
        let last = self.counts.len() - 1;
        for (k, (&c, &p)) in self.counts.iter().zip(&self.percent).enumerate() {
            let close = if k == last { ']' } else { ')' };
            s.push_str(&format!("[{:.2};{:.2}{close},{c},{p:.4}\n", self.edges[k], self.edges[k] + width));
        }
        s
    }
}

/// Histogram of NLO over every within-parallelism branch pair of the
/// reference layer. Bin `k` holds values in `[k/bins, (k+1)/bins)`, and 1.0
/// goes to the last bin. Binning uses exact integer arithmetic.
pub fn nlo_histogram(corpus: &Corpus, bins: usize) -> NloHistogram {
    let bins = bins.max(1);
    let mut counts = vec![0u64; bins];
    for doc in corpus.documents() {
        for p in doc.reference() {
            for (a, b) in branch_pairs(doc, p) {
                let (i, u) = nlo_counts(a, b);
                counts[(bins * i / u).min(bins - 1)] += 1;
            }
        }
    }
    let pairs: u64 = counts.iter().sum();
    let percent = counts
        .iter()
        .map(|&c| if pairs == 0 { 0.0 } else { 100.0 * c as f64 / pairs as f64 })
        .collect();
    NloHistogram { edges: (0..bins).map(|k| k as f64 / bins as f64).collect(), counts, percent, pairs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ParallelismKind, ParallelismSet};

    #[test]
    fn examples() {
        assert_eq!(nlo(&["a", "b", "c"], &["a", "b", "c"]).unwrap(), 1.0);
        assert_eq!(nlo(&["a", "b", "c"], &["d", "e"]).unwrap(), 0.0);
        assert_eq!(nlo(&["a", "b", "c"], &["a", "b", "d"]).unwrap(), 0.5);
        assert_eq!(nlo(&["a", "a", "b"], &["a", "b", "b"]).unwrap(), 0.5);
        assert_eq!(nlo::<&str>(&[], &["a"]), Err(AnalysisError::EmptyBranch));
    }

    fn corpus(tokens: &str, ps: &[&[(usize, usize)]]) -> Corpus {
        let doc = Document::single_section("d", tokens.split(' ').map(String::from).collect()).unwrap();
        let set: ParallelismSet =
            ps.iter().map(|p| Parallelism::from_pairs(p, ParallelismKind::Unspecified).unwrap()).collect();
        Corpus::new("", vec![doc.with_reference(set).unwrap()]).unwrap()
    }

    #[test]
    fn histogram_bins() {
        let h = nlo_histogram(&corpus("a b c a b d", &[&[(1, 3), (4, 6)]]), 10);
        assert_eq!(h.counts[5], 1);
        assert_eq!(h.pairs, 1);
        let h = nlo_histogram(&corpus("a b a b", &[&[(1, 2), (3, 4)]]), 10);
        assert_eq!(h.counts[9], 1);
        let h = nlo_histogram(&Corpus::new("", vec![]).unwrap(), 10);
        assert!(h.counts.iter().all(|&c| c == 0));
        assert!(h.percent.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn histogram_counts_all_pairs() {
        let c = corpus("a b c d e f g", &[&[(1, 1), (3, 3), (5, 5)], &[(2, 2), (4, 4)]]);
        let h = nlo_histogram(&c, 10);
        assert_eq!(h.pairs, 3 + 1);
        assert!((h.percent.iter().sum::<f64>() - 100.0).abs() < 1e-9);
        assert!(h.to_csv().starts_with("bin,count,percent\n[0.00;0.10),4,100.0000\n"));
    }
}
