use std::collections::HashMap;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use super::nlo::{branch_pairs, nlo_counts};
use crate::model::{Corpus, Parallelism, ParallelismSet};

/// Frequency counts over the reference layer.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub documents: usize,
    pub sections: usize,
    pub tokens: usize,
    pub branched_tokens: usize,
    pub branches: usize,
    pub nested_branches: usize,
    pub parallelisms: usize,
    pub nested_parallelisms: usize,
}

impl Add for DatasetSummary {
    type Output = DatasetSummary;
    fn add(self, o: Self) -> Self {
        DatasetSummary {
            documents: self.documents + o.documents,
            sections: self.sections + o.sections,
            tokens: self.tokens + o.tokens,
            branched_tokens: self.branched_tokens + o.branched_tokens,
            branches: self.branches + o.branches,
            nested_branches: self.nested_branches + o.nested_branches,
            parallelisms: self.parallelisms + o.parallelisms,
            nested_parallelisms: self.nested_parallelisms + o.nested_parallelisms,
        }
    }
}

impl DatasetSummary {
    pub fn render(&self, name: &str) -> String {
        let head = ["Dataset", "Documents", "Sections", "Tokens", "Branched Tokens", "Branches", "Parallelisms"];
        let row = [
            name.to_string(),
            self.documents.to_string(),
            self.sections.to_string(),
            self.tokens.to_string(),
            self.branched_tokens.to_string(),
            format!("{} ({})", self.branches, self.nested_branches),
            format!("{} ({})", self.parallelisms, self.nested_parallelisms),
        ];
        render_table(&head, &row)
    }
}

fn render_table(head: &[&str], row: &[String]) -> String {
    let widths: Vec<usize> = head.iter().zip(row).map(|(h, r)| h.chars().count().max(r.chars().count())).collect();
    let line = |cells: Vec<&str>| {
        cells.iter().zip(&widths).map(|(c, &w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
    };
    format!("{}\n{}\n", line(head.to_vec()), line(row.iter().map(String::as_str).collect()))
}

/// A parallelism is nested when one of its branches lies inside a branch
/// of another parallelism. Identical branches count once, for the later
/// parallelism.
fn nested_flags(set: &ParallelismSet) -> Vec<bool> {
    let ps = set.as_slice();
    (0..ps.len())
        .map(|p| {
            (0..ps.len()).any(|q| {
                q != p
                    && ps[q].branches().iter().any(|bq| {
                        ps[p].branches().iter().any(|bp| bq.contains(bp) && (bq != bp || q < p))
                    })
            })
        })
        .collect()
}

pub fn summarize(corpus: &Corpus) -> DatasetSummary {
    corpus
        .documents()
        .iter()
        .map(|d| {
            let set = d.reference();
            let nested = nested_flags(set);
            let nested_ps: Vec<&Parallelism> = set.iter().zip(&nested).filter(|(_, &n)| n).map(|(p, _)| p).collect();
            DatasetSummary {
                documents: 1,
                sections: d.sections().len(),
                tokens: d.len(),
                branched_tokens: set.branched_positions().len(),
                branches: set.iter().map(|p| p.branches().len()).sum(),
                nested_branches: nested_ps.iter().map(|p| p.branches().len()).sum(),
                parallelisms: set.len(),
                nested_parallelisms: nested_ps.len(),
            }
        })
        .fold(DatasetSummary::default(), Add::add)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StdKind {
    #[default]
    Sample,
    Population,
}

/// Mean and standard deviation of `count` observations; all zero when
/// `count` is 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

impl MeanStd {
    pub fn of(xs: &[f64], kind: StdKind) -> MeanStd {
        let n = xs.len();
        if n == 0 {
            return MeanStd::default();
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
        let denom = match kind {
            StdKind::Sample if n > 1 => (n - 1) as f64,
            StdKind::Sample => 1.0,
            StdKind::Population => n as f64,
        };
        MeanStd { mean, std: (ss / denom).sqrt(), count: n }
    }
}

impl std::fmt::Display for MeanStd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.2} ± {:.2}", self.mean, self.std)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedStats {
    pub parallelisms_per_section: MeanStd,
    pub branches_per_parallelism: MeanStd,
    /// Tokens strictly between consecutive branches of a parallelism.
    pub branch_distance: MeanStd,
    pub branch_size: MeanStd,
    pub nlo: MeanStd,
    /// Share of branch pairs with no lexical overlap, in percent.
    pub zero_overlap_percent: f64,
    pub std_kind: StdKind,
}

impl DerivedStats {
    pub fn render(&self, name: &str) -> String {
        let head = [
            "Dataset",
            "Parallelisms per Section",
            "Branches per Parallelism",
            "Branch Distance (Tokens)",
            "Branch Size (Tokens)",
            "NLO (Branches)",
            "% Pairs with No LO",
        ];
        let row = [
            name.to_string(),
            self.parallelisms_per_section.to_string(),
            self.branches_per_parallelism.to_string(),
            self.branch_distance.to_string(),
            self.branch_size.to_string(),
            self.nlo.to_string(),
            format!("{:.2}%", self.zero_overlap_percent),
        ];
        render_table(&head, &row)
    }
}

pub fn derived(corpus: &Corpus, kind: StdKind) -> DerivedStats {
    let mut per_section = Vec::new();
    let mut per_parallelism = Vec::new();
    let mut distance = Vec::new();
    let mut size = Vec::new();
    let mut overlap = Vec::new();
    let mut zero = 0usize;
    for doc in corpus.documents() {
        let mut counts = vec![0usize; doc.sections().len()];
        for p in doc.reference() {
            if let Some(k) = doc.section_of(p.extent()) {
                counts[k] += 1;
            }
            per_parallelism.push(p.branches().len() as f64);
            for w in p.branches().windows(2) {
                distance.push((w[1].start() - w[0].end() - 1) as f64);
            }
            size.extend(p.branches().iter().map(|b| b.len() as f64));
            for (a, b) in branch_pairs(doc, p) {
                let (i, u) = nlo_counts(a, b);
                if i == 0 {
                    zero += 1;
                }
                overlap.push(i as f64 / u as f64);
            }
        }
        per_section.extend(counts.into_iter().map(|c| c as f64));
    }
    DerivedStats {
        parallelisms_per_section: MeanStd::of(&per_section, kind),
        branches_per_parallelism: MeanStd::of(&per_parallelism, kind),
        branch_distance: MeanStd::of(&distance, kind),
        branch_size: MeanStd::of(&size, kind),
        nlo: MeanStd::of(&overlap, kind),
        zero_overlap_percent: if overlap.is_empty() { 0.0 } else { 100.0 * zero as f64 / overlap.len() as f64 },
        std_kind: kind,
    }
}

/// Token type frequencies over every document.
pub fn token_counts(corpus: &Corpus) -> HashMap<String, u64> {
    let mut counts = HashMap::new();
    for d in corpus.documents() {
        for t in d.tokens() {
            *counts.entry(t.clone()).or_insert(0) += 1;
        }
    }
    counts
}

/// `n1 / (n1 + 2 n2)` for singleton and doubleton type counts; 0 when
/// there are no singletons.
pub fn kneser_ney_replacement(counts: impl IntoIterator<Item = u64>) -> f64 {
    let (mut n1, mut n2) = (0u64, 0u64);
    for c in counts {
        match c {
            1 => n1 += 1,
            2 => n2 += 1,
            _ => {}
        }
    }
    if n1 == 0 {
        0.0
    } else {
        n1 as f64 / (n1 + 2 * n2) as f64
    }
}
