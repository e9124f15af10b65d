use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::AnalysisError;
use crate::metrics::{align, Metric, MetricError, Tally};
use crate::model::{Corpus, ParallelismSet};

/// One resampling unit: a matched pair, or an unmatched parallelism that
/// contributes its size to a single denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapItem {
    pub score: f64,
    pub size_g: f64,
    pub size_h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapReport {
    pub metric: Metric,
    /// F1 of the full population.
    pub f1: f64,
    pub mean: f64,
    pub std: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub trials: usize,
    pub seed: u64,
    pub population: usize,
}

/// Matched pairs plus unmatched reference and hypothesis parallelisms of
/// every document, in document order.
pub fn bootstrap_population(
    corpus: &Corpus,
    hypothesis: &str,
    metric: Metric,
) -> Result<Vec<BootstrapItem>, AnalysisError> {
    if !corpus.documents().iter().any(|d| d.hypothesis(hypothesis).is_some()) {
        return Err(MetricError::UnknownHypothesis(hypothesis.to_string()).into());
    }
    let empty = ParallelismSet::empty();
    let mut items = Vec::new();
    for doc in corpus.documents() {
        let h = doc.hypothesis(hypothesis).unwrap_or(&empty);
        let a = align(doc.reference(), h, metric);
        let mut used_g = vec![false; a.sizes_g.len()];
        let mut used_h = vec![false; a.sizes_h.len()];
        for p in &a.pairs {
            used_g[p.reference] = true;
            used_h[p.hypothesis] = true;
            items.push(BootstrapItem { score: p.score, size_g: a.sizes_g[p.reference], size_h: a.sizes_h[p.hypothesis] });
        }
        for (&s, _) in a.sizes_g.iter().zip(&used_g).filter(|(_, &u)| !u) {
            items.push(BootstrapItem { score: 0.0, size_g: s, size_h: 0.0 });
        }
        for (&s, _) in a.sizes_h.iter().zip(&used_h).filter(|(_, &u)| !u) {
            items.push(BootstrapItem { score: 0.0, size_g: 0.0, size_h: s });
        }
    }
    Ok(items)
}

fn f1_of<'a>(items: impl Iterator<Item = &'a BootstrapItem>) -> f64 {
    items
        .fold(Tally::default(), |t, i| t + Tally { m: i.score, size_g: i.size_g, size_h: i.size_h })
        .f1()
}

/// Linear-interpolation percentile of sorted data, `q` in `[0, 1]`.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Resamples `items` with replacement `trials` times. Trial `t` draws from
/// a ChaCha8 stream `t` under `seed`, so the result does not depend on
/// scheduling.
pub fn bootstrap_items(
    items: &[BootstrapItem],
    metric: Metric,
    trials: usize,
    seed: u64,
) -> Result<BootstrapReport, AnalysisError> {
    if items.is_empty() {
        return Err(AnalysisError::EmptyPopulation);
    }
    if trials == 0 {
        return Err(AnalysisError::ZeroTrials);
    }
    let n = items.len();
    let mut scores: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            f1_of((0..n).map(|_| &items[rng.random_range(0..n)]))
        })
        .collect();
    let (lo, hi) = scores.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    // the exact mean lies in [lo, hi]; clamping removes summation rounding
    let mean = (scores.iter().sum::<f64>() / trials as f64).clamp(lo, hi);
    let ss: f64 = scores.iter().map(|x| (x - mean).powi(2)).sum();
    let std = if trials > 1 { (ss / (trials - 1) as f64).sqrt() } else { 0.0 };
    scores.sort_by(f64::total_cmp);
    Ok(BootstrapReport {
        metric,
        f1: f1_of(items.iter()),
        mean,
        std,
        ci_lower: percentile(&scores, 0.025),
        ci_upper: percentile(&scores, 0.975),
        trials,
        seed,
        population: n,
    })
}

/// Agreement between the reference layer and a hypothesis layer, with a
/// percentile 95% confidence interval.
pub fn bootstrap_agreement(
    corpus: &Corpus,
    hypothesis: &str,
    metric: Metric,
    trials: usize,
    seed: u64,
) -> Result<BootstrapReport, AnalysisError> {
    let items = bootstrap_population(corpus, hypothesis, metric)?;
    bootstrap_items(&items, metric, trials, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Document, Parallelism, ParallelismKind};

    fn corpus(g: &[&[(usize, usize)]], h: &[&[(usize, usize)]]) -> Corpus {
        let set = |ps: &[&[(usize, usize)]]| -> ParallelismSet {
            ps.iter().map(|p| Parallelism::from_pairs(p, ParallelismKind::Unspecified).unwrap()).collect()
        };
        let d = Document::single_section("d", (0..20).map(|i| format!("w{i}")).collect())
            .unwrap()
            .with_reference(set(g))
            .unwrap()
            .with_hypothesis("h", set(h))
            .unwrap();
        Corpus::new("", vec![d]).unwrap()
    }

    #[test]
    fn perfect_agreement_has_zero_width() {
        let g: &[&[(usize, usize)]] = &[&[(1, 2), (4, 5)], &[(7, 8), (10, 12)]];
        let c = corpus(g, g);
        for metric in Metric::ALL {
            let r = bootstrap_agreement(&c, "h", metric, 200, 7).unwrap();
            assert_eq!((r.f1, r.mean, r.std, r.ci_lower, r.ci_upper), (1.0, 1.0, 0.0, 1.0, 1.0));
            assert_eq!(r.population, 2);
        }
    }

    #[test]
    fn population_layout() {
        let c = corpus(&[&[(1, 2), (4, 5)], &[(15, 16), (18, 19)]], &[&[(1, 2), (4, 6)], &[(8, 9), (11, 12)]]);
        let items = bootstrap_population(&c, "h", Metric::Mwo).unwrap();
        assert_eq!(items.len(), 3);
        assert_eq!(items[0], BootstrapItem { score: 4.0, size_g: 4.0, size_h: 5.0 });
        assert_eq!(items[1], BootstrapItem { score: 0.0, size_g: 4.0, size_h: 0.0 });
        assert_eq!(items[2], BootstrapItem { score: 0.0, size_g: 0.0, size_h: 4.0 });
    }

    #[test]
    fn seeded_runs_repeat() {
        let c = corpus(&[&[(1, 2), (4, 5)], &[(15, 16), (18, 19)]], &[&[(1, 2), (4, 6)], &[(8, 9), (11, 12)]]);
        let a = bootstrap_agreement(&c, "h", Metric::Mwo, 300, 42).unwrap();
        let b = bootstrap_agreement(&c, "h", Metric::Mwo, 300, 42).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.ci_lower <= a.mean && a.mean <= a.ci_upper);
        let other = bootstrap_agreement(&c, "h", Metric::Mwo, 300, 43).unwrap();
        assert_ne!(a.mean, other.mean);
    }

    #[test]
    fn errors() {
        assert_eq!(bootstrap_items(&[], Metric::Epm, 10, 0), Err(AnalysisError::EmptyPopulation));
        let item = [BootstrapItem { score: 1.0, size_g: 1.0, size_h: 1.0 }];
        assert_eq!(bootstrap_items(&item, Metric::Epm, 0, 0), Err(AnalysisError::ZeroTrials));
        let c = corpus(&[], &[]);
        assert!(bootstrap_agreement(&c, "nope", Metric::Epm, 10, 0).is_err());
        assert_eq!(bootstrap_agreement(&c, "h", Metric::Epm, 10, 0), Err(AnalysisError::EmptyPopulation));
    }

    #[test]
    fn percentile_matches_linear_interpolation() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&xs, 0.0), 1.0);
        assert_eq!(percentile(&xs, 1.0), 4.0);
        assert!((percentile(&xs, 0.025) - 1.075).abs() < 1e-12);
        assert!((percentile(&xs, 0.975) - 3.925).abs() < 1e-12);
    }
}
