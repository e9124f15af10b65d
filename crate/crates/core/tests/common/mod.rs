//! Seeded generators shared by the property and acceptance suites.

#![allow(dead_code)]

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rpd_core::assignment::WeightMatrix;
use rpd_core::split::FileTagCounts;
use rpd_core::{Parallelism, ParallelismKind, ParallelismSet, SetClass, Span};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn span(s: usize, e: usize) -> Span {
    Span::new(s, e).unwrap()
}

/// Disjoint spans inside `region`; with `strict` none equals the region.
fn carve(rng: &mut impl Rng, region: Span, strict: bool) -> Vec<Span> {
    let mut out = Vec::new();
    let mut pos = region.start();
    while pos <= region.end() {
        pos += rng.random_range(0..3);
        let len = rng.random_range(1..=4);
        let end = pos + len - 1;
        if end > region.end() {
            break;
        }
        if !(strict && pos == region.start() && end == region.end()) {
            out.push(span(pos, end));
        }
        pos = end + 1;
    }
    out
}

/// Deals `spans` into parallelisms of at least two branches; leftovers are
/// dropped.
fn group(rng: &mut impl Rng, mut spans: Vec<Span>) -> Vec<Parallelism> {
    if spans.len() < 2 {
        return Vec::new();
    }
    spans.shuffle(rng);
    let k = rng.random_range(1..=spans.len() / 2);
    let mut groups: Vec<Vec<Span>> = vec![Vec::new(); k];
    for (i, s) in spans.into_iter().enumerate() {
        let g = if i < 2 * k { i / 2 } else { rng.random_range(0..k) };
        groups[g].push(s);
    }
    groups
        .into_iter()
        .map(|g| Parallelism::new(g, ParallelismKind::Unspecified).unwrap())
        .collect()
}

/// A flat or nested (never overlapping) set over `len` tokens, up to three
/// levels deep.
pub fn layered_set(rng: &mut impl Rng, len: usize, nest: bool) -> ParallelismSet {
    let mut all = Vec::new();
    let top = carve(rng, span(1, len), false);
    let mut level = group(rng, top);
    for _ in 0..3 {
        let mut next = Vec::new();
        if nest {
            for p in &level {
                if rng.random_bool(0.4) {
                    let inner: Vec<Span> =
                        p.branches().iter().flat_map(|&b| carve(rng, b, true)).collect();
                    let children = group(rng, inner);
                    next.extend(children);
                }
            }
        }
        all.extend(level);
        level = next;
    }
    let mut ps = all;
    ps.shuffle(rng);
    ParallelismSet::new(ps)
}

/// Unconstrained set over `len` tokens: branches of different parallelisms
/// may cross.
pub fn any_set(rng: &mut impl Rng, len: usize, max: usize) -> ParallelismSet {
    let n = rng.random_range(0..=max);
    (0..n)
        .map(|_| {
            let spans = carve(rng, span(1, len), false);
            let keep = rng.random_range(2..=spans.len().max(2));
            let picked: Vec<Span> = spans.choose_multiple(rng, keep).copied().collect();
            Parallelism::new(picked, ParallelismKind::Unspecified)
        })
        .filter_map(Result::ok)
        .collect()
}

/// Quadratic classifier over all branch pairs.
pub fn brute_classify(set: &ParallelismSet) -> SetClass {
    let all: Vec<Span> = set.iter().flat_map(|p| p.branches().iter().copied()).collect();
    let mut class = SetClass::Flat;
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            let (a, b) = (all[i], all[j]);
            let shared = a.start().max(b.start()) <= a.end().min(b.end());
            if !shared {
                continue;
            }
            let nested = (a.start() <= b.start() && b.end() <= a.end()) || (b.start() <= a.start() && a.end() <= b.end());
            if !nested {
                return SetClass::Overlapping;
            }
            class = SetClass::Nested;
        }
    }
    class
}

pub fn int_matrix(rng: &mut impl Rng, rows: usize, cols: usize, max: u32) -> WeightMatrix {
    WeightMatrix::from_fn(rows, cols, |_, _| f64::from(rng.random_range(0..=max))).unwrap()
}

pub fn tag_counts(rng: &mut impl Rng, files: usize) -> Vec<FileTagCounts> {
    (0..files)
        .map(|i| FileTagCounts {
            id: format!("f{i}"),
            inner: rng.random_range(0..=60),
            outer: rng.random_range(0..=40),
        })
        .collect()
}

pub fn normal_sample(rng: &mut impl Rng, n: usize, mean: f64, sd: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let (u, v): (f64, f64) = (rng.random_range(f64::EPSILON..1.0), rng.random());
            mean + sd * (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
        })
        .collect()
}
