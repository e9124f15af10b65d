//! Maximum-weight bipartite matching.
//!
//! The solver is the O(n³) shortest-augmenting-path form of Kuhn-Munkres
//! with row/column potentials, run on a square matrix padded with zero
//! weights. Padding is sound because every weight is non-negative.

use thiserror::Error;

/// Weights at or below this are treated as zero when counting positive pairs.
pub const POSITIVE_EPS: f64 = 1e-9;

/// Largest side accepted by [`brute_force_matching`].
pub const BRUTE_FORCE_MAX_SIDE: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssignmentError {
    #[error("weight at ({row}, {col}) is {value}; weights must be finite and non-negative")]
    BadWeight { row: usize, col: usize, value: f64 },
    #[error("expected {expected} weights for a {rows}x{cols} matrix, got {got}")]
    Shape { rows: usize, cols: usize, expected: usize, got: usize },
    #[error("ragged matrix: row {row} has {got} columns, expected {expected}")]
    Ragged { row: usize, expected: usize, got: usize },
    #[error("{rows}x{cols} is too large for exhaustive enumeration (max side {BRUTE_FORCE_MAX_SIDE})")]
    TooLarge { rows: usize, cols: usize },
}

/// Dense row-major matrix of non-negative finite weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl WeightMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, AssignmentError> {
        if data.len() != rows * cols {
            return Err(AssignmentError::Shape { rows, cols, expected: rows * cols, got: data.len() });
        }
        for (i, &value) in data.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(AssignmentError::BadWeight { row: i / cols, col: i % cols, value });
            }
        }
        Ok(WeightMatrix { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, AssignmentError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(AssignmentError::Ragged { row: i, expected: cols, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        WeightMatrix::new(rows.len(), cols, data)
    }

    /// Builds a matrix from a weight function; the function must return
    /// non-negative finite values.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, AssignmentError> {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        WeightMatrix::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    fn without(&self, drop_rows: &[usize], drop_cols: &[usize]) -> (WeightMatrix, Vec<usize>, Vec<usize>) {
        let keep_r: Vec<usize> = (0..self.rows).filter(|r| !drop_rows.contains(r)).collect();
        let keep_c: Vec<usize> = (0..self.cols).filter(|c| !drop_cols.contains(c)).collect();
        let mut data = Vec::with_capacity(keep_r.len() * keep_c.len());
        for &r in &keep_r {
            for &c in &keep_c {
                data.push(self.get(r, c));
            }
        }
        (WeightMatrix { rows: keep_r.len(), cols: keep_c.len(), data }, keep_r, keep_c)
    }
}

/// A partial injection from rows to columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// `(row, col)` pairs sorted by row.
    pub pairs: Vec<(usize, usize)>,
    pub total_weight: f64,
}

impl Matching {
    fn empty() -> Self {
        Matching { pairs: Vec::new(), total_weight: 0.0 }
    }

    /// Column matched to `row`, if any.
    pub fn col_of(&self, row: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.0 == row).map(|p| p.1)
    }

    pub fn row_of(&self, col: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.1 == col).map(|p| p.0)
    }

    fn positive_pairs(&self, w: &WeightMatrix) -> usize {
        self.pairs.iter().filter(|&&(r, c)| w.get(r, c) > POSITIVE_EPS).count()
    }
}

/// Maximum-weight matching. Pairs of zero weight are left out of the result.
pub fn max_weight_matching(w: &WeightMatrix) -> Matching {
    let n = w.rows.max(w.cols);
    if n == 0 || w.rows == 0 || w.cols == 0 {
        return Matching::empty();
    }
    let max = w.data.iter().copied().fold(0.0_f64, f64::max);
    let cost = |i: usize, j: usize| -> f64 {
        if i < w.rows && j < w.cols {
            max - w.get(i, j)
        } else {
            max
        }
    };

    // 1-based arrays; index 0 is the virtual root column.
    let inf = f64::INFINITY;
    let mut u = vec![0.0_f64; n + 1];
    let mut v = vec![0.0_f64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    #[cfg(debug_assertions)]
    {
        // complementary slackness: reduced costs are non-negative and
        // vanish on the chosen assignment
        let tol = 1e-7 * (1.0 + max);
        for (i, &ui) in u.iter().enumerate().skip(1) {
            for (j, &vj) in v.iter().enumerate().skip(1) {
                debug_assert!(cost(i - 1, j - 1) - ui - vj >= -tol, "dual infeasible");
            }
        }
        for j in 1..=n {
            debug_assert!((cost(p[j] - 1, j - 1) - u[p[j]] - v[j]).abs() <= tol, "slackness violated");
        }
    }

    let mut pairs: Vec<(usize, usize)> = (1..=n)
        .filter_map(|j| {
            let (r, c) = (p[j] - 1, j - 1);
            (r < w.rows && c < w.cols && w.get(r, c) > 0.0).then_some((r, c))
        })
        .collect();
    pairs.sort_unstable();
    let total_weight = pairs.iter().map(|&(r, c)| w.get(r, c)).sum();
    Matching { pairs, total_weight }
}

/// Best matching that contains at least `k` pairs of strictly positive
/// weight, or `None` when no such matching exists.
///
/// If the plain optimum already has `k` positive pairs it is returned.
/// Otherwise every set of `k` disjoint positive cells is tried as a forced
/// seed, and the remaining rows and columns are solved without constraint.
/// Any optimal constrained matching contains some seed, so this is exact.
pub fn constrained_matching(w: &WeightMatrix, k: usize) -> Option<Matching> {
    let best = max_weight_matching(w);
    if best.positive_pairs(w) >= k {
        return Some(best);
    }
    if k > w.rows.min(w.cols) {
        return None;
    }
    let positives: Vec<(usize, usize)> = (0..w.rows)
        .flat_map(|r| (0..w.cols).map(move |c| (r, c)))
        .filter(|&(r, c)| w.get(r, c) > POSITIVE_EPS)
        .collect();

    let mut result: Option<Matching> = None;
    let mut seed: Vec<(usize, usize)> = Vec::with_capacity(k);
    fn walk(
        w: &WeightMatrix,
        positives: &[(usize, usize)],
        from: usize,
        k: usize,
        seed: &mut Vec<(usize, usize)>,
        result: &mut Option<Matching>,
    ) {
        if seed.len() == k {
            let rows: Vec<usize> = seed.iter().map(|s| s.0).collect();
            let cols: Vec<usize> = seed.iter().map(|s| s.1).collect();
            let (rest, keep_r, keep_c) = w.without(&rows, &cols);
            let sub = max_weight_matching(&rest);
            let mut pairs: Vec<(usize, usize)> = seed.clone();
            pairs.extend(sub.pairs.iter().map(|&(r, c)| (keep_r[r], keep_c[c])));
            pairs.sort_unstable();
            let total: f64 = pairs.iter().map(|&(r, c)| w.get(r, c)).sum();
            if result.as_ref().is_none_or(|m| total > m.total_weight) {
                *result = Some(Matching { pairs, total_weight: total });
            }
            return;
        }
        for i in from..positives.len() {
            let (r, c) = positives[i];
            if seed.iter().any(|&(sr, sc)| sr == r || sc == c) {
                continue;
            }
            seed.push((r, c));
            walk(w, positives, i + 1, k, seed, result);
            seed.pop();
        }
    }
    walk(w, &positives, 0, k, &mut seed, &mut result);
    result
}

/// Weight of [`constrained_matching`], or 0 when the constraint cannot be met.
pub fn max_weight_matching_with_min_positive(w: &WeightMatrix, k: usize) -> f64 {
    constrained_matching(w, k).map_or(0.0, |m| m.total_weight)
}

/// Exhaustive search over all partial injections; the reference the
/// polynomial solver is checked against.
pub fn brute_force_matching(w: &WeightMatrix, k: usize) -> Result<f64, AssignmentError> {
    if w.rows > BRUTE_FORCE_MAX_SIDE || w.cols > BRUTE_FORCE_MAX_SIDE {
        return Err(AssignmentError::TooLarge { rows: w.rows, cols: w.cols });
    }
    fn go(w: &WeightMatrix, row: usize, used: u32, positive: usize, acc: f64, k: usize, best: &mut Option<f64>) {
        if row == w.rows {
            if positive >= k && best.is_none_or(|b| acc > b) {
                *best = Some(acc);
            }
            return;
        }
        go(w, row + 1, used, positive, acc, k, best);
        for c in 0..w.cols {
            if used & (1 << c) != 0 {
                continue;
            }
            let x = w.get(row, c);
            let pos = positive + usize::from(x > POSITIVE_EPS);
            go(w, row + 1, used | (1 << c), pos, acc + x, k, best);
        }
    }
    let mut best = None;
    go(w, 0, 0, 0, 0.0, k, &mut best);
    Ok(best.unwrap_or(0.0))
}
