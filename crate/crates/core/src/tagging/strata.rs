use crate::model::{ParallelismSet, SetClass};

use super::TaggingError;

/// Stratum (1-based) of every parallelism, in set order.
///
/// A parallelism sits one stratum below the deepest parallelism that
/// contains one of its branches. On chains of nesting this equals one plus
/// the number of containing parallelisms. Identical branches shared by two
/// parallelisms count as containment by the earlier one.
pub fn assign_strata(set: &ParallelismSet) -> Result<Vec<usize>, TaggingError> {
    if set.classify() == SetClass::Overlapping {
        return Err(TaggingError::Overlapping);
    }
    let ps = set.as_slice();
    let n = ps.len();
    // parents[p] = parallelisms containing p
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    for q in 0..n {
        for p in 0..n {
            if p == q {
                continue;
            }
            let contains = ps[q].branches().iter().any(|bq| {
                ps[p].branches().iter().any(|bp| bq.contains(bp) && (bq != bp || q < p))
            });
            if contains {
                parents[p].push(q);
            }
        }
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let mut depth = vec![0usize; n];
    let mut mark = vec![Mark::New; n];
    fn visit(
        p: usize,
        parents: &[Vec<usize>],
        depth: &mut [usize],
        mark: &mut [Mark],
    ) -> Result<usize, TaggingError> {
        if mark[p] == Mark::Done {
            return Ok(depth[p]);
        }
        mark[p] = Mark::Active;
        let mut d = 1;
        for &q in &parents[p] {
            if mark[q] == Mark::Active {
                return Err(TaggingError::CyclicNesting(p.min(q), p.max(q)));
            }
            d = d.max(visit(q, parents, depth, mark)? + 1);
        }
        mark[p] = Mark::Done;
        depth[p] = d;
        Ok(d)
    }
    for p in 0..n {
        visit(p, &parents, &mut depth, &mut mark)?;
    }
    Ok(depth)
}
