use crate::model::{ParallelismSet, Span};

use super::{assign_strata, LinkType, Symbol, Tag, TagScheme, TagSequence, TaggingError};

/// Link from `cur` back to `prev`. `stratum_branches` is every branch on the
/// stratum, sorted by `(start, end)`; it is only consulted for branch links.
pub fn compute_link(
    prev: Span,
    cur: Span,
    link: LinkType,
    stratum_branches: &[Span],
) -> Result<i64, TaggingError> {
    if prev.end() >= cur.start() {
        return Err(TaggingError::NotPreceding);
    }
    match link {
        LinkType::Token => Ok(prev.end() as i64 - cur.start() as i64),
        LinkType::Branch => {
            let at = |s: Span| stratum_branches.binary_search(&s).map_err(|_| TaggingError::NotPreceding);
            let (i, j) = (at(prev)?, at(cur)?);
            Ok(-((j - i) as i64))
        }
    }
}

/// Tags a section of `len` tokens. `set` must use section-local positions.
pub fn encode(len: usize, set: &ParallelismSet, scheme: TagScheme) -> Result<TagSequence, TaggingError> {
    let strata = assign_strata(set)?;
    let depth = strata.iter().copied().max().unwrap_or(1);
    let mut rows = Vec::with_capacity(depth);
    for level in 1..=depth {
        let members: Vec<usize> = (0..set.len()).filter(|&i| strata[i] == level).collect();
        rows.push(encode_row(len, set, &members, level, scheme)?);
    }
    TagSequence::new(len, rows)
}

fn encode_row(
    len: usize,
    set: &ParallelismSet,
    members: &[usize],
    level: usize,
    scheme: TagScheme,
) -> Result<Vec<Tag>, TaggingError> {
    let mut all: Vec<Span> = members
        .iter()
        .flat_map(|&m| set.as_slice()[m].branches().iter().copied())
        .collect();
    all.sort();
    for w in all.windows(2) {
        if w[0].overlaps(&w[1]) {
            return Err(TaggingError::Collision(w[0].to_string(), w[1].to_string(), level));
        }
    }
    if let Some(last) = all.last() {
        if last.end() > len {
            return Err(TaggingError::Invalid {
                stratum: level,
                token: last.end(),
                message: format!("branch {last} extends past the section end ({len})"),
            });
        }
    }

    let mut row = vec![Tag::O; len];
    if scheme.use_m {
        for &m in members {
            for w in set.as_slice()[m].branches().windows(2) {
                for pos in w[0].end() + 1..w[1].start() {
                    row[pos - 1] = Tag::plain(Symbol::M);
                }
            }
        }
    }
    for &m in members {
        let branches = set.as_slice()[m].branches();
        for (k, &b) in branches.iter().enumerate() {
            row[b.start() - 1] = if k == 0 {
                Tag::plain(Symbol::B)
            } else {
                Tag::linked(compute_link(branches[k - 1], b, scheme.link, &all)?)
            };
            let interior = if k > 0 && scheme.use_j { Symbol::J } else { Symbol::I };
            for pos in b.start() + 1..=b.end() {
                row[pos - 1] = Tag::plain(interior);
            }
            if scheme.use_e && b.len() >= 2 {
                row[b.end() - 1] = Tag::plain(Symbol::E);
            }
        }
    }
    // M may only fill gaps outside every branch of this stratum, and the
    // branch pass above overwrote any M placed inside one
    Ok(row)
}
