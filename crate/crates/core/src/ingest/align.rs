use serde::Serialize;

use super::{is_punctuation, Diagnostic};
use crate::model::{Parallelism, ParallelismKind, ParallelismSet, Span};

/// Half-open range of Unicode scalar offsets, `start..end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CharSpan {
    pub start: usize,
    pub end: usize,
}

impl CharSpan {
    pub fn new(start: usize, end: usize) -> Self {
        CharSpan { start, end }
    }

    fn intersects(&self, other: &CharSpan) -> bool {
        self.start < other.end && other.start < self.end
    }
}

/// A parallelism whose branches are still character ranges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharParallelism {
    pub branches: Vec<CharSpan>,
    pub kind: ParallelismKind,
    /// Ids of the entities that formed the branches, in branch order.
    pub entities: Vec<String>,
}

/// Character range of every token in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenAlignment {
    ranges: Vec<CharSpan>,
}

impl TokenAlignment {
    /// Ranges must be non-empty, strictly increasing and non-overlapping.
    pub fn new(ranges: Vec<CharSpan>) -> Result<Self, String> {
        for (i, r) in ranges.iter().enumerate() {
            if r.start >= r.end {
                return Err(format!("token {} has an empty range {}..{}", i + 1, r.start, r.end));
            }
            if i > 0 && ranges[i - 1].end > r.start {
                return Err(format!("token {} overlaps or precedes token {}", i + 1, i));
            }
        }
        Ok(TokenAlignment { ranges })
    }

    /// Finds `tokens` in order inside `text`, skipping anything in between.
    pub fn locate<S: AsRef<str>>(text: &str, tokens: &[S]) -> Result<Self, String> {
        let chars: Vec<char> = text.chars().collect();
        let mut at = 0;
        let mut ranges = Vec::with_capacity(tokens.len());
        for (i, tok) in tokens.iter().enumerate() {
            let needle: Vec<char> = tok.as_ref().chars().collect();
            if needle.is_empty() {
                return Err(format!("token {} is empty", i + 1));
            }
            let found = (at..=chars.len().saturating_sub(needle.len()))
                .find(|&s| chars[s..s + needle.len()] == needle[..])
                .ok_or_else(|| format!("token {} {:?} not found after offset {at}", i + 1, tok.as_ref()))?;
            ranges.push(CharSpan::new(found, found + needle.len()));
            at = found + needle.len();
        }
        TokenAlignment::new(ranges)
    }

    pub fn ranges(&self) -> &[CharSpan] {
        &self.ranges
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    /// 1-based token span covering every token that intersects `chars`.
    pub fn token_span(&self, chars: CharSpan) -> Option<Span> {
        let first = self.ranges.partition_point(|r| r.end <= chars.start);
        let after = self.ranges.partition_point(|r| r.start < chars.end);
        if first >= after || !self.ranges[first].intersects(&chars) {
            return None;
        }
        Span::new(first + 1, after).ok()
    }
}

/// Whitespace tokenizer that also splits every punctuation character into
/// its own token.
pub fn simple_tokenize(text: &str) -> (Vec<String>, TokenAlignment) {
    let mut tokens = Vec::new();
    let mut ranges = Vec::new();
    let mut cur = String::new();
    let mut cur_start = 0;
    let mut flush = |cur: &mut String, start: usize, end: usize, tokens: &mut Vec<String>| {
        if !cur.is_empty() {
            tokens.push(std::mem::take(cur));
            ranges.push(CharSpan::new(start, end));
        }
    };
    let mut n = 0;
    for (i, c) in text.chars().enumerate() {
        n = i + 1;
        let mut buf = [0u8; 4];
        if c.is_whitespace() {
            flush(&mut cur, cur_start, i, &mut tokens);
        } else if is_punctuation(c.encode_utf8(&mut buf)) {
            flush(&mut cur, cur_start, i, &mut tokens);
            cur.push(c);
            flush(&mut cur, i, i + 1, &mut tokens);
        } else {
            if cur.is_empty() {
                cur_start = i;
            }
            cur.push(c);
        }
    }
    flush(&mut cur, cur_start, n, &mut tokens);
    let alignment = TokenAlignment::new(ranges).expect("tokenizer ranges are increasing");
    (tokens, alignment)
}

/// Sections split at blank lines (two or more newlines between tokens).
pub fn paragraph_sections(text: &str, alignment: &TokenAlignment) -> Vec<Span> {
    let chars: Vec<char> = text.chars().collect();
    let ranges = alignment.ranges();
    let mut sections = Vec::new();
    let mut start = 1;
    for i in 1..ranges.len() {
        let gap = &chars[ranges[i - 1].end..ranges[i].start];
        if gap.iter().filter(|&&c| c == '\n').count() >= 2 {
            sections.push(Span::new(start, i).expect("non-empty"));
            start = i + 1;
        }
    }
    if !ranges.is_empty() {
        sections.push(Span::new(start, ranges.len()).expect("non-empty"));
    }
    sections
}

/// Snaps every branch outward to whole tokens. Branches touching no token
/// and parallelisms left with fewer than two valid branches are dropped
/// with a diagnostic.
pub fn align_to_tokens(
    char_set: &[CharParallelism],
    alignment: &TokenAlignment,
) -> (ParallelismSet, Vec<Diagnostic>) {
    let mut out = Vec::new();
    let mut diags = Vec::new();
    for cp in char_set {
        let label = cp.entities.join("+");
        let mut spans = Vec::new();
        for (k, &b) in cp.branches.iter().enumerate() {
            match alignment.token_span(b) {
                Some(s) => spans.push(s),
                None => diags.push(Diagnostic::error(
                    None,
                    format!(
                        "branch {} ({}..{}) of {label} covers no token; dropped",
                        cp.entities.get(k).map(String::as_str).unwrap_or("?"),
                        b.start,
                        b.end
                    ),
                )),
            }
        }
        match Parallelism::new(spans, cp.kind) {
            Ok(p) => out.push(p),
            Err(e) => diags.push(Diagnostic::error(None, format!("parallelism {label} dropped: {e}"))),
        }
    }
    (ParallelismSet::new(out), diags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(branches: &[(usize, usize)]) -> CharParallelism {
        CharParallelism {
            branches: branches.iter().map(|&(s, e)| CharSpan::new(s, e)).collect(),
            kind: ParallelismKind::Synchystic,
            entities: (1..=branches.len()).map(|i| format!("T{i}")).collect(),
        }
    }

    #[test]
    fn tokenizer_splits_punctuation() {
        let (toks, al) = simple_tokenize("ueni, uidi");
        assert_eq!(toks, ["ueni", ",", "uidi"]);
        assert_eq!(al.ranges(), &[CharSpan::new(0, 4), CharSpan::new(4, 5), CharSpan::new(6, 10)]);
    }

    #[test]
    fn snapping() {
        let (_, al) = simple_tokenize("ueni, uidi");
        assert_eq!(al.token_span(CharSpan::new(0, 12)), Some(Span::new(1, 3).unwrap()));
        assert_eq!(al.token_span(CharSpan::new(4, 5)), Some(Span::new(2, 2).unwrap()));
        // partial token snaps outward
        assert_eq!(al.token_span(CharSpan::new(2, 7)), Some(Span::new(1, 3).unwrap()));
        // whitespace only
        assert_eq!(al.token_span(CharSpan::new(5, 6)), None);
    }

    #[test]
    fn whitespace_branch_is_dropped() {
        let (_, al) = simple_tokenize("ueni, uidi uici");
        let (set, diags) = align_to_tokens(&[cp(&[(0, 4), (5, 6), (6, 10)])], &al);
        assert_eq!(set.len(), 1);
        assert_eq!(set.as_slice()[0].branches().len(), 2);
        assert_eq!(diags.len(), 1);
        let (set, diags) = align_to_tokens(&[cp(&[(0, 4), (5, 6)])], &al);
        assert!(set.is_empty());
        assert_eq!(diags.len(), 2);
    }

    #[test]
    fn locate_tokens_and_unicode_offsets() {
        let al = TokenAlignment::locate("„quotidie dicimus", &["„", "quotidie", "dicimus"]).unwrap();
        assert_eq!(al.ranges()[1], CharSpan::new(1, 9));
        assert!(TokenAlignment::locate("a b", &["a", "c"]).is_err());
    }

    #[test]
    fn paragraphs_become_sections() {
        let text = "a b .\n\nc d\n e";
        let (_, al) = simple_tokenize(text);
        let secs = paragraph_sections(text, &al);
        assert_eq!(secs, vec![Span::new(1, 3).unwrap(), Span::new(4, 6).unwrap()]);
    }
}
