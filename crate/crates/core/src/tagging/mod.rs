//! Link-augmented BIO tagging of parallelism sets.
//!
//! A tagset is BIO plus any combination of three extra tags:
//!
//! * `M` marks non-branch tokens between branches of one parallelism,
//! * `E` marks the last token of a multi-token branch,
//! * `J` replaces `I` inside every non-initial branch.
//!
//! The `B` of each non-initial branch carries a negative link to the
//! preceding branch of its parallelism, counted either in tokens
//! (`prev.end - cur.start`) or in branches of the same stratum. Nested
//! parallelisms go on additional tag rows (strata); stratum 1 is outermost.

mod decode;
mod encode;
mod strata;
mod transitions;

pub use decode::{decode, DecodeMode, Decoded};
pub use encode::{compute_link, encode};
pub use strata::assign_strata;
pub use transitions::{TransitionSymbol, TransitionTable};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaggingError {
    #[error("unencodable: overlapping parallelisms")]
    Overlapping,
    #[error("unencodable: parallelisms {0} and {1} nest inside each other in opposite directions")]
    CyclicNesting(usize, usize),
    #[error("branches {0} and {1} collide on stratum {2}")]
    Collision(String, String, usize),
    #[error("link requires the previous branch to end before the current one starts")]
    NotPreceding,
    #[error("unknown tagging scheme {0:?}")]
    UnknownScheme(String),
    #[error("malformed tag {0:?}")]
    BadTag(String),
    #[error("stratum {stratum}, token {token}: {message}")]
    Invalid { stratum: usize, token: usize, message: String },
    #[error("stratum {stratum} has {got} tags but the section has {expected} tokens")]
    RowLength { stratum: usize, expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinkType {
    Token,
    Branch,
}

impl fmt::Display for LinkType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LinkType::Token => "Token",
            LinkType::Branch => "Branch",
        })
    }
}

/// One of the sixteen tagging schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TagScheme {
    pub use_m: bool,
    pub use_e: bool,
    pub use_j: bool,
    pub link: LinkType,
}

impl TagScheme {
    pub const fn new(use_m: bool, use_j: bool, use_e: bool, link: LinkType) -> Self {
        TagScheme { use_m, use_e, use_j, link }
    }

    /// All sixteen schemes, tagset-major.
    pub fn all() -> Vec<TagScheme> {
        let mut out = Vec::with_capacity(16);
        for bits in 0u8..8 {
            for link in [LinkType::Token, LinkType::Branch] {
                out.push(TagScheme::new(bits & 4 != 0, bits & 2 != 0, bits & 1 != 0, link));
            }
        }
        out
    }

    /// Tagset name such as `BIOMJE`.
    pub fn tagset(&self) -> String {
        let mut s = String::from("BIO");
        if self.use_m {
            s.push('M');
        }
        if self.use_j {
            s.push('J');
        }
        if self.use_e {
            s.push('E');
        }
        s
    }

    pub fn allows(&self, symbol: Symbol) -> bool {
        match symbol {
            Symbol::B | Symbol::I | Symbol::O => true,
            Symbol::M => self.use_m,
            Symbol::E => self.use_e,
            Symbol::J => self.use_j,
        }
    }
}

impl fmt::Display for TagScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.tagset(), self.link)
    }
}

impl FromStr for TagScheme {
    type Err = TaggingError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || TaggingError::UnknownScheme(s.to_string());
        let (set, link) = s.trim().split_once('-').ok_or_else(bad)?;
        let link = match link.to_ascii_lowercase().as_str() {
            "token" => LinkType::Token,
            "branch" => LinkType::Branch,
            _ => return Err(bad()),
        };
        let set = set.to_ascii_uppercase();
        let extra = set.strip_prefix("BIO").ok_or_else(bad)?;
        let (mut m, mut j, mut e) = (false, false, false);
        for c in extra.chars() {
            let flag = match c {
                'M' => &mut m,
                'J' => &mut j,
                'E' => &mut e,
                _ => return Err(bad()),
            };
            if *flag {
                return Err(bad());
            }
            *flag = true;
        }
        Ok(TagScheme::new(m, j, e, link))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    B,
    I,
    O,
    M,
    E,
    J,
}

impl Symbol {
    fn as_char(self) -> char {
        match self {
            Symbol::B => 'B',
            Symbol::I => 'I',
            Symbol::O => 'O',
            Symbol::M => 'M',
            Symbol::E => 'E',
            Symbol::J => 'J',
        }
    }

    /// Outer tags are `O` and `M`; everything else is inside a branch.
    pub fn is_outer(self) -> bool {
        matches!(self, Symbol::O | Symbol::M)
    }
}

/// A tag; `link` is only present on the `B` of a non-initial branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tag {
    pub symbol: Symbol,
    pub link: Option<i64>,
}

impl Tag {
    pub const O: Tag = Tag { symbol: Symbol::O, link: None };

    pub fn plain(symbol: Symbol) -> Tag {
        Tag { symbol, link: None }
    }

    pub fn linked(link: i64) -> Tag {
        debug_assert!(link <= -1);
        Tag { symbol: Symbol::B, link: Some(link) }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.link {
            Some(l) => write!(f, "{}{}", self.symbol.as_char(), l),
            None => write!(f, "{}", self.symbol.as_char()),
        }
    }
}

impl FromStr for Tag {
    type Err = TaggingError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || TaggingError::BadTag(s.to_string());
        let mut chars = s.chars();
        let symbol = match chars.next().ok_or_else(bad)? {
            'B' => Symbol::B,
            'I' => Symbol::I,
            'O' => Symbol::O,
            'M' => Symbol::M,
            'E' => Symbol::E,
            'J' => Symbol::J,
            _ => return Err(bad()),
        };
        let rest = chars.as_str();
        if rest.is_empty() {
            return Ok(Tag::plain(symbol));
        }
        if symbol != Symbol::B {
            return Err(bad());
        }
        // accept the typographic minus too
        let digits = rest
            .strip_prefix('-')
            .or_else(|| rest.strip_prefix('\u{2212}'))
            .ok_or_else(bad)?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let n: i64 = digits.parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        Ok(Tag::linked(-n))
    }
}

/// Tag rows over one section, outermost stratum first. Always has at
/// least one row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagSequence {
    len: usize,
    strata: Vec<Vec<Tag>>,
}

impl TagSequence {
    pub fn new(len: usize, strata: Vec<Vec<Tag>>) -> Result<Self, TaggingError> {
        for (i, row) in strata.iter().enumerate() {
            if row.len() != len {
                return Err(TaggingError::RowLength { stratum: i + 1, expected: len, got: row.len() });
            }
        }
        let strata = if strata.is_empty() { vec![vec![Tag::O; len]] } else { strata };
        Ok(TagSequence { len, strata })
    }

    /// Parses whitespace-separated rows, e.g. `"B I O B-2 I"`.
    pub fn parse_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self, TaggingError> {
        let strata = rows
            .iter()
            .map(|r| r.as_ref().split_whitespace().map(str::parse).collect::<Result<Vec<Tag>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let len = strata.first().map_or(0, Vec::len);
        TagSequence::new(len, strata)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn strata(&self) -> &[Vec<Tag>] {
        &self.strata
    }

    /// Row `stratum` (1-based) rendered with single spaces.
    pub fn row_string(&self, stratum: usize) -> String {
        self.strata[stratum - 1].iter().map(Tag::to_string).collect::<Vec<_>>().join(" ")
    }

    /// `(inner, outer)` tag counts summed over all strata.
    pub fn inner_outer(&self) -> (usize, usize) {
        let outer = self.strata.iter().flatten().filter(|t| t.symbol.is_outer()).count();
        (self.len * self.strata.len() - outer, outer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixteen_distinct_schemes() {
        let all = TagScheme::all();
        assert_eq!(all.len(), 16);
        let names: std::collections::BTreeSet<String> = all.iter().map(|s| s.to_string()).collect();
        assert_eq!(names.len(), 16);
        let tagsets: std::collections::BTreeSet<String> = all.iter().map(|s| s.tagset()).collect();
        let expected: std::collections::BTreeSet<String> =
            ["BIO", "BIOE", "BIOJ", "BIOM", "BIOJE", "BIOME", "BIOMJ", "BIOMJE"].iter().map(|s| s.to_string()).collect();
        assert_eq!(tagsets, expected);
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in TagScheme::all() {
            assert_eq!(s.to_string().parse::<TagScheme>().unwrap(), s);
        }
        assert_eq!("biomj-token".parse::<TagScheme>().unwrap().to_string(), "BIOMJ-Token");
        assert_eq!("BIOEM-BRANCH".parse::<TagScheme>().unwrap().to_string(), "BIOME-Branch");
        assert!("BIOMM-Token".parse::<TagScheme>().is_err());
        assert!("BIO".parse::<TagScheme>().is_err());
        assert!("BIOX-Token".parse::<TagScheme>().is_err());
        assert!("BIO-Word".parse::<TagScheme>().is_err());
    }

    #[test]
    fn tag_parse_and_render() {
        assert_eq!("B-3".parse::<Tag>().unwrap(), Tag::linked(-3));
        assert_eq!("B\u{2212}1".parse::<Tag>().unwrap(), Tag::linked(-1));
        assert_eq!(Tag::linked(-12).to_string(), "B-12");
        assert_eq!("J".parse::<Tag>().unwrap(), Tag::plain(Symbol::J));
        for bad in ["", "X", "I-2", "B-", "B-0", "B3", "B-x"] {
            assert!(bad.parse::<Tag>().is_err(), "{bad}");
        }
    }

    #[test]
    fn row_lengths_checked() {
        assert!(TagSequence::parse_rows(&["B I O", "O O"]).is_err());
        let seq = TagSequence::new(0, vec![]).unwrap();
        assert_eq!(seq.strata().len(), 1);
    }
}
