use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use super::{Symbol, TagSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TransitionSymbol {
    Start,
    Tag(Symbol),
    Stop,
}

impl TransitionSymbol {
    pub const ALL: [TransitionSymbol; 8] = [
        TransitionSymbol::Start,
        TransitionSymbol::Tag(Symbol::B),
        TransitionSymbol::Tag(Symbol::I),
        TransitionSymbol::Tag(Symbol::J),
        TransitionSymbol::Tag(Symbol::E),
        TransitionSymbol::Tag(Symbol::M),
        TransitionSymbol::Tag(Symbol::O),
        TransitionSymbol::Stop,
    ];

    fn index(self) -> usize {
        Self::ALL.iter().position(|&s| s == self).expect("listed")
    }
}

impl fmt::Display for TransitionSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransitionSymbol::Start => f.write_str("<START>"),
            TransitionSymbol::Stop => f.write_str("<STOP>"),
            TransitionSymbol::Tag(s) => write!(f, "{s:?}"),
        }
    }
}

/// Counts of consecutive tag pairs, links stripped, with virtual
/// `<START>`/`<STOP>` around every row. Strata are counted independently.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransitionTable {
    counts: [[u64; 8]; 8],
}

impl TransitionTable {
    pub fn tally<'a>(sequences: impl IntoIterator<Item = &'a TagSequence>) -> Self {
        let mut t = TransitionTable::default();
        for seq in sequences {
            for row in seq.strata() {
                let mut prev = TransitionSymbol::Start;
                for tag in row {
                    let cur = TransitionSymbol::Tag(tag.symbol);
                    t.counts[prev.index()][cur.index()] += 1;
                    prev = cur;
                }
                t.counts[prev.index()][TransitionSymbol::Stop.index()] += 1;
            }
        }
        t
    }

    pub fn get(&self, from: TransitionSymbol, to: TransitionSymbol) -> u64 {
        self.counts[from.index()][to.index()]
    }

    pub fn row_sum(&self, from: TransitionSymbol) -> u64 {
        self.counts[from.index()].iter().sum()
    }

    pub fn merge(&mut self, other: &TransitionTable) {
        for (a, b) in self.counts.iter_mut().zip(other.counts.iter()) {
            for (x, y) in a.iter_mut().zip(b.iter()) {
                *x += y;
            }
        }
    }

    /// Non-zero cells as `(from, to, count)`.
    pub fn nonzero(&self) -> Vec<(TransitionSymbol, TransitionSymbol, u64)> {
        let mut out = Vec::new();
        for from in TransitionSymbol::ALL {
            for to in TransitionSymbol::ALL {
                let c = self.get(from, to);
                if c > 0 {
                    out.push((from, to, c));
                }
            }
        }
        out
    }

    /// Square matrix, rows = from, columns = to, without the never-used
    /// `<STOP>` row and `<START>` column.
    pub fn render(&self) -> String {
        let rows = &TransitionSymbol::ALL[..7];
        let cols = &TransitionSymbol::ALL[1..];
        let width = cols
            .iter()
            .flat_map(|&c| rows.iter().map(move |&r| (r, c)))
            .map(|(r, c)| self.get(r, c).to_string().len())
            .max()
            .unwrap_or(1)
            .max(6);
        let mut s = format!("{:<8}", "from\\to");
        for c in cols {
            s.push_str(&format!(" {:>width$}", c.to_string()));
        }
        s.push('\n');
        for &r in rows {
            s.push_str(&format!("{:<8}", r.to_string()));
            for &c in cols {
                s.push_str(&format!(" {:>width$}", self.get(r, c)));
            }
            s.push('\n');
        }
        s
    }
}

impl Serialize for TransitionTable {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut map: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
        for (from, to, c) in self.nonzero() {
            map.entry(from.to_string()).or_default().insert(to.to_string(), c);
        }
        map.serialize(ser)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use TransitionSymbol::{Start, Stop};

    fn t(s: Symbol) -> TransitionSymbol {
        TransitionSymbol::Tag(s)
    }

    #[test]
    fn single_row() {
        let seq = TagSequence::parse_rows(&["B I O"]).unwrap();
        let table = TransitionTable::tally([&seq]);
        assert_eq!(
            table.nonzero(),
            vec![(Start, t(Symbol::B), 1), (t(Symbol::B), t(Symbol::I), 1), (t(Symbol::I), t(Symbol::O), 1), (t(Symbol::O), Stop, 1)]
        );
    }

    #[test]
    fn empty_section() {
        let seq = TagSequence::new(0, vec![]).unwrap();
        let table = TransitionTable::tally([&seq]);
        assert_eq!(table.nonzero(), vec![(Start, Stop, 1)]);
    }

    #[test]
    fn links_are_stripped_and_rows_sum() {
        let seq = TagSequence::parse_rows(&["B I M B-2 J O", "O O O O O O"]).unwrap();
        let table = TransitionTable::tally([&seq]);
        assert_eq!(table.get(t(Symbol::M), t(Symbol::B)), 1);
        assert_eq!(table.row_sum(Start), 2);
        assert_eq!(table.row_sum(t(Symbol::O)), 7);
        let json = serde_json::to_string(&table).unwrap();
        assert!(json.contains("\"<START>\":{\"B\":1,\"O\":1}"), "{json}");
    }
}
