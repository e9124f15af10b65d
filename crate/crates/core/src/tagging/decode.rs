use crate::model::{Parallelism, ParallelismKind, ParallelismSet, Span};

use super::{LinkType, Symbol, Tag, TagScheme, TagSequence, TaggingError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeMode {
    /// Reject any tag or transition the scheme cannot produce.
    Strict,
    /// Repair malformed input and count the repairs.
    Lenient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub set: ParallelismSet,
    /// Number of lenient repairs applied.
    pub repairs: usize,
    /// Branch groups dropped for having a single branch.
    pub singletons: usize,
}

/// Rebuilds the parallelisms encoded by `seq` (section-local positions).
///
/// Lenient repairs: `I`/`J`/`E` outside a branch open one; an unresolvable
/// link opens a new parallelism; tags foreign to the scheme are read as
/// their nearest equivalent (`M` as `O`, `J` as `I`).
pub fn decode(seq: &TagSequence, scheme: TagScheme, mode: DecodeMode) -> Result<Decoded, TaggingError> {
    let mut out = Vec::new();
    let mut repairs = 0;
    let mut singletons = 0;
    for (s, row) in seq.strata().iter().enumerate() {
        let mut rd = RowDecoder { scheme, mode, stratum: s + 1, repairs: 0, ..Default::default() };
        rd.run(row)?;
        repairs += rd.repairs;
        for g in rd.groups {
            if g.len() >= 2 {
                out.push(Parallelism::new(g, ParallelismKind::Unspecified).expect("row branches are disjoint"));
            } else {
                singletons += 1;
            }
        }
    }
    Ok(Decoded { set: ParallelismSet::new(out), repairs, singletons })
}

struct Open {
    start: usize,
    group: usize,
    initial: bool,
    last: Symbol,
}

struct RowDecoder {
    scheme: TagScheme,
    mode: DecodeMode,
    stratum: usize,
    repairs: usize,
    open: Option<Open>,
    /// completed branches in order, with their group
    branches: Vec<(Span, usize)>,
    groups: Vec<Vec<Span>>,
}

impl Default for RowDecoder {
    fn default() -> Self {
        RowDecoder {
            scheme: TagScheme::new(false, false, false, LinkType::Token),
            mode: DecodeMode::Strict,
            stratum: 1,
            repairs: 0,
            open: None,
            branches: Vec::new(),
            groups: Vec::new(),
        }
    }
}

impl RowDecoder {
    fn fail(&mut self, token: usize, message: impl Into<String>) -> Result<(), TaggingError> {
        match self.mode {
            DecodeMode::Strict => Err(TaggingError::Invalid {
                stratum: self.stratum,
                token,
                message: message.into(),
            }),
            DecodeMode::Lenient => {
                self.repairs += 1;
                Ok(())
            }
        }
    }

    fn close(&mut self, end: usize) -> Result<(), TaggingError> {
        if let Some(open) = self.open.take() {
            if self.mode == DecodeMode::Strict
                && self.scheme.use_e
                && end > open.start
                && open.last != Symbol::E
            {
                return Err(TaggingError::Invalid {
                    stratum: self.stratum,
                    token: end,
                    message: "multi-token branch does not end with E".into(),
                });
            }
            let span = Span::new(open.start, end).expect("open precedes close");
            self.branches.push((span, open.group));
            self.groups[open.group].push(span);
        }
        Ok(())
    }

    fn new_group(&mut self) -> usize {
        self.groups.push(Vec::new());
        self.groups.len() - 1
    }

    fn open(&mut self, start: usize, group: usize, symbol: Symbol) {
        let initial = self.groups[group].is_empty();
        self.open = Some(Open { start, group, initial, last: symbol });
    }

    fn resolve(&self, pos: usize, link: i64) -> Option<usize> {
        match self.scheme.link {
            LinkType::Token => {
                let target = pos as i64 + link;
                if target < 1 {
                    return None;
                }
                self.branches
                    .iter()
                    .rev()
                    .find(|(b, _)| b.end() as i64 == target)
                    .map(|&(_, g)| g)
            }
            LinkType::Branch => {
                let back = link.unsigned_abs() as usize;
                let idx = self.branches.len().checked_sub(back)?;
                Some(self.branches[idx].1)
            }
        }
    }

    fn run(&mut self, row: &[Tag]) -> Result<(), TaggingError> {
        let mut prev: Option<Tag> = None;
        for (i, &tag) in row.iter().enumerate() {
            let pos = i + 1;
            let mut symbol = tag.symbol;
            if !self.scheme.allows(symbol) {
                self.fail(pos, format!("tag {tag} is not part of {}", self.scheme))?;
                symbol = match symbol {
                    Symbol::M => Symbol::O,
                    Symbol::J => Symbol::I,
                    other => other,
                };
            }
            if tag.link.is_some() && symbol != Symbol::B {
                self.fail(pos, format!("only B may carry a link, got {tag}"))?;
            }
            match symbol {
                Symbol::B => {
                    self.close(pos - 1)?;
                    let group = match tag.link {
                        None => self.new_group(),
                        Some(link) => {
                            if self.mode == DecodeMode::Strict
                                && self.scheme.use_m
                                && prev.is_some_and(|p| p.symbol == Symbol::O)
                            {
                                self.fail(pos, "O cannot precede a linked B when M is in use")?;
                            }
                            match self.resolve(pos, link) {
                                Some(g) => g,
                                None => {
                                    self.fail(pos, format!("link {link} does not resolve to an earlier branch"))?;
                                    self.new_group()
                                }
                            }
                        }
                    };
                    self.open(pos, group, Symbol::B);
                }
                Symbol::I | Symbol::J => match self.open.as_mut() {
                    Some(open) if open.last != Symbol::E => {
                        let expect_j = self.scheme.use_j && !open.initial;
                        open.last = symbol;
                        if self.mode == DecodeMode::Strict && self.scheme.use_j && (symbol == Symbol::J) != expect_j {
                            let want = if expect_j { "J" } else { "I" };
                            self.fail(pos, format!("expected {want} inside this branch, got {symbol:?}"))?;
                        }
                    }
                    _ => {
                        self.fail(pos, format!("{symbol:?} outside a branch"))?;
                        self.close(pos - 1)?;
                        let g = self.new_group();
                        self.open(pos, g, symbol);
                    }
                },
                Symbol::E => match self.open.as_mut() {
                    Some(open) if open.last != Symbol::E => {
                        open.last = Symbol::E;
                    }
                    _ => {
                        self.fail(pos, "E outside a branch")?;
                        self.close(pos - 1)?;
                        let g = self.new_group();
                        self.open(pos, g, Symbol::E);
                    }
                },
                Symbol::O | Symbol::M => self.close(pos - 1)?,
            }
            // E ends the branch on its own token
            if symbol == Symbol::E {
                if let Some(open) = self.open.take() {
                    let span = Span::new(open.start, pos).expect("valid");
                    self.branches.push((span, open.group));
                    self.groups[open.group].push(span);
                }
            }
            prev = Some(tag);
        }
        self.close(row.len())
    }
}
