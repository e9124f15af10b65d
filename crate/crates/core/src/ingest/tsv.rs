//! Tab-separated tag exchange format.
//!
//! ```text
//! # scheme = BIOMJ-Token
//! # doc = d1
//! # section = 1
//! quotidie<TAB>B
//! dicimus<TAB>I
//! ```
//!
//! One token per line followed by one tag column per stratum; a blank line
//! ends a section. Positions and links are local to the section.

use super::IngestError;
use crate::model::{Corpus, Document, ParallelismSet, Span};
use crate::tagging::{decode, encode, DecodeMode, Tag, TagScheme, TagSequence};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TsvSection {
    pub tokens: Vec<String>,
    pub tags: TagSequence,
    /// Line of the first token (or header) of the section.
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TsvDocument {
    pub id: String,
    pub sections: Vec<TsvSection>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TsvFile {
    pub scheme: TagScheme,
    pub documents: Vec<TsvDocument>,
}

/// Encodes the reference layer (or the named hypothesis) of every document.
pub fn write_tsv(corpus: &Corpus, layer: Option<&str>, scheme: TagScheme) -> Result<String, IngestError> {
    let mut out = format!("# scheme = {scheme}\n");
    for doc in corpus.documents() {
        let set = match layer {
            None => doc.reference(),
            Some(name) => doc.hypothesis(name).ok_or_else(|| IngestError::Schema {
                document: doc.id().to_string(),
                path: format!("hypotheses.{name}"),
                message: "missing".into(),
            })?,
        };
        out.push_str(&format!("# doc = {}\n", doc.id()));
        if doc.sections().is_empty() {
            out.push('\n');
        }
        for (k, sec) in doc.sections().iter().enumerate() {
            let view = doc.section_view(set, k);
            let seq = encode(sec.len(), &view, scheme)?;
            out.push_str(&format!("# section = {}\n", k + 1));
            for (i, pos) in sec.positions().enumerate() {
                let tok = doc.token(pos);
                if tok.is_empty() || tok.contains(['\t', '\n', '\r']) {
                    return Err(IngestError::Schema {
                        document: doc.id().to_string(),
                        path: format!("tokens[{}]", pos - 1),
                        message: format!("token {tok:?} cannot be written to TSV"),
                    });
                }
                out.push_str(tok);
                for row in seq.strata() {
                    out.push('\t');
                    out.push_str(&row[i].to_string());
                }
                out.push('\n');
            }
            out.push('\n');
        }
    }
    Ok(out)
}

struct Pending {
    tokens: Vec<String>,
    rows: Vec<Vec<Tag>>,
    line: usize,
}

impl Pending {
    fn new(line: usize) -> Self {
        Pending { tokens: Vec::new(), rows: Vec::new(), line }
    }

    fn finish(self) -> Result<TsvSection, IngestError> {
        let len = self.tokens.len();
        let tags = TagSequence::new(len, self.rows)
            .map_err(|e| IngestError::Tsv { line: self.line, message: e.to_string() })?;
        Ok(TsvSection { tokens: self.tokens, tags, line: self.line })
    }
}

pub fn read_tsv(input: &str) -> Result<TsvFile, IngestError> {
    let mut scheme: Option<TagScheme> = None;
    let mut docs: Vec<TsvDocument> = Vec::new();
    let mut pending: Option<Pending> = None;
    let err = |line: usize, message: String| IngestError::Tsv { line, message };

    fn close(pending: &mut Option<Pending>, docs: &mut [TsvDocument]) -> Result<(), IngestError> {
        if let Some(p) = pending.take() {
            if !p.tokens.is_empty() {
                let sec = p.finish()?;
                docs.last_mut().expect("sections follow a doc header").sections.push(sec);
            }
        }
        Ok(())
    }

    for (idx, raw) in input.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() {
            close(&mut pending, &mut docs)?;
            continue;
        }
        if raw.starts_with('#') && !raw.contains('\t') {
            let Some((key, value)) = raw[1..].split_once('=') else { continue };
            let value = value.trim();
            match key.trim() {
                "scheme" => {
                    if scheme.is_some() || !docs.is_empty() {
                        return Err(err(line, "the scheme header must come first, once".into()));
                    }
                    scheme = Some(value.parse().map_err(|e: crate::tagging::TaggingError| err(line, e.to_string()))?);
                }
                "doc" => {
                    close(&mut pending, &mut docs)?;
                    if docs.iter().any(|d| d.id == value) {
                        return Err(err(line, format!("duplicate document {value:?}")));
                    }
                    docs.push(TsvDocument { id: value.to_string(), sections: Vec::new() });
                }
                "section" => {
                    close(&mut pending, &mut docs)?;
                    let Some(doc) = docs.last() else {
                        return Err(err(line, "section header before any doc header".into()));
                    };
                    let expected = doc.sections.len() + 1;
                    if value.parse::<usize>().ok() != Some(expected) {
                        return Err(err(line, format!("expected section {expected}, got {value:?}")));
                    }
                    pending = Some(Pending::new(line));
                }
                _ => {}
            }
            continue;
        }
        if docs.is_empty() {
            return Err(err(line, "token line before any doc header".into()));
        }
        let mut fields = raw.split('\t');
        let token = fields.next().unwrap_or_default().to_string();
        let tags = fields
            .map(|f| f.trim().parse::<Tag>().map_err(|e| err(line, e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        if tags.is_empty() {
            return Err(err(line, "token line without tags".into()));
        }
        let p = pending.get_or_insert_with(|| Pending::new(line));
        if p.tokens.is_empty() {
            p.line = line;
            p.rows = vec![Vec::new(); tags.len()];
        } else if tags.len() != p.rows.len() {
            return Err(err(line, format!("expected {} tag columns, got {}", p.rows.len(), tags.len())));
        }
        for (row, tag) in p.rows.iter_mut().zip(tags) {
            row.push(tag);
        }
        p.tokens.push(token);
    }
    close(&mut pending, &mut docs)?;
    let scheme = scheme.ok_or_else(|| err(1, "missing \"# scheme = ...\" header".into()))?;
    Ok(TsvFile { scheme, documents: docs })
}

/// Result of decoding one TSV document.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedDocument {
    /// The document with the decoded parallelisms as its reference layer.
    pub document: Document,
    pub repairs: usize,
    pub singletons: usize,
}

/// Decodes every section and reassembles documents in document coordinates.
pub fn decode_tsv(file: &TsvFile, mode: DecodeMode) -> Result<Vec<DecodedDocument>, IngestError> {
    let mut out = Vec::new();
    for d in &file.documents {
        let mut tokens = Vec::new();
        let mut sections = Vec::new();
        let mut parallelisms = Vec::new();
        let (mut repairs, mut singletons) = (0, 0);
        for sec in &d.sections {
            let offset = tokens.len();
            let dec = decode(&sec.tags, file.scheme, mode).map_err(|e| IngestError::Tsv {
                line: sec.line,
                message: format!("document {:?}: {e}", d.id),
            })?;
            repairs += dec.repairs;
            singletons += dec.singletons;
            for p in dec.set {
                let shifted = p
                    .branches()
                    .iter()
                    .map(|b| Span::new(b.start() + offset, b.end() + offset))
                    .collect::<Result<Vec<_>, _>>()?;
                parallelisms.push(crate::model::Parallelism::new(shifted, p.kind())?);
            }
            tokens.extend(sec.tokens.iter().cloned());
            sections.push(Span::new(offset + 1, tokens.len())?);
        }
        let document = Document::new(d.id.clone(), tokens, sections)?.with_reference(ParallelismSet::new(parallelisms))?;
        out.push(DecodedDocument { document, repairs, singletons });
    }
    Ok(out)
}
