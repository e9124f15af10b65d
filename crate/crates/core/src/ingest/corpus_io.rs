//! Canonical JSON corpus format.
//!
//! ```text
//! {
//!   "indexing": "1-inclusive",
//!   "documents": [
//!     {"id":"d1","tokens":[...],"sections":[[1,14]],"parallelisms":[{"kind":"synchystic","branches":[[1,3],[6,7]]}],"hypotheses":{}}
//!   ]
//! }
//! ```
//!
//! Writing always produces this layout, one document per line, so
//! `write(read(x)) == x` for files already in canonical form.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::Serialize;
use serde_json::{Map, Value};

use super::IngestError;
use crate::model::{Corpus, Document, Parallelism, ParallelismKind, ParallelismSet, Span};

pub const CANONICAL_INDEXING: &str = "1-inclusive";

#[derive(Serialize)]
struct RawParallelism {
    kind: ParallelismKind,
    branches: Vec<[usize; 2]>,
}

#[derive(Serialize)]
struct RawDocument<'a> {
    id: &'a str,
    tokens: &'a [String],
    sections: Vec<[usize; 2]>,
    parallelisms: Vec<RawParallelism>,
    hypotheses: BTreeMap<&'a str, Vec<RawParallelism>>,
}

fn raw_set(set: &ParallelismSet) -> Vec<RawParallelism> {
    set.iter()
        .map(|p| RawParallelism {
            kind: p.kind(),
            branches: p.branches().iter().map(|b| [b.start(), b.end()]).collect(),
        })
        .collect()
}

pub fn write_corpus_string(corpus: &Corpus) -> String {
    let mut out = String::from("{\n  \"indexing\": \"1-inclusive\",\n");
    if !corpus.name().is_empty() {
        out.push_str(&format!("  \"name\": {},\n", serde_json::to_string(corpus.name()).expect("string")));
    }
    if corpus.is_empty() {
        out.push_str("  \"documents\": []\n}\n");
        return out;
    }
    out.push_str("  \"documents\": [\n");
    let n = corpus.len();
    for (i, d) in corpus.documents().iter().enumerate() {
        let raw = RawDocument {
            id: d.id(),
            tokens: d.tokens(),
            sections: d.sections().iter().map(|s| [s.start(), s.end()]).collect(),
            parallelisms: raw_set(d.reference()),
            hypotheses: d.hypotheses().iter().map(|(k, v)| (k.as_str(), raw_set(v))).collect(),
        };
        out.push_str("    ");
        out.push_str(&serde_json::to_string(&raw).expect("plain data"));
        out.push_str(if i + 1 < n { ",\n" } else { "\n" });
    }
    out.push_str("  ]\n}\n");
    out
}

pub fn write_corpus(corpus: &Corpus, mut w: impl Write) -> Result<(), IngestError> {
    w.write_all(write_corpus_string(corpus).as_bytes())?;
    Ok(())
}

pub fn read_corpus(mut r: impl Read) -> Result<Corpus, IngestError> {
    let mut s = String::new();
    r.read_to_string(&mut s)?;
    read_corpus_str(&s)
}

struct Ctx<'a> {
    doc: &'a str,
}

impl Ctx<'_> {
    fn err(&self, path: impl Into<String>, message: impl Into<String>) -> IngestError {
        IngestError::Schema { document: self.doc.to_string(), path: path.into(), message: message.into() }
    }

    fn array<'v>(&self, v: &'v Value, path: &str) -> Result<&'v Vec<Value>, IngestError> {
        v.as_array().ok_or_else(|| self.err(path, "expected an array"))
    }

    fn index(&self, v: &Value, path: &str) -> Result<usize, IngestError> {
        v.as_u64().map(|x| x as usize).ok_or_else(|| self.err(path, "expected a non-negative integer"))
    }

    fn span(&self, v: &Value, path: &str) -> Result<Span, IngestError> {
        let a = self.array(v, path)?;
        if a.len() != 2 {
            return Err(self.err(path, format!("expected [start, end], got {} values", a.len())));
        }
        let (s, e) = (self.index(&a[0], &format!("{path}[0]"))?, self.index(&a[1], &format!("{path}[1]"))?);
        Span::new(s, e).map_err(|err| self.err(path, err.to_string()))
    }

    fn parallelisms(&self, v: &Value, path: &str) -> Result<Vec<Parallelism>, IngestError> {
        let mut out = Vec::new();
        for (k, pv) in self.array(v, path)?.iter().enumerate() {
            let pp = format!("{path}[{k}]");
            let obj = pv.as_object().ok_or_else(|| self.err(&pp, "expected an object"))?;
            check_keys(self, obj, &pp, &["kind", "branches"])?;
            let kind = match obj.get("kind") {
                None => ParallelismKind::Unspecified,
                Some(kv) => serde_json::from_value(kv.clone())
                    .map_err(|_| self.err(format!("{pp}.kind"), "expected synchystic, chiastic or unspecified"))?,
            };
            let bp = format!("{pp}.branches");
            let bv = obj.get("branches").ok_or_else(|| self.err(&bp, "missing"))?;
            let spans = self
                .array(bv, &bp)?
                .iter()
                .enumerate()
                .map(|(j, b)| self.span(b, &format!("{bp}[{j}]")))
                .collect::<Result<Vec<_>, _>>()?;
            out.push(Parallelism::new(spans, kind).map_err(|e| self.err(&pp, e.to_string()))?);
        }
        Ok(out)
    }
}

fn check_keys(ctx: &Ctx, obj: &Map<String, Value>, path: &str, allowed: &[&str]) -> Result<(), IngestError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(ctx.err(if path.is_empty() { k.clone() } else { format!("{path}.{k}") }, "unknown field")),
        None => Ok(()),
    }
}

pub fn read_corpus_str(s: &str) -> Result<Corpus, IngestError> {
    let root: Value = serde_json::from_str(s)?;
    let top = Ctx { doc: "" };
    let obj = root.as_object().ok_or_else(|| top.err("", "expected a top-level object"))?;
    check_keys(&top, obj, "", &["indexing", "name", "documents"])?;
    match obj.get("indexing").and_then(Value::as_str) {
        Some(CANONICAL_INDEXING) => {}
        other => return Err(top.err("indexing", format!("expected \"{CANONICAL_INDEXING}\", got {other:?}"))),
    }
    let name = match obj.get("name") {
        None => String::new(),
        Some(v) => v.as_str().ok_or_else(|| top.err("name", "expected a string"))?.to_string(),
    };
    let docs_v = obj.get("documents").ok_or_else(|| top.err("documents", "missing"))?;
    let mut docs = Vec::new();
    for (i, dv) in top.array(docs_v, "documents")?.iter().enumerate() {
        let fallback = format!("#{i}");
        let id = dv.get("id").and_then(Value::as_str).unwrap_or(&fallback);
        let ctx = Ctx { doc: id };
        docs.push(read_document(&ctx, dv, &format!("documents[{i}]"))?);
    }
    Corpus::new(name, docs).map_err(|e| top.err("documents", e.to_string()))
}

fn read_document(ctx: &Ctx, dv: &Value, path: &str) -> Result<Document, IngestError> {
    let obj = dv.as_object().ok_or_else(|| ctx.err(path, "expected an object"))?;
    check_keys(ctx, obj, path, &["id", "tokens", "sections", "parallelisms", "hypotheses"])?;
    if !obj.get("id").is_some_and(Value::is_string) {
        return Err(ctx.err(format!("{path}.id"), "expected a string"));
    }
    let tp = format!("{path}.tokens");
    let tokens = ctx
        .array(obj.get("tokens").ok_or_else(|| ctx.err(&tp, "missing"))?, &tp)?
        .iter()
        .enumerate()
        .map(|(k, t)| t.as_str().map(String::from).ok_or_else(|| ctx.err(format!("{tp}[{k}]"), "expected a string")))
        .collect::<Result<Vec<_>, _>>()?;
    let sp = format!("{path}.sections");
    let doc = match obj.get("sections") {
        None => Document::single_section(ctx.doc, tokens),
        Some(v) => {
            let sections = ctx
                .array(v, &sp)?
                .iter()
                .enumerate()
                .map(|(k, s)| ctx.span(s, &format!("{sp}[{k}]")))
                .collect::<Result<Vec<_>, _>>()?;
            Document::new(ctx.doc, tokens, sections)
        }
    }
    .map_err(|e| ctx.err(&sp, e.to_string()))?;

    let pp = format!("{path}.parallelisms");
    let reference = ctx.parallelisms(obj.get("parallelisms").ok_or_else(|| ctx.err(&pp, "missing"))?, &pp)?;
    let reference = checked(ctx, &doc, reference, &pp)?;
    let mut doc = doc.with_reference(reference).expect("checked");
    if let Some(hv) = obj.get("hypotheses") {
        let hp = format!("{path}.hypotheses");
        let hobj = hv.as_object().ok_or_else(|| ctx.err(&hp, "expected an object"))?;
        for (name, v) in hobj {
            let p = format!("{hp}.{name}");
            let set = checked(ctx, &doc, ctx.parallelisms(v, &p)?, &p)?;
            doc = doc.with_hypothesis(name.clone(), set).expect("checked");
        }
    }
    Ok(doc)
}

fn checked(ctx: &Ctx, doc: &Document, ps: Vec<Parallelism>, path: &str) -> Result<ParallelismSet, IngestError> {
    for (k, p) in ps.iter().enumerate() {
        doc.check_set(&ParallelismSet::new(vec![p.clone()]))
            .map_err(|e| ctx.err(format!("{path}[{k}]"), e.to_string()))?;
    }
    Ok(ParallelismSet::new(ps))
}

#[cfg(test)]
mod tests {
    use super::*;

    const CANON: &str = r#"{
  "indexing": "1-inclusive",
  "documents": [
    {"id":"a","tokens":["ueni",",","uidi",",","uici"],"sections":[[1,5]],"parallelisms":[{"kind":"synchystic","branches":[[1,1],[3,3],[5,5]]}],"hypotheses":{"sys":[{"kind":"unspecified","branches":[[1,1],[3,3]]}]}},
    {"id":"b","tokens":["x","y"],"sections":[[1,1],[2,2]],"parallelisms":[],"hypotheses":{}}
  ]
}
"#;

    #[test]
    fn round_trip_is_byte_identical() {
        let c = read_corpus_str(CANON).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.documents()[0].hypothesis("sys").unwrap().len(), 1);
        assert_eq!(write_corpus_string(&c), CANON);
    }

    #[test]
    fn empty_corpus() {
        let c = Corpus::new("", vec![]).unwrap();
        let s = write_corpus_string(&c);
        assert_eq!(read_corpus_str(&s).unwrap().len(), 0);
        assert_eq!(s, "{\n  \"indexing\": \"1-inclusive\",\n  \"documents\": []\n}\n");
    }

    #[test]
    fn bad_span_names_document_and_path() {
        let bad = CANON.replace("[[1,1],[3,3],[5,5]]", "[[1,1],[5,3]]");
        match read_corpus_str(&bad).unwrap_err() {
            IngestError::Schema { document, path, .. } => {
                assert_eq!(document, "a");
                assert_eq!(path, "documents[0].parallelisms[0].branches[1]");
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn other_schema_errors() {
        let err = |s: &str| read_corpus_str(s).unwrap_err().to_string();
        assert!(err(&CANON.replace("1-inclusive", "0-exclusive")).contains("indexing"));
        assert!(err(&CANON.replace("[[1,1],[2,2]]", "[[1,2]],\"extra\":1")).contains("documents[1].extra"));
        // parallelism across the two sections of "b"
        let cross = CANON.replace(r#""parallelisms":[],"#, r#""parallelisms":[{"branches":[[1,1],[2,2]]}],"#);
        assert!(err(&cross).contains("documents[1].parallelisms[0]"));
        assert!(err(&CANON.replace("\"b\"", "\"a\"")).contains("duplicate"));
    }
}
