use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::align::{align_to_tokens, paragraph_sections, simple_tokenize, CharParallelism, CharSpan};
use super::{has_errors, Diagnostic, IngestError};
use crate::model::{Document, Parallelism, ParallelismKind, ParallelismSet, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EntityLabel {
    ParallelArm,
    ChiasmA,
    ChiasmB,
    Branch,
}

impl FromStr for EntityLabel {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "ParallelArm" => Ok(EntityLabel::ParallelArm),
            "ChiasmA" => Ok(EntityLabel::ChiasmA),
            "ChiasmB" => Ok(EntityLabel::ChiasmB),
            "Branch" => Ok(EntityLabel::Branch),
            _ => Err(()),
        }
    }
}

impl fmt::Display for EntityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RelationLabel {
    Parallel,
    Chiasm,
}

impl FromStr for RelationLabel {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "Parallel" => Ok(RelationLabel::Parallel),
            "Chiasm" => Ok(RelationLabel::Chiasm),
            _ => Err(()),
        }
    }
}

impl fmt::Display for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A text-bound annotation. Offsets count Unicode scalar values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BratEntity {
    pub id: String,
    pub label: EntityLabel,
    pub char_start: usize,
    pub char_end: usize,
    pub surface: String,
    /// 1-based line in the `.ann` input.
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BratRelation {
    pub id: String,
    pub label: RelationLabel,
    pub arg1: String,
    pub arg2: String,
    pub line: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParsedBrat {
    pub entities: Vec<BratEntity>,
    pub relations: Vec<BratRelation>,
    pub diagnostics: Vec<Diagnostic>,
    /// Lines of types other than T and R.
    pub skipped: usize,
}

impl ParsedBrat {
    /// Renders the accepted T and R lines back in standoff form.
    pub fn to_ann(&self) -> String {
        let mut s = String::new();
        for e in &self.entities {
            s.push_str(&format!("{}\t{} {} {}\t{}\n", e.id, e.label, e.char_start, e.char_end, e.surface));
        }
        for r in &self.relations {
            s.push_str(&format!("{}\t{} Arg1:{} Arg2:{}\n", r.id, r.label, r.arg1, r.arg2));
        }
        s
    }
}

/// Parses standoff annotations against the document text. Every problem is
/// reported as a diagnostic; entities with a mismatched surface string are
/// kept, everything else that fails is dropped.
pub fn parse_brat(ann: &str, text: &str) -> ParsedBrat {
    let chars: Vec<char> = text.chars().collect();
    let mut out = ParsedBrat::default();
    let mut raw_relations = Vec::new();
    for (idx, raw) in ann.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() {
            continue;
        }
        match raw.chars().next() {
            Some('T') => {
                if let Some(e) = parse_entity(raw, line, &chars, &mut out.diagnostics) {
                    if out.entities.iter().any(|x| x.id == e.id) {
                        out.diagnostics.push(Diagnostic::error(Some(line), format!("duplicate entity id {}", e.id)));
                    } else {
                        out.entities.push(e);
                    }
                }
            }
            Some('R') => {
                if let Some(r) = parse_relation(raw, line, &mut out.diagnostics) {
                    raw_relations.push(r);
                }
            }
            _ => out.skipped += 1,
        }
    }
    if out.skipped > 0 {
        out.diagnostics.push(Diagnostic::warning(None, format!("skipped {} line(s) of other types", out.skipped)));
    }
    let labels: HashMap<&str, EntityLabel> = out.entities.iter().map(|e| (e.id.as_str(), e.label)).collect();
    for r in raw_relations {
        let missing: Vec<&str> =
            [&r.arg1, &r.arg2].into_iter().filter(|a| !labels.contains_key(a.as_str())).map(String::as_str).collect();
        if !missing.is_empty() {
            out.diagnostics.push(Diagnostic::error(
                Some(r.line),
                format!("relation {} has dangling argument(s) {}", r.id, missing.join(", ")),
            ));
            continue;
        }
        if r.label == RelationLabel::Chiasm {
            let pair = (labels[r.arg1.as_str()], labels[r.arg2.as_str()]);
            let ok = matches!(
                pair,
                (EntityLabel::ChiasmA, EntityLabel::ChiasmB) | (EntityLabel::ChiasmB, EntityLabel::ChiasmA)
            );
            if !ok {
                out.diagnostics.push(Diagnostic::warning(
                    Some(r.line),
                    format!("Chiasm {} links {} to {} instead of ChiasmA to ChiasmB", r.id, pair.0, pair.1),
                ));
            }
        }
        out.relations.push(r);
    }
    out
}

fn parse_entity(raw: &str, line: usize, chars: &[char], diags: &mut Vec<Diagnostic>) -> Option<BratEntity> {
    let mut fields = raw.splitn(3, '\t');
    let id = fields.next().unwrap_or_default().trim();
    let (Some(body), surface) = (fields.next(), fields.next()) else {
        diags.push(Diagnostic::error(Some(line), "entity line needs tab-separated id, label/offsets and text"));
        return None;
    };
    let mut parts = body.splitn(2, ' ');
    let label_str = parts.next().unwrap_or_default();
    let Ok(label) = label_str.parse::<EntityLabel>() else {
        diags.push(Diagnostic::warning(Some(line), format!("entity {id} has unsupported label {label_str:?}; skipped")));
        return None;
    };
    let offsets = parts.next().unwrap_or_default();
    let mut fragments = Vec::new();
    for frag in offsets.split(';') {
        let nums: Vec<&str> = frag.split_whitespace().collect();
        let parsed = match nums.as_slice() {
            [s, e] => s.parse::<usize>().ok().zip(e.parse::<usize>().ok()),
            _ => None,
        };
        match parsed {
            Some((s, e)) if s < e => fragments.push((s, e)),
            _ => {
                diags.push(Diagnostic::error(Some(line), format!("entity {id} has malformed offsets {offsets:?}")));
                return None;
            }
        }
    }
    let char_start = fragments.iter().map(|f| f.0).min().expect("at least one fragment");
    let char_end = fragments.iter().map(|f| f.1).max().expect("at least one fragment");
    if char_end > chars.len() {
        diags.push(Diagnostic::error(
            Some(line),
            format!("entity {id} ends at {char_end}, past the end of the text ({} chars)", chars.len()),
        ));
        return None;
    }
    if fragments.len() > 1 {
        diags.push(Diagnostic::warning(
            Some(line),
            format!("entity {id} is discontinuous; using the covering range {char_start}..{char_end}"),
        ));
    }
    let expected: String = fragments
        .iter()
        .map(|&(s, e)| chars[s..e].iter().collect::<String>())
        .collect::<Vec<_>>()
        .join(" ");
    let surface = surface.unwrap_or_default().to_string();
    if surface != expected {
        diags.push(Diagnostic::error(
            Some(line),
            format!("entity {id} surface {surface:?} does not match the text {expected:?}"),
        ));
    }
    Some(BratEntity { id: id.to_string(), label, char_start, char_end, surface, line })
}

fn parse_relation(raw: &str, line: usize, diags: &mut Vec<Diagnostic>) -> Option<BratRelation> {
    let mut fields = raw.splitn(2, '\t');
    let id = fields.next().unwrap_or_default().trim().to_string();
    let Some(body) = fields.next() else {
        diags.push(Diagnostic::error(Some(line), "relation line needs a tab after the id"));
        return None;
    };
    let mut words = body.split_whitespace();
    let label_str = words.next().unwrap_or_default();
    let Ok(label) = label_str.parse::<RelationLabel>() else {
        diags.push(Diagnostic::warning(Some(line), format!("relation {id} has unsupported label {label_str:?}; skipped")));
        return None;
    };
    let (mut arg1, mut arg2) = (None, None);
    for w in words {
        if let Some(v) = w.strip_prefix("Arg1:") {
            arg1 = Some(v.to_string());
        } else if let Some(v) = w.strip_prefix("Arg2:") {
            arg2 = Some(v.to_string());
        }
    }
    match (arg1, arg2) {
        (Some(arg1), Some(arg2)) => Some(BratRelation { id, label, arg1, arg2, line }),
        _ => {
            diags.push(Diagnostic::error(Some(line), format!("relation {id} needs Arg1 and Arg2")));
            None
        }
    }
}

/// Connected components of the relation graph, as character-offset
/// parallelisms ordered by their first branch.
pub fn link_to_parallelisms(parsed: &ParsedBrat) -> (Vec<CharParallelism>, Vec<Diagnostic>) {
    let n = parsed.entities.len();
    let index: HashMap<&str, usize> = parsed.entities.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for r in &parsed.relations {
        if let (Some(&a), Some(&b)) = (index.get(r.arg1.as_str()), index.get(r.arg2.as_str())) {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        components.entry(root).or_default().push(i);
    }
    let mut labels: HashMap<usize, (bool, bool)> = HashMap::new();
    for r in &parsed.relations {
        if let Some(&a) = index.get(r.arg1.as_str()) {
            let root = find(&mut parent, a);
            let e = labels.entry(root).or_default();
            match r.label {
                RelationLabel::Parallel => e.0 = true,
                RelationLabel::Chiasm => e.1 = true,
            }
        }
    }

    let mut diags = Vec::new();
    let mut out = Vec::new();
    for (root, mut members) in components {
        if members.len() < 2 {
            let e = &parsed.entities[members[0]];
            diags.push(Diagnostic::warning(
                Some(e.line),
                format!("entity {} is not linked to any other branch; dropped", e.id),
            ));
            continue;
        }
        members.sort_by_key(|&i| (parsed.entities[i].char_start, parsed.entities[i].char_end));
        let kind = match labels.get(&root).copied().unwrap_or_default() {
            (true, false) => ParallelismKind::Synchystic,
            (false, true) => ParallelismKind::Chiastic,
            _ => ParallelismKind::Unspecified,
        };
        let entities: Vec<String> = members.iter().map(|&i| parsed.entities[i].id.clone()).collect();
        if kind == ParallelismKind::Unspecified {
            diags.push(Diagnostic::warning(
                None,
                format!("component {} mixes Parallel and Chiasm relations; kind left unspecified", entities.join("+")),
            ));
        }
        out.push(CharParallelism {
            branches: members
                .iter()
                .map(|&i| CharSpan::new(parsed.entities[i].char_start, parsed.entities[i].char_end))
                .collect(),
            kind,
            entities,
        });
    }
    out.sort_by(|a, b| a.branches.cmp(&b.branches));
    (out, diags)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BratOptions {
    /// Fail on any error-level diagnostic.
    pub strict: bool,
    /// Clamp parallelisms that cross a section boundary to the section of
    /// their first branch instead of dropping them.
    pub clamp_sections: bool,
    pub lowercase: bool,
}

/// Builds a document from a `.txt`/`.ann` pair: tokenizes the text, splits
/// sections at blank lines and snaps the annotations to tokens.
pub fn brat_document(
    id: &str,
    ann: &str,
    text: &str,
    opts: BratOptions,
) -> Result<(Document, Vec<Diagnostic>), IngestError> {
    let (mut tokens, alignment) = simple_tokenize(text);
    let sections = paragraph_sections(text, &alignment);
    let parsed = parse_brat(ann, text);
    let mut diags = parsed.diagnostics.clone();
    let (char_set, d) = link_to_parallelisms(&parsed);
    diags.extend(d);
    let (set, d) = align_to_tokens(&char_set, &alignment);
    diags.extend(d);
    if opts.lowercase {
        tokens = tokens.into_iter().map(|t| t.to_lowercase()).collect();
    }
    let doc = Document::new(id, tokens, sections)?;
    let mut kept = Vec::new();
    for p in set {
        if doc.section_of(p.extent()).is_some() {
            kept.push(p);
            continue;
        }
        if !opts.clamp_sections {
            diags.push(Diagnostic::error(None, format!("parallelism {:?} crosses a section boundary; dropped", p.branches())));
            continue;
        }
        let sec = doc.sections()[doc.section_at(p.branches()[0].start()).expect("inside document")];
        let clamped: Vec<Span> = p
            .branches()
            .iter()
            .filter(|b| b.start() <= sec.end())
            .map(|b| Span::new(b.start(), b.end().min(sec.end())).expect("start within section"))
            .collect();
        match Parallelism::new(clamped, p.kind()) {
            Ok(c) => {
                diags.push(Diagnostic::warning(None, format!("parallelism {:?} clamped to section {sec}", p.branches())));
                kept.push(c);
            }
            Err(e) => diags.push(Diagnostic::error(
                None,
                format!("parallelism {:?} crosses a section boundary and cannot be clamped: {e}", p.branches()),
            )),
        }
    }
    if opts.strict && has_errors(&diags) {
        return Err(IngestError::Strict(diags));
    }
    let doc = doc.with_reference(ParallelismSet::new(kept))?;
    Ok((doc, diags))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Severity;

    const TEXT: &str = "ueni uidi uici, et ueni uidi";

    #[test]
    fn parse_entity_and_relation() {
        let p = parse_brat("T1\tParallelArm 0 12\tueni uidi ui\nR1\tParallel Arg1:T1 Arg2:T1\n", TEXT);
        assert_eq!(
            p.entities,
            vec![BratEntity {
                id: "T1".into(),
                label: EntityLabel::ParallelArm,
                char_start: 0,
                char_end: 12,
                surface: "ueni uidi ui".into(),
                line: 1
            }]
        );
        assert_eq!(p.relations[0].label, RelationLabel::Parallel);
        assert_eq!((p.relations[0].arg1.as_str(), p.relations[0].arg2.as_str()), ("T1", "T1"));
        assert!(p.diagnostics.is_empty());
    }

    #[test]
    fn dangling_argument() {
        let p = parse_brat("T1\tParallelArm 0 4\tueni\nR9\tParallel Arg1:T1 Arg2:T99\n", TEXT);
        assert!(p.relations.is_empty());
        assert_eq!(p.diagnostics.len(), 1);
        assert_eq!(p.diagnostics[0].line, Some(2));
        assert!(p.diagnostics[0].message.contains("T99"));
    }

    #[test]
    fn bad_lines_get_line_numbers() {
        let ann = "#1\tAnnotatorNotes T1\tnote\nT1\tParallelArm 4 2\tx\nT2\tParallelArm 0 4\tuenI\nA1\tFlag T2\n";
        let p = parse_brat(ann, TEXT);
        assert_eq!(p.skipped, 2);
        let errors: Vec<_> = p.diagnostics.iter().filter(|d| d.severity == Severity::Error).collect();
        assert_eq!(errors.len(), 2);
        assert_eq!(errors[0].line, Some(2));
        assert_eq!(errors[1].line, Some(3));
        // mismatched surface keeps the entity
        assert_eq!(p.entities.len(), 1);
    }

    #[test]
    fn serialize_back() {
        let ann = "T1\tParallelArm 0 4\tueni\nT2\tParallelArm 19 23\tueni\nR1\tParallel  Arg1:T1 Arg2:T2\n";
        let p = parse_brat(ann, TEXT);
        assert_eq!(p.to_ann(), ann.replace("  ", " "));
    }

    #[test]
    fn components() {
        let ann = "T1\tParallelArm 0 4\tueni\nT2\tParallelArm 5 9\tuidi\nT3\tParallelArm 10 14\tuici\n\
                   T7\tParallelArm 19 23\tueni\nR1\tParallel Arg1:T1 Arg2:T2\nR2\tParallel Arg1:T2 Arg2:T3\n";
        let (ps, diags) = link_to_parallelisms(&parse_brat(ann, TEXT));
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].branches.len(), 3);
        assert_eq!(ps[0].kind, ParallelismKind::Synchystic);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("T7"));
    }

    #[test]
    fn chiasm_and_mixed_kinds() {
        let ann = "T1\tChiasmA 0 4\tueni\nT2\tChiasmB 5 9\tuidi\nR1\tChiasm Arg1:T1 Arg2:T2\n";
        let (ps, _) = link_to_parallelisms(&parse_brat(ann, TEXT));
        assert_eq!(ps[0].kind, ParallelismKind::Chiastic);
        let ann = "T1\tChiasmA 0 4\tueni\nT2\tChiasmB 5 9\tuidi\nT3\tParallelArm 10 14\tuici\n\
                   R1\tChiasm Arg1:T1 Arg2:T2\nR2\tParallel Arg1:T2 Arg2:T3\n";
        let (ps, diags) = link_to_parallelisms(&parse_brat(ann, TEXT));
        assert_eq!(ps[0].kind, ParallelismKind::Unspecified);
        assert_eq!(diags.len(), 1);
    }

    #[test]
    fn document_from_brat() {
        let ann = "T1\tParallelArm 0 9\tueni uidi\nT2\tParallelArm 19 28\tueni uidi\nR1\tParallel Arg1:T1 Arg2:T2\n";
        let (doc, diags) = brat_document("d", ann, TEXT, BratOptions::default()).unwrap();
        assert!(diags.is_empty(), "{diags:?}");
        assert_eq!(doc.tokens(), ["ueni", "uidi", "uici", ",", "et", "ueni", "uidi"]);
        assert_eq!(doc.reference().canonical(), vec![vec![Span::new(1, 2).unwrap(), Span::new(6, 7).unwrap()]]);
    }

    #[test]
    fn cross_section_rejected_or_clamped() {
        let text = "a b c\n\nd e f";
        let ann = "T1\tParallelArm 0 1\ta\nT2\tParallelArm 2 5;7 8\tb c d\nR1\tParallel Arg1:T1 Arg2:T2\n";
        let (doc, diags) = brat_document("d", ann, text, BratOptions::default()).unwrap();
        assert!(doc.reference().is_empty());
        assert!(has_errors(&diags));
        assert!(brat_document("d", ann, text, BratOptions { strict: true, ..Default::default() }).is_err());
        let (doc, _) = brat_document("d", ann, text, BratOptions { clamp_sections: true, ..Default::default() }).unwrap();
        assert_eq!(doc.reference().canonical(), vec![vec![Span::new(1, 1).unwrap(), Span::new(2, 3).unwrap()]]);
    }
}
