use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use super::args::{
    AgreeArgs, BaselineArgs, ConvertArgs, DecodeArgs, EncodeArgs, EvaluateArgs, Format, Normalization, SplitArgs,
    StatsArgs, Target, TransitionsArgs,
};
use super::{CliError, Ctx};
use crate::analysis::{
    baseline_detect, bootstrap_agreement, derived, kneser_ney_replacement, nlo_histogram, summarize, token_counts,
    AnalysisError, BaselineConfig, StdKind,
};
use crate::ingest::{
    brat_document, collapse_interlocking, is_punctuation, normalize_conjunctions, strip_punctuation, write_corpus_string,
    write_tsv, BratOptions, Diagnostic, IngestError,
};
use crate::metrics::{categorize_errors, evaluate_corpus, ErrorTaxonomyReport, Metric, MetricError};
use crate::model::{Corpus, Document};
use crate::split::{
    assignment_manifest, assignment_map, count_tags, greedy_split, verify_split, SplitError, SplitSpec,
};
use crate::tagging::{encode, Symbol, TagScheme, TransitionSymbol, TransitionTable};

fn json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn metrics(ctx: &Ctx, flag: &[String]) -> Result<Vec<Metric>, CliError> {
    let names = match (flag.is_empty(), &ctx.settings.file.metrics) {
        (false, _) => flag.to_vec(),
        (true, Some(m)) => m.clone(),
        (true, None) => return Ok(Metric::ALL.to_vec()),
    };
    let mut out = Vec::new();
    for n in names {
        let m: Metric = n.parse().map_err(|e: MetricError| CliError::usage(e.to_string()))?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

/// Adds the reference layer of `other` (or picks an existing layer of
/// `base`) as the hypothesis to compare against.
fn attach(
    ctx: &mut Ctx,
    base: Corpus,
    other: Option<&str>,
    layer: Option<&str>,
    strict: bool,
) -> Result<(Corpus, String), CliError> {
    let Some(path) = other else {
        let names = base.hypothesis_names();
        let name = match layer {
            Some(l) if names.contains(l) => l.to_string(),
            Some(l) => return Err(CliError::mismatch(format!("no document has a layer named {l:?}; found {names:?}"))),
            None if names.len() == 1 => names.into_iter().next().expect("one name"),
            None => {
                return Err(CliError::usage(format!(
                    "give a second file or choose a layer with --layer; found layers {names:?}"
                )))
            }
        };
        return Ok((base, name));
    };
    let hyp = ctx.load_corpus(path, strict)?;
    let ids = |c: &Corpus| c.documents().iter().map(|d| d.id().to_string()).collect::<BTreeSet<_>>();
    let (gold_ids, hyp_ids) = (ids(&base), ids(&hyp));
    let only_gold: Vec<_> = gold_ids.difference(&hyp_ids).collect();
    let only_hyp: Vec<_> = hyp_ids.difference(&gold_ids).collect();
    if !only_gold.is_empty() || !only_hyp.is_empty() {
        return Err(CliError::mismatch(format!(
            "document ids differ; only in the reference: {only_gold:?}; only in the hypothesis: {only_hyp:?}"
        )));
    }
    let name = layer.unwrap_or("hypothesis").to_string();
    let name_of_base = base.name().to_string();
    let mut docs = Vec::with_capacity(base.len());
    for doc in base.into_documents() {
        let h = hyp.document(doc.id()).expect("ids checked");
        if h.len() != doc.len() {
            return Err(CliError::mismatch(format!(
                "document {:?}: {} reference tokens but {} hypothesis tokens",
                doc.id(),
                doc.len(),
                h.len()
            )));
        }
        if let Some(i) = (0..doc.len()).find(|&i| doc.tokens()[i] != h.tokens()[i]) {
            ctx.warn(&format!(
                "document {:?}: token {} differs ({:?} vs {:?})",
                doc.id(),
                i + 1,
                doc.tokens()[i],
                h.tokens()[i]
            ));
        }
        let id = doc.id().to_string();
        let doc = doc
            .with_hypothesis(name.clone(), h.reference().clone())
            .map_err(|e| CliError::mismatch(format!("document {id:?}: {e}")))?;
        docs.push(doc);
    }
    Ok((Corpus::new(name_of_base, docs)?, name))
}

fn brat_pairs(path: &Path) -> Result<Vec<(PathBuf, PathBuf)>, CliError> {
    let partner = |p: &Path, ext: &str| {
        let q = p.with_extension(ext);
        if q.is_file() {
            Ok(q)
        } else {
            Err(CliError::io(format!("missing partner file {}", q.display())))
        }
    };
    if !path.is_dir() {
        return match path.extension().and_then(|e| e.to_str()) {
            Some("ann") => Ok(vec![(path.to_path_buf(), partner(path, "txt")?)]),
            Some("txt") => Ok(vec![(partner(path, "ann")?, path.to_path_buf())]),
            _ => Err(CliError::io(format!("{}: not a BRAT file", path.display()))),
        };
    }
    let mut anns: Vec<PathBuf> = fs::read_dir(path)
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "ann"))
        .collect();
    anns.sort();
    anns.into_iter().map(|a| partner(&a, "txt").map(|t| (a, t))).collect()
}

fn load_brat(
    ctx: &mut Ctx,
    path: &Path,
    opts: BratOptions,
    name: &str,
) -> Result<(Corpus, Vec<(String, Diagnostic)>), CliError> {
    let mut docs = Vec::new();
    let mut diags = Vec::new();
    for (ann_path, txt_path) in brat_pairs(path)? {
        let ann = ctx.read(&ann_path.to_string_lossy())?;
        let text = ctx.read(&txt_path.to_string_lossy())?;
        let id = ann_path.file_stem().expect("has a name").to_string_lossy().into_owned();
        let file = ann_path.display().to_string();
        match brat_document(&id, &ann, &text, opts) {
            Ok((doc, ds)) => {
                diags.extend(ds.into_iter().map(|d| (file.clone(), d)));
                docs.push(doc);
            }
            Err(IngestError::Strict(ds)) => {
                let lines: Vec<String> = ds.iter().map(|d| format!("  {file}: {d}")).collect();
                return Err(CliError::strict(format!("{file}: strict mode rejected the annotations\n{}", lines.join("\n"))));
            }
            Err(e) => return Err(CliError::ingest(&file, e)),
        }
    }
    Ok((Corpus::new(name, docs)?, diags))
}

fn normalize(ctx: &Ctx, corpus: Corpus, steps: &[Normalization], slack: usize) -> Result<(Corpus, usize), CliError> {
    let steps: BTreeSet<Normalization> = steps.iter().copied().collect();
    if steps.is_empty() {
        return Ok((corpus, 0));
    }
    let conj = ctx.settings.language.conjunctions();
    let is_conj = |t: &str| conj.contains(&t) || conj.contains(&t.to_lowercase().as_str());
    let name = corpus.name().to_string();
    let mut events = 0;
    let mut docs = Vec::with_capacity(corpus.len());
    for doc in corpus.into_documents() {
        let mut set = doc.reference().clone();
        for step in &steps {
            set = match step {
                Normalization::Conjunctions => normalize_conjunctions(&set, &doc, is_conj),
                Normalization::Interlocking => {
                    let (s, ev) = collapse_interlocking(&set, &doc, is_punctuation, slack);
                    events += ev.len();
                    s
                }
                Normalization::Punctuation => strip_punctuation(&set, &doc, is_punctuation),
            };
        }
        docs.push(doc.with_reference(set)?);
    }
    Ok((Corpus::new(name, docs)?, events))
}

fn parallelism_count(c: &Corpus) -> usize {
    c.documents().iter().map(|d| d.reference().len()).sum()
}

pub fn convert(ctx: &mut Ctx, a: ConvertArgs) -> Result<(), CliError> {
    let strict = ctx.strict(a.strict);
    let path = Path::new(&a.input);
    let is_brat = a.input != "-" && (path.is_dir() || path.extension().is_some_and(|e| e == "ann" || e == "txt"));
    let (corpus, diags) = if is_brat {
        let opts =
            BratOptions { strict, clamp_sections: a.clamp_sections, lowercase: ctx.settings.language.lowercase() };
        load_brat(ctx, path, opts, a.name.as_deref().unwrap_or(""))?
    } else {
        let c = ctx.load_corpus(&a.input, strict)?;
        let c = match &a.name {
            Some(n) => Corpus::new(n.clone(), c.into_documents())?,
            None => c,
        };
        (c, Vec::new())
    };
    let slack = a.slack.or(ctx.settings.file.slack).unwrap_or(0);
    let (corpus, events) = normalize(ctx, corpus, &a.normalize, slack)?;
    let data = match a.to {
        Target::Canonical => write_corpus_string(&corpus),
        Target::Tsv => {
            let scheme = ctx.scheme(a.scheme.as_deref(), "BIOMJ-Token")?;
            write_tsv(&corpus, None, scheme).map_err(|e| CliError::ingest("output", e))?
        }
    };
    ctx.write(&a.output, &data)?;
    let target = match a.to {
        Target::Canonical => "canonical",
        Target::Tsv => "tsv",
    };
    let report = match ctx.settings.format {
        Format::Json => json(&json!({
            "documents": corpus.len(),
            "parallelisms": parallelism_count(&corpus),
            "target": target,
            "collapse_events": events,
            "diagnostics": diags.iter().map(|(f, d)| json!({
                "file": f, "line": d.line, "severity": d.severity, "message": d.message
            })).collect::<Vec<_>>(),
        })),
        Format::Text => {
            let mut s = format!(
                "converted {} document(s) with {} parallelism(s) to {target}\n",
                corpus.len(),
                parallelism_count(&corpus)
            );
            if a.normalize.contains(&Normalization::Interlocking) {
                s.push_str(&format!("interlocking: {events} change(s)\n"));
            }
            for (f, d) in &diags {
                s.push_str(&format!("{f}: {d}\n"));
            }
            s
        }
    };
    ctx.report(&a.output, &report)
}

fn render_errors(rows: &[(String, ErrorTaxonomyReport)], total: &ErrorTaxonomyReport) -> String {
    const TOTAL: &str = "Total (by Category)";
    let cells = |r: &ErrorTaxonomyReport| {
        [
            vec![r.parallelism.fp, r.parallelism.fn_],
            vec![r.branch.fp, r.branch.fn_, r.branch.fm],
            vec![r.word.fp, r.word.fn_, r.word.fm],
            vec![r.total()],
        ]
    };
    let groups: [(&str, &[&str]); 4] = [
        ("Parallelism", &["FP", "FN"]),
        ("Branch", &["FP", "FN", "FM"]),
        ("Word", &["FP", "FN", "FM"]),
        ("Total", &["(by Document)"]),
    ];
    let label = rows.iter().map(|(id, _)| id.chars().count()).chain([TOTAL.len()]).max().unwrap_or(0);
    let cell = rows
        .iter()
        .map(|(_, r)| r)
        .chain([total])
        .flat_map(|r| cells(r).concat())
        .map(|n| n.to_string().len())
        .max()
        .unwrap_or(1)
        .max(2);
    let widths: Vec<Vec<usize>> =
        groups.iter().map(|(_, subs)| subs.iter().map(|s| s.len().max(cell)).collect()).collect();
    let group_width = |g: usize| {
        let inner: usize = widths[g].iter().sum::<usize>() + widths[g].len() - 1;
        inner.max(groups[g].0.len())
    };
    let line = |first: &str, parts: Vec<String>| {
        let mut s = format!("{first:<label$}");
        for p in parts {
            s.push_str(" | ");
            s.push_str(&p);
        }
        s.trim_end().to_string() + "\n"
    };
    let fit = |g: usize, vals: Vec<String>| {
        let joined = vals.iter().zip(&widths[g]).map(|(v, &w)| format!("{v:>w$}")).collect::<Vec<_>>().join(" ");
        format!("{joined:>w$}", w = group_width(g))
    };
    let mut s = line("", (0..4).map(|g| format!("{:<w$}", groups[g].0, w = group_width(g))).collect());
    s.push_str(&line("", (0..4).map(|g| fit(g, groups[g].1.iter().map(|x| x.to_string()).collect())).collect()));
    let row = |name: &str, r: &ErrorTaxonomyReport| {
        let c = cells(r);
        line(name, (0..4).map(|g| fit(g, c[g].iter().map(|n| n.to_string()).collect())).collect())
    };
    for (id, r) in rows {
        s.push_str(&row(id, r));
    }
    s.push_str(&row(TOTAL, total));
    s
}

pub fn evaluate(ctx: &mut Ctx, a: EvaluateArgs) -> Result<(), CliError> {
    let strict = ctx.strict(a.strict);
    let metrics = metrics(ctx, &a.metrics)?;
    let gold = ctx.load_corpus(&a.gold, strict)?;
    let (corpus, layer) = attach(ctx, gold, a.hypothesis.as_deref(), a.layer.as_deref(), strict)?;
    let mut reports = Vec::new();
    for &m in &metrics {
        let mut r = evaluate_corpus(&corpus, &layer, m).map_err(|e| CliError::mismatch(e.to_string()))?;
        if !a.per_doc {
            r.per_document.clear();
        }
        reports.push(r);
    }
    if let Some(r) = reports.first() {
        for w in r.warnings.clone() {
            ctx.warn(&w);
        }
    }
    let errors = a.errors.then(|| {
        let empty = Default::default();
        let rows: Vec<(String, ErrorTaxonomyReport)> = corpus
            .documents()
            .iter()
            .map(|d| (d.id().to_string(), categorize_errors(d.reference(), d.hypothesis(&layer).unwrap_or(&empty))))
            .collect();
        let mut total = ErrorTaxonomyReport::default();
        for (_, r) in &rows {
            total += r;
        }
        (rows, total)
    });
    let out = match ctx.settings.format {
        Format::Json => {
            let mut v = json!({ "hypothesis": layer, "metrics": reports });
            if let Some((rows, total)) = &errors {
                v["errors"] = json!({
                    "documents": rows.iter().map(|(id, r)| json!({ "id": id, "errors": r })).collect::<Vec<_>>(),
                    "total": total,
                });
            }
            json(&v)
        }
        Format::Text => {
            let mut s = format!("hypothesis: {layer}\n");
            for r in &reports {
                s.push_str(&format!(
                    "{:<6} P={:.4} R={:.4} F1={:.4}  m={} |H|={} |G|={}",
                    r.metric.name(),
                    r.precision,
                    r.recall,
                    r.f1,
                    r.m,
                    r.size_h,
                    r.size_g
                ));
                if let Some(c) = r.convention {
                    s.push_str(&format!("  [{}]", serde_json::to_value(c).expect("enum").as_str().unwrap_or("")));
                }
                s.push('\n');
                for d in &r.per_document {
                    s.push_str(&format!("  {}: P={:.4} R={:.4} F1={:.4}\n", d.id, d.precision, d.recall, d.f1));
                }
            }
            if let Some((rows, total)) = &errors {
                s.push('\n');
                s.push_str(&render_errors(rows, total));
            }
            s
        }
    };
    ctx.write("-", &out)
}

pub fn stats(ctx: &mut Ctx, a: StatsArgs) -> Result<(), CliError> {
    let corpus = ctx.load_corpus(&a.input, ctx.strict(a.strict))?;
    let kind = match a.std.as_deref().or(ctx.settings.file.std.as_deref()).unwrap_or("sample") {
        "sample" => StdKind::Sample,
        "population" => StdKind::Population,
        other => return Err(CliError::usage(format!("--std must be sample or population, got {other:?}"))),
    };
    if a.histogram == Some(0) {
        return Err(CliError::usage("--histogram needs at least one bin"));
    }
    let name = a.name.clone().unwrap_or_else(|| if corpus.name().is_empty() { "corpus".into() } else { corpus.name().into() });
    let summary = summarize(&corpus);
    let derived = derived(&corpus, kind);
    let kn = kneser_ney_replacement(token_counts(&corpus).into_values());
    let histogram = a.histogram.map(|b| nlo_histogram(&corpus, b));
    let out = match ctx.settings.format {
        Format::Json => {
            let mut v = json!({ "name": name, "summary": summary, "derived": derived, "kneser_ney": kn });
            if let Some(h) = &histogram {
                v["histogram"] = json!(h);
            }
            json(&v)
        }
        Format::Text => {
            let mut s = summary.render(&name);
            s.push('\n');
            s.push_str(&derived.render(&name));
            s.push_str(&format!("\nKneser-Ney replacement probability: {kn:.4}\n"));
            if let Some(h) = &histogram {
                s.push('\n');
                s.push_str(&h.to_csv());
            }
            s
        }
    };
    ctx.write("-", &out)
}

fn split_error(e: SplitError) -> CliError {
    match e {
        SplitError::BadSpec(_) | SplitError::NoMTag(_) => CliError::usage(e.to_string()),
        _ => CliError::mismatch(e.to_string()),
    }
}

pub fn split(ctx: &mut Ctx, a: SplitArgs) -> Result<(), CliError> {
    let corpus = ctx.load_corpus(&a.input, ctx.strict(a.strict))?;
    let scheme = ctx.scheme(a.scheme.as_deref(), "BIOM-Token")?;
    let spec: SplitSpec = match a.ratios.as_deref().or(ctx.settings.file.ratios.as_deref()) {
        Some(r) => r.parse().map_err(split_error)?,
        None => SplitSpec::default(),
    };
    let files = corpus.documents().iter().map(|d| count_tags(d, scheme)).collect::<Result<Vec<_>, _>>().map_err(split_error)?;
    let split_of = greedy_split(&files, &spec).map_err(split_error)?;
    let report = verify_split(&files, &spec, &split_of);
    let map = assignment_map(&files, &spec, &split_of);
    if let Some(p) = &a.assignment {
        ctx.write(p, &json(&map))?;
    }
    if let Some(p) = &a.manifest {
        ctx.write(p, &assignment_manifest(&files, &spec, &split_of))?;
    }
    let out = match ctx.settings.format {
        Format::Json => json(&json!({ "scheme": scheme.to_string(), "assignment": map, "report": report })),
        Format::Text => {
            let mut s = format!("scheme: {scheme}\nratios: {spec}\n");
            s.push_str(&report.render());
            s
        }
    };
    ctx.write("-", &out)
}

pub fn agree(ctx: &mut Ctx, a: AgreeArgs) -> Result<(), CliError> {
    let strict = ctx.strict(a.strict);
    let metrics = metrics(ctx, &a.metrics)?;
    let trials = a.trials.or(ctx.settings.file.trials).unwrap_or(1000);
    if trials == 0 {
        return Err(CliError::usage("--trials must be at least 1"));
    }
    let first = ctx.load_corpus(&a.first, strict)?;
    let (corpus, layer) = attach(ctx, first, a.second.as_deref(), a.layer.as_deref(), strict)?;
    let seed = ctx.settings.seed;
    let reports = metrics
        .iter()
        .map(|&m| bootstrap_agreement(&corpus, &layer, m, trials, seed))
        .collect::<Result<Vec<_>, AnalysisError>>()
        .map_err(|e| CliError::mismatch(e.to_string()))?;
    let out = match ctx.settings.format {
        Format::Json => json(&json!({ "layer": layer, "reports": reports })),
        Format::Text => {
            let mut s = format!("layer: {layer}  trials: {trials}  seed: {seed}\n");
            for r in &reports {
                s.push_str(&format!(
                    "{:<6} F1={:.4} mean={:.4} std={:.4} 95% CI=[{:.4}, {:.4}] n={}\n",
                    r.metric.name(),
                    r.f1,
                    r.mean,
                    r.std,
                    r.ci_lower,
                    r.ci_upper,
                    r.population
                ));
            }
            s
        }
    };
    ctx.write("-", &out)
}

pub fn baseline(ctx: &mut Ctx, a: BaselineArgs) -> Result<(), CliError> {
    let corpus = ctx.load_corpus(&a.input, ctx.strict(a.strict))?;
    let file = &ctx.settings.file;
    let d = BaselineConfig::default();
    let cfg = BaselineConfig {
        threshold: a.threshold.or(file.threshold).unwrap_or(d.threshold),
        max_gap: a.max_gap.or(file.max_gap).unwrap_or(d.max_gap),
        min_len: a.min_len.or(file.min_len).unwrap_or(d.min_len),
        max_len: a.max_len.or(file.max_len).unwrap_or(d.max_len),
    };
    let name = corpus.name().to_string();
    let mut docs: Vec<Document> = Vec::with_capacity(corpus.len());
    let mut found = 0;
    for doc in corpus.into_documents() {
        let set = baseline_detect(&doc, &cfg).map_err(|e| CliError::usage(e.to_string()))?;
        found += set.len();
        docs.push(doc.with_hypothesis(a.layer.clone(), set)?);
    }
    let corpus = Corpus::new(name, docs)?;
    ctx.write(&a.output, &write_corpus_string(&corpus))?;
    let report = match ctx.settings.format {
        Format::Json => json(&json!({
            "layer": a.layer, "documents": corpus.len(), "parallelisms": found, "config": cfg
        })),
        Format::Text => format!(
            "baseline: {found} parallelism(s) over {} document(s) in layer {:?} (threshold {}, gap <= {}, length {}..{})\n",
            corpus.len(),
            a.layer,
            cfg.threshold,
            cfg.max_gap,
            cfg.min_len,
            cfg.max_len
        ),
    };
    ctx.report(&a.output, &report)
}

pub fn transitions(ctx: &mut Ctx, a: TransitionsArgs) -> Result<(), CliError> {
    let corpus = ctx.load_corpus(&a.input, ctx.strict(a.strict))?;
    let names: Vec<String> = if !a.scheme.is_empty() {
        a.scheme.clone()
    } else if let Some(s) = &ctx.settings.file.scheme {
        vec![s.clone()]
    } else {
        vec!["BIO-Token".into(), "BIOMJ-Token".into()]
    };
    let schemes = names
        .iter()
        .map(|n| n.parse::<TagScheme>().map_err(|e| CliError::usage(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let empty = Default::default();
    let mut tables = Vec::new();
    for &scheme in &schemes {
        let mut table = TransitionTable::default();
        for doc in corpus.documents() {
            let set = match &a.layer {
                None => doc.reference(),
                Some(l) => doc.hypothesis(l).unwrap_or(&empty),
            };
            for (k, sec) in doc.sections().iter().enumerate() {
                let seq = encode(sec.len(), &doc.section_view(set, k), scheme)
                    .map_err(|e| CliError::mismatch(format!("document {:?}: {e}", doc.id())))?;
                table.merge(&TransitionTable::tally([&seq]));
            }
        }
        tables.push((scheme, table));
    }
    let i_to_o =
        |t: &TransitionTable| t.get(TransitionSymbol::Tag(Symbol::I), TransitionSymbol::Tag(Symbol::O));
    let out = match ctx.settings.format {
        Format::Json => json(
            &tables
                .iter()
                .map(|(s, t)| json!({ "scheme": s.to_string(), "i_to_o": i_to_o(t), "transitions": t }))
                .collect::<Vec<_>>(),
        ),
        Format::Text => {
            let mut s = String::new();
            for (k, (scheme, t)) in tables.iter().enumerate() {
                if k > 0 {
                    s.push('\n');
                }
                s.push_str(&format!("scheme: {scheme}\n{}I -> O: {}\n", t.render(), i_to_o(t)));
            }
            s
        }
    };
    ctx.write("-", &out)
}

pub fn encode_cmd(ctx: &mut Ctx, a: EncodeArgs) -> Result<(), CliError> {
    let corpus = ctx.load_corpus(&a.input, false)?;
    let scheme = ctx.scheme(a.scheme.as_deref(), "BIOMJ-Token")?;
    if let Some(l) = &a.layer {
        if let Some(d) = corpus.documents().iter().find(|d| d.hypothesis(l).is_none()) {
            return Err(CliError::mismatch(format!("document {:?} has no layer {l:?}", d.id())));
        }
    }
    let data = write_tsv(&corpus, a.layer.as_deref(), scheme).map_err(|e| CliError::ingest("input", e))?;
    ctx.write(&a.output, &data)?;
    let report = match ctx.settings.format {
        Format::Json => json(&json!({ "documents": corpus.len(), "scheme": scheme.to_string() })),
        Format::Text => format!("encoded {} document(s) under {scheme}\n", corpus.len()),
    };
    ctx.report(&a.output, &report)
}

pub fn decode_cmd(ctx: &mut Ctx, a: DecodeArgs) -> Result<(), CliError> {
    let corpus = ctx.load_corpus(&a.input, ctx.strict(a.strict))?;
    let corpus = match a.name {
        Some(n) => Corpus::new(n, corpus.into_documents())?,
        None => corpus,
    };
    ctx.write(&a.output, &write_corpus_string(&corpus))?;
    let report = match ctx.settings.format {
        Format::Json => json(&json!({ "documents": corpus.len(), "parallelisms": parallelism_count(&corpus) })),
        Format::Text => {
            format!("decoded {} document(s) with {} parallelism(s)\n", corpus.len(), parallelism_count(&corpus))
        }
    };
    ctx.report(&a.output, &report)
}
