use std::fs;
use std::io::Cursor;
use std::path::{Path, PathBuf};

use rpd_core::cli::{run, EXIT_IO, EXIT_MISMATCH, EXIT_OK, EXIT_STRICT, EXIT_USAGE};

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).to_path_buf()
}

fn fixture(name: &str) -> String {
    root().join("tests/fixtures").join(name).to_string_lossy().into_owned()
}

fn rpd_with_stdin(args: &[&str], stdin: &str) -> Out {
    let mut input = Cursor::new(stdin.as_bytes().to_vec());
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("rpd").chain(args.iter().copied()), &mut input, &mut out, &mut err);
    Out { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn rpd(args: &[&str]) -> Out {
    rpd_with_stdin(args, "")
}

/// Compares against `tests/golden/<name>`; set `RPD_UPDATE_GOLDEN=1` to
/// rewrite the files.
fn golden(name: &str, actual: &str) {
    let path = root().join("tests/golden").join(name);
    if std::env::var_os("RPD_UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "golden file {name} differs");
}

fn check_schema(schema: &str, output: &str) {
    let schema: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(root().join("schemas").join(format!("{schema}.schema.json"))).unwrap())
            .unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let value: serde_json::Value = serde_json::from_str(output).unwrap();
    let errors: Vec<String> = validator.iter_errors(&value).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{schema}: {errors:#?}");
}

#[test]
fn worked_example_line() {
    let o = rpd(&["evaluate", &fixture("worked_gold.json"), &fixture("worked_hyp.json"), "--metrics", "epm"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert!(o.stdout.contains("EPM    P=0.5000 R=1.0000 F1=0.6667"), "{}", o.stdout);
}

#[test]
fn self_evaluation_is_perfect() {
    let f = fixture("worked_hyp.json");
    let o = rpd(&["--format", "json", "evaluate", &f, &f]);
    assert_eq!(o.code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    for r in v["metrics"].as_array().unwrap() {
        assert_eq!(r["f1"], 1.0);
    }
}

#[test]
fn golden_text_outputs() {
    let cases: Vec<(&str, Vec<String>)> = vec![
        (
            "evaluate_worked.txt",
            vec!["evaluate".into(), fixture("worked_gold.json"), fixture("worked_hyp.json"), "--per-doc".into(), "--errors".into()],
        ),
        ("stats_sermon.txt", vec!["stats".into(), fixture("sermon.json"), "--name".into(), "Sermon".into(), "--histogram".into(), "10".into()]),
        ("transitions_worked.txt", vec!["transitions".into(), fixture("worked_hyp.json")]),
        ("split_symmetric.txt", vec!["split".into(), fixture("symmetric.json"), "--ratios".into(), "A=0.5,B=0.5".into()]),
        (
            "agree_seed7.txt",
            vec!["agree".into(), fixture("worked_gold.json"), fixture("worked_hyp.json"), "--seed".into(), "7".into(), "--trials".into(), "500".into()],
        ),
        ("encode_sermon.tsv", vec!["encode".into(), fixture("sermon.json"), "--scheme".into(), "BIOMJ-Token".into()]),
        ("convert_brat.json", vec!["convert".into(), fixture("brat")]),
        ("baseline_sermon.json", vec!["baseline".into(), fixture("sermon.json")]),
    ];
    for (name, args) in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = rpd(&args);
        assert_eq!(o.code, EXIT_OK, "{name}: {}", o.stderr);
        golden(name, &o.stdout);
    }
}

#[test]
fn json_outputs_match_schemas() {
    let gold = fixture("worked_gold.json");
    let hyp = fixture("worked_hyp.json");
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("evaluate", vec!["evaluate", &gold, &hyp, "--per-doc", "--errors"]),
        ("stats", vec!["stats", &hyp, "--histogram", "4"]),
        ("split", vec!["split", &hyp, "--ratios", "all=1"]),
        ("agree", vec!["agree", &gold, &hyp, "--trials", "50"]),
        ("transitions", vec!["transitions", &hyp, "--scheme", "BIOMJE-Branch"]),
    ];
    for (schema, args) in cases {
        let mut full = vec!["--format", "json"];
        full.extend(args);
        let o = rpd(&full);
        assert_eq!(o.code, EXIT_OK, "{schema}: {}", o.stderr);
        check_schema(schema, &o.stdout);
    }
    let split4 = rpd(&["--format", "json", "split", &fixture("symmetric.json"), "--ratios", "A=0.5,B=0.5"]);
    check_schema("split", &split4.stdout);

    let o = rpd(&["--format", "json", "convert", &fixture("brat")]);
    check_schema("corpus", &o.stdout);
    check_schema("summary", &o.stderr);
    let o = rpd(&["--format", "json", "baseline", &fixture("sermon.json")]);
    check_schema("corpus", &o.stdout);
    check_schema("summary", &o.stderr);
    let o = rpd(&["--format", "json", "decode", &fixture("../golden/encode_sermon.tsv")]);
    check_schema("corpus", &o.stdout);
    check_schema("summary", &o.stderr);
}

#[test]
fn fixtures_match_corpus_schema() {
    for f in ["sermon.json", "worked_gold.json", "worked_hyp.json", "symmetric.json"] {
        check_schema("corpus", &fs::read_to_string(fixture(f)).unwrap());
    }
}

#[test]
fn brat_to_tsv_reproduces_sermon_row() {
    let o = rpd(&["convert", &fixture("brat"), "--to", "tsv", "--scheme", "BIOMJ-Token"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let section: Vec<&str> = o
        .stdout
        .split("# section = 1\n")
        .nth(1)
        .unwrap()
        .lines()
        .take_while(|l| !l.is_empty())
        .map(|l| l.split('\t').nth(1).unwrap())
        .collect();
    assert_eq!(section.join(" "), "B I I M M B-3 J M M B-3 J J J O");
    assert!(o.stderr.contains("converted 1 document(s)"));
}

#[test]
fn pipes_through_stdin_and_stdout() {
    let tsv = rpd(&["encode", &fixture("sermon.json"), "--scheme", "BIOME-Branch"]);
    let back = rpd_with_stdin(&["decode", "-", "--name", "sermon"], &tsv.stdout);
    assert_eq!(back.code, EXIT_OK, "{}", back.stderr);
    let a: serde_json::Value = serde_json::from_str(&fs::read_to_string(fixture("sermon.json")).unwrap()).unwrap();
    let b: serde_json::Value = serde_json::from_str(&back.stdout).unwrap();
    assert_eq!(a["documents"][0]["tokens"], b["documents"][0]["tokens"]);
    assert_eq!(a["documents"][0]["parallelisms"][0]["branches"], b["documents"][0]["parallelisms"][0]["branches"]);
    let json = fs::read_to_string(fixture("sermon.json")).unwrap();
    let stats = rpd_with_stdin(&["stats", "-"], &json);
    assert!(stats.stdout.lines().nth(1).unwrap().contains(" 14 "), "{}", stats.stdout);
    let twice = rpd_with_stdin(&["evaluate", "-", "-"], &json);
    assert_eq!(twice.code, EXIT_USAGE);
}

#[test]
fn stats_block_counts_tokens() {
    let o = rpd(&["stats", &fixture("sermon.json")]);
    let lines: Vec<&str> = o.stdout.lines().collect();
    let head: Vec<&str> = lines[0].split("  ").map(str::trim).filter(|s| !s.is_empty()).collect();
    let row: Vec<&str> = lines[1].split("  ").map(str::trim).filter(|s| !s.is_empty()).collect();
    let tokens = head.iter().position(|&h| h == "Tokens").unwrap();
    assert_eq!(row[tokens], "14");
}

#[test]
fn agree_is_byte_identical_for_a_seed() {
    let args = ["agree", &fixture("worked_gold.json"), &fixture("worked_hyp.json"), "--seed", "7"];
    let (a, b) = (rpd(&args), rpd(&args));
    assert_eq!(a.code, EXIT_OK);
    assert_eq!(a.stdout, b.stdout);
    let jobs1 = rpd(&["--jobs", "1", "agree", &fixture("worked_gold.json"), &fixture("worked_hyp.json"), "--seed", "7"]);
    assert_eq!(a.stdout, jobs1.stdout);
}

#[test]
fn transitions_claim() {
    let o = rpd(&["--format", "json", "transitions", &fixture("worked_hyp.json")]);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v[0]["scheme"], "BIO-Token");
    assert!(v[0]["i_to_o"].as_u64().unwrap() > 0);
    assert_eq!(v[1]["scheme"], "BIOMJ-Token");
    assert_eq!(v[1]["i_to_o"], 0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(fixture("brat/sermon.ann"), dir.path().join("lonely.ann")).unwrap();
    let o = rpd(&["convert", dir.path().to_str().unwrap()]);
    assert_eq!(o.code, EXIT_IO);
    assert!(o.stderr.contains("lonely.txt"), "{}", o.stderr);

    let o = rpd(&["stats", &fixture("does-not-exist.json")]);
    assert_eq!(o.code, EXIT_IO);

    let other = dir.path().join("other.json");
    fs::write(&other, fs::read_to_string(fixture("worked_hyp.json")).unwrap().replace("\"sermon\"", "\"orphan\"")).unwrap();
    let o = rpd(&["evaluate", &fixture("worked_gold.json"), other.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_MISMATCH);
    assert!(o.stderr.contains("orphan") && o.stderr.contains("sermon"), "{}", o.stderr);

    let bad = dir.path().join("bad.tsv");
    let tsv = "# scheme = BIOMJ-Token\n# doc = sermon\n# section = 1\n".to_string()
        + &"quotidie dicimus hoc , et quotidie facimus , et quotidie fit in nobis ."
            .split(' ')
            .enumerate()
            .map(|(i, t)| format!("{t}\t{}\n", if i == 4 { "I" } else { "O" }))
            .collect::<String>();
    fs::write(&bad, tsv).unwrap();
    let o = rpd(&["evaluate", &fixture("sermon.json"), bad.to_str().unwrap(), "--strict"]);
    assert_eq!(o.code, EXIT_STRICT);
    assert!(o.stderr.contains("token 5"), "{}", o.stderr);
    let o = rpd(&["evaluate", &fixture("sermon.json"), bad.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);

    assert_eq!(rpd(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(rpd(&["encode", &fixture("sermon.json"), "--scheme", "BIOX-Token"]).code, EXIT_USAGE);
    assert_eq!(rpd(&["--jobs", "0", "stats", &fixture("sermon.json")]).code, EXIT_USAGE);
    let help = rpd(&["--help"]);
    assert_eq!(help.code, EXIT_OK);
    assert!(help.stdout.contains("transitions"));
}

#[test]
fn strict_brat_failure() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("d.txt"), "ueni uidi uici").unwrap();
    fs::write(dir.path().join("d.ann"), "T1\tParallelArm 0 4\tueni\nR1\tParallel Arg1:T1 Arg2:T9\n").unwrap();
    let path = dir.path().to_str().unwrap();
    assert_eq!(rpd(&["convert", path, "--strict"]).code, EXIT_STRICT);
    let o = rpd(&["convert", path]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stderr.contains("error"), "{}", o.stderr);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("rpd.toml");
    fs::write(&cfg, "format = \"json\"\nmetrics = [\"epm\"]\n").unwrap();
    let c = cfg.to_str().unwrap();
    let o = rpd(&["--config", c, "evaluate", &fixture("worked_gold.json"), &fixture("worked_hyp.json")]);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["metrics"].as_array().unwrap().len(), 1);
    let o = rpd(&["--config", c, "--format", "text", "evaluate", &fixture("worked_gold.json"), &fixture("worked_hyp.json")]);
    assert!(o.stdout.starts_with("hypothesis:"));
    fs::write(&cfg, "colour = 1\n").unwrap();
    assert_eq!(rpd(&["--config", c, "stats", &fixture("sermon.json")]).code, EXIT_USAGE);
}

#[test]
fn normalization_flags() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.json");
    // branches "et quotidie facimus" and "et quotidie fit" share a leading
    // conjunction, while the first branch ends on punctuation
    fs::write(
        &input,
        r#"{"indexing":"1-inclusive","documents":[{"id":"d","tokens":["quotidie","dicimus","hoc",",","et","quotidie","facimus",",","et","quotidie","fit","in","nobis","."],"parallelisms":[{"branches":[[1,4],[5,7],[9,13]]}]}]}"#,
    )
    .unwrap();
    let o = rpd(&["convert", input.to_str().unwrap(), "--normalize", "punctuation,conjunctions"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["documents"][0]["parallelisms"][0]["branches"], serde_json::json!([[1, 3], [6, 7], [10, 13]]));
}
