use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "rpd", version, about = "Rhetorical parallelism data tooling", propagate_version = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Report format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for every random choice (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// TOML file with default values for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Language profile: latin or chinese.
    #[arg(long, global = true, env = "RPD_LANGUAGE")]
    pub language: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert BRAT, canonical JSON or tag TSV into canonical JSON or TSV.
    Convert(ConvertArgs),
    /// Score hypothesis parallelisms against a reference.
    Evaluate(EvaluateArgs),
    /// Corpus statistics of the reference layer.
    Stats(StatsArgs),
    /// Assign documents to splits and verify their comparability.
    Split(SplitArgs),
    /// Bootstrap agreement between two annotation layers.
    Agree(AgreeArgs),
    /// Lexical-overlap baseline detector.
    Baseline(BaselineArgs),
    /// Tag transition counts under one or more schemes.
    Transitions(TransitionsArgs),
    /// Encode a canonical corpus as tag TSV.
    Encode(EncodeArgs),
    /// Decode tag TSV into a canonical corpus.
    Decode(DecodeArgs),
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// BRAT directory, `.ann` file, canonical JSON or TSV ("-" for stdin).
    pub input: String,
    /// Output path ("-" for stdout).
    #[arg(short, long, default_value = "-")]
    pub output: String,
    /// Target format.
    #[arg(long, value_enum, default_value = "canonical")]
    pub to: Target,
    /// Tag scheme for TSV output.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Normalizations to apply: conjunctions, interlocking, punctuation.
    #[arg(long, value_delimiter = ',')]
    pub normalize: Vec<Normalization>,
    /// Intervening non-punctuation tokens still counted as adjacent when
    /// collapsing interlocking parallelisms.
    #[arg(long)]
    pub slack: Option<usize>,
    /// Fail on any error-level diagnostic or invalid tag transition.
    #[arg(long)]
    pub strict: bool,
    /// Clamp BRAT parallelisms crossing a blank line to their first section.
    #[arg(long)]
    pub clamp_sections: bool,
    /// Corpus name for BRAT input.
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Canonical,
    Tsv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Normalization {
    Conjunctions,
    Interlocking,
    Punctuation,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Reference corpus (canonical JSON or TSV).
    pub gold: String,
    /// Hypothesis corpus; its reference layer is scored. Omit to score a
    /// hypothesis layer of the gold file.
    pub hypothesis: Option<String>,
    /// Hypothesis layer name inside the gold file.
    #[arg(long)]
    pub layer: Option<String>,
    /// Metrics to report: epm, mpbm, mbawo, mwo.
    #[arg(long, value_delimiter = ',')]
    pub metrics: Vec<String>,
    /// Add per-document scores.
    #[arg(long)]
    pub per_doc: bool,
    /// Add the error taxonomy table.
    #[arg(long)]
    pub errors: bool,
    /// Reject invalid tag transitions in TSV input.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Corpus (canonical JSON or TSV; "-" for stdin).
    pub input: String,
    /// Dataset label in the tables.
    #[arg(long)]
    pub name: Option<String>,
    /// Standard deviation: sample or population.
    #[arg(long)]
    pub std: Option<String>,
    /// Also emit an NLO histogram with this many bins.
    #[arg(long)]
    pub histogram: Option<usize>,
    /// Reject invalid tag transitions in TSV input.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Corpus whose documents are the files to split.
    pub input: String,
    /// Target ratios as name=ratio pairs.
    #[arg(long)]
    pub ratios: Option<String>,
    /// BIOM-family scheme used to count tags.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Write the {file: split} JSON here.
    #[arg(long)]
    pub assignment: Option<String>,
    /// Write the TSV manifest here.
    #[arg(long)]
    pub manifest: Option<String>,
    /// Reject invalid tag transitions in TSV input.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct AgreeArgs {
    /// First annotator (canonical JSON or TSV).
    pub first: String,
    /// Second annotator. Omit to compare against a layer of the first file.
    pub second: Option<String>,
    /// Layer of the first file to compare against.
    #[arg(long)]
    pub layer: Option<String>,
    /// Metrics to report: epm, mpbm, mbawo, mwo.
    #[arg(long, value_delimiter = ',')]
    pub metrics: Vec<String>,
    /// Bootstrap trials.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Reject invalid tag transitions in TSV input.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    /// Corpus to scan (canonical JSON or TSV).
    pub input: String,
    /// Output corpus path ("-" for stdout).
    #[arg(short, long, default_value = "-")]
    pub output: String,
    /// Layer that receives the detections.
    #[arg(long, default_value = "baseline")]
    pub layer: String,
    /// Minimum normalized lexical overlap between two branches (default 0.3).
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Most tokens allowed between consecutive branches (default 2).
    #[arg(long)]
    pub max_gap: Option<usize>,
    /// Shortest candidate branch in tokens (default 2).
    #[arg(long)]
    pub min_len: Option<usize>,
    /// Longest candidate branch in tokens (default 4).
    #[arg(long)]
    pub max_len: Option<usize>,
    /// Reject invalid tag transitions in TSV input.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct TransitionsArgs {
    /// Corpus (canonical JSON or TSV).
    pub input: String,
    /// Schemes to tally (repeatable; default BIO-Token and BIOMJ-Token).
    #[arg(long)]
    pub scheme: Vec<String>,
    /// Tally this hypothesis layer instead of the reference.
    #[arg(long)]
    pub layer: Option<String>,
    /// Reject invalid tag transitions in TSV input.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    /// Canonical corpus ("-" for stdin).
    pub input: String,
    /// Output path ("-" for stdout).
    #[arg(short, long, default_value = "-")]
    pub output: String,
    /// Tag scheme (default BIOMJ-Token).
    #[arg(long)]
    pub scheme: Option<String>,
    /// Encode this hypothesis layer instead of the reference.
    #[arg(long)]
    pub layer: Option<String>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    /// Tag TSV ("-" for stdin).
    pub input: String,
    /// Output path ("-" for stdout).
    #[arg(short, long, default_value = "-")]
    pub output: String,
    /// Reject tags or transitions the scheme cannot produce.
    #[arg(long)]
    pub strict: bool,
    /// Corpus name of the result.
    #[arg(long)]
    pub name: Option<String>,
}
