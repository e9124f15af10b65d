//! The `rpd` command line.
//!
//! Exit codes: 0 success, 1 usage, 2 I/O or unreadable input, 3 data
//! mismatch, 4 strict-mode validation failure.

mod args;
mod commands;
mod config;

pub use args::Format;
pub use config::FileConfig;

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use clap::Parser;

use crate::ingest::{decode_tsv, read_corpus_str, read_tsv, IngestError, Language};
use crate::model::{Corpus, ModelError};
use crate::tagging::{DecodeMode, TagScheme};

use args::{Cli, Command};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;
pub const EXIT_STRICT: i32 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(m: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: m.into() }
    }
    pub fn io(m: impl Into<String>) -> Self {
        CliError { code: EXIT_IO, message: m.into() }
    }
    pub fn mismatch(m: impl Into<String>) -> Self {
        CliError { code: EXIT_MISMATCH, message: m.into() }
    }
    pub fn strict(m: impl Into<String>) -> Self {
        CliError { code: EXIT_STRICT, message: m.into() }
    }

    fn ingest(source: &str, e: IngestError) -> Self {
        let code = match &e {
            IngestError::Io(_) | IngestError::Json(_) | IngestError::Schema { .. } | IngestError::Tsv { .. } => EXIT_IO,
            IngestError::Strict(_) => EXIT_STRICT,
            IngestError::Model(_) | IngestError::Tagging(_) => EXIT_MISMATCH,
        };
        let mut message = format!("{source}: {e}");
        if let IngestError::Strict(diags) = &e {
            for d in diags {
                message.push_str(&format!("\n  {d}"));
            }
        }
        CliError { code, message }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::mismatch(e.to_string())
    }
}

/// Settings shared by every subcommand after merging flags, environment
/// and config file.
#[derive(Debug, Clone)]
pub struct Settings {
    pub format: Format,
    pub seed: u64,
    pub language: Language,
    pub file: FileConfig,
}

/// Streams and resolved settings of one invocation.
pub(crate) struct Ctx<'a> {
    stdin: Option<&'a mut (dyn Read + Send)>,
    pub stdout: &'a mut (dyn Write + Send),
    pub stderr: &'a mut (dyn Write + Send),
    pub settings: Settings,
}

impl Ctx<'_> {
    /// Reads a whole input; `-` is stdin and may be used once.
    pub fn read(&mut self, path: &str) -> Result<String, CliError> {
        if path == "-" {
            let stdin = self.stdin.take().ok_or_else(|| CliError::usage("stdin (\"-\") can be read only once"))?;
            let mut s = String::new();
            stdin.read_to_string(&mut s).map_err(|e| CliError::io(format!("stdin: {e}")))?;
            return Ok(s);
        }
        fs::read_to_string(path).map_err(|e| CliError::io(format!("{path}: {e}")))
    }

    /// Writes `content` to `path`; `-` is stdout.
    pub fn write(&mut self, path: &str, content: &str) -> Result<(), CliError> {
        if path == "-" {
            return self.stdout.write_all(content.as_bytes()).map_err(|e| CliError::io(format!("stdout: {e}")));
        }
        fs::write(path, content).map_err(|e| CliError::io(format!("{path}: {e}")))
    }

    pub fn warn(&mut self, message: &str) {
        let _ = writeln!(self.stderr, "warning: {message}");
    }

    /// Where a report goes: stdout unless data already goes there.
    pub fn report(&mut self, data_path: &str, content: &str) -> Result<(), CliError> {
        let out: &mut dyn Write = if data_path == "-" { self.stderr } else { self.stdout };
        out.write_all(content.as_bytes()).map_err(|e| CliError::io(e.to_string()))
    }

    /// Reads a corpus from canonical JSON or tag TSV, told apart by the
    /// first non-blank character.
    pub fn load_corpus(&mut self, path: &str, strict: bool) -> Result<Corpus, CliError> {
        let text = self.read(path)?;
        let source = if path == "-" { "stdin" } else { path };
        if text.trim_start().starts_with('{') {
            return read_corpus_str(&text).map_err(|e| CliError::ingest(source, e));
        }
        let file = read_tsv(&text).map_err(|e| CliError::ingest(source, e))?;
        let mode = if strict { DecodeMode::Strict } else { DecodeMode::Lenient };
        let decoded = decode_tsv(&file, mode).map_err(|e| {
            let mut err = CliError::ingest(source, e);
            if strict {
                err.code = EXIT_STRICT;
            }
            err
        })?;
        let mut docs = Vec::with_capacity(decoded.len());
        for d in decoded {
            if d.repairs > 0 {
                self.warn(&format!("{source}: document {:?}: {} lenient repair(s)", d.document.id(), d.repairs));
            }
            if d.singletons > 0 {
                self.warn(&format!("{source}: document {:?}: {} single-branch group(s) dropped", d.document.id(), d.singletons));
            }
            docs.push(d.document);
        }
        let name = Path::new(path).file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Ok(Corpus::new(if path == "-" { String::new() } else { name }, docs)?)
    }

    pub fn scheme(&self, flag: Option<&str>, default: &str) -> Result<TagScheme, CliError> {
        let name = flag.or(self.settings.file.scheme.as_deref()).unwrap_or(default);
        name.parse().map_err(|e| CliError::usage(format!("{e}")))
    }

    pub fn strict(&self, flag: bool) -> bool {
        flag || self.settings.file.strict.unwrap_or(false)
    }
}

fn settings(cli: &Cli, config_text: Option<String>) -> Result<Settings, CliError> {
    let file = match config_text {
        Some(text) => FileConfig::parse(&text)
            .map_err(|e| CliError::usage(format!("{}: {e}", cli.global.config.as_ref().expect("set").display())))?,
        None => FileConfig::default(),
    };
    let language = match cli.global.language.as_deref().or(file.language.as_deref()) {
        Some(l) => l.parse().map_err(CliError::usage)?,
        None => Language::default(),
    };
    Ok(Settings {
        format: cli.global.format.or(file.format).unwrap_or(Format::Text),
        seed: cli.global.seed.or(file.seed).unwrap_or(0),
        language,
        file,
    })
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code.
pub fn run<I, T>(args: I, stdin: &mut (dyn Read + Send), stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let out: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(out, "{}", e.render());
            return code;
        }
    };
    match execute(cli, stdin, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

fn execute(cli: Cli, stdin: &mut (dyn Read + Send), stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let config_text = match &cli.global.config {
        Some(p) => Some(fs::read_to_string(p).map_err(|e| CliError::io(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let settings = settings(&cli, config_text)?;
    let jobs = cli.global.jobs.or(settings.file.jobs);
    if jobs == Some(0) {
        return Err(CliError::usage("--jobs must be at least 1"));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::usage(e.to_string()))?;
    let mut ctx = Ctx { stdin: Some(stdin), stdout, stderr, settings };
    pool.install(|| match cli.command {
        Command::Convert(a) => commands::convert(&mut ctx, a),
        Command::Evaluate(a) => commands::evaluate(&mut ctx, a),
        Command::Stats(a) => commands::stats(&mut ctx, a),
        Command::Split(a) => commands::split(&mut ctx, a),
        Command::Agree(a) => commands::agree(&mut ctx, a),
        Command::Baseline(a) => commands::baseline(&mut ctx, a),
        Command::Transitions(a) => commands::transitions(&mut ctx, a),
        Command::Encode(a) => commands::encode_cmd(&mut ctx, a),
        Command::Decode(a) => commands::decode_cmd(&mut ctx, a),
    })
}
