//! The `pwo` command line: validate, query, contents, convert and link.
//!
//! Commands return an [`Outcome`] instead of printing, so tests can drive
//! them in-process. Exit codes: 0 success, 1 validation errors, 2 input,
//! transport or syntax failure.

mod contents;

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use pwo_core::federation::{self, load_sources, LoadDiagnostics};
use pwo_core::ontology::{validate, vocabulary_for, Vocabulary};
use pwo_core::rdfxml::{serialize_ntriples, serialize_rdfxml};
use pwo_core::sparql::{evaluate, parse_query, render};
use pwo_core::{Dataset, Graph, LoadOptions, ResultFormat, SourceSpec};

pub use contents::{contents_query, contents_table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "pwo", version, about = "Personal-web ontology toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub config: Config,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Config {
    /// Fetch timeout per source, in milliseconds.
    #[arg(long, global = true, env = "PWO_TIMEOUT_MS", default_value_t = federation::DEFAULT_TIMEOUT_MS)]
    pub timeout_ms: u64,
    /// Skip sources that fail to load instead of aborting.
    #[arg(long, global = true)]
    pub partial: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config { timeout_ms: federation::DEFAULT_TIMEOUT_MS, partial: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Tsv,
    Json,
    Xml,
}

impl From<Format> for ResultFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => ResultFormat::Text,
            Format::Csv => ResultFormat::Csv,
            Format::Tsv => ResultFormat::Tsv,
            Format::Json => ResultFormat::Json,
            Format::Xml => ResultFormat::Xml,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Syntax {
    Rdfxml,
    Ntriples,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check each source against the vocabulary's domains and ranges.
    Validate {
        #[arg(required = true)]
        sources: Vec<String>,
        /// Treat warnings, and missing hasPart/isPartOf pairs, as errors.
        #[arg(long)]
        strict: bool,
    },
    /// Run a query file over the merged sources.
    Query {
        #[arg(long)]
        query: PathBuf,
        #[arg(required = true)]
        sources: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// List documents by scope and subscope across all sources.
    Contents {
        #[arg(required = true)]
        sources: Vec<String>,
        /// Only rows whose scope is this domain individual.
        #[arg(long)]
        domain: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Re-serialize one source.
    Convert {
        source: String,
        #[arg(long, value_enum)]
        to: Syntax,
    },
    /// Print a share link that hands the query to a remote endpoint.
    Link {
        #[arg(long)]
        endpoint: String,
        #[arg(long)]
        query: PathBuf,
        sources: Vec<String>,
    },
}

/// What a command produced. `stdout` carries only the payload.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn failure(err: anyhow::Error) -> Self {
        Outcome { code: EXIT_FAILURE, stdout: String::new(), stderr: format!("error: {err:#}\n") }
    }
}

pub fn run(cli: Cli) -> Outcome {
    let config = cli.config;
    if config.timeout_ms == 0 {
        return Outcome::failure(anyhow::anyhow!("timeout must be at least 1 ms"));
    }
    let result = match cli.command {
        Command::Validate { sources, strict } => cmd_validate(&sources, strict, &config),
        Command::Query { query, sources, format } => cmd_query(&query, &sources, format.into(), &config),
        Command::Contents { sources, domain, format } => {
            cmd_contents(&sources, domain.as_deref(), format.into(), &config)
        }
        Command::Convert { source, to } => cmd_convert(&source, to, &config),
        Command::Link { endpoint, query, sources } => cmd_link(&endpoint, &query, &sources),
    };
    result.unwrap_or_else(Outcome::failure)
}

fn options(config: &Config) -> LoadOptions {
    LoadOptions { timeout_ms: config.timeout_ms, partial: config.partial }
}

/// Loads `sources`, returning the dataset and any warnings for stderr.
pub fn load(sources: &[String], config: &Config) -> anyhow::Result<(Dataset, String)> {
    let specs = SourceSpec::list(sources);
    let (dataset, diagnostics) = load_sources(&specs, options(config))?;
    Ok((dataset, describe(&diagnostics, &specs)))
}

fn describe(d: &LoadDiagnostics, specs: &[SourceSpec]) -> String {
    let mut out = String::new();
    for (id, w) in &d.warnings {
        let _ = writeln!(out, "warning: {} line {}: {}", specs[*id].location, w.line, w.message);
    }
    for e in &d.skipped {
        let _ = writeln!(out, "warning: skipped {e}");
    }
    out
}

/// The vocabulary a source uses: whatever namespace its declarations or
/// predicates reveal, else the one under the source's own base.
pub fn source_vocabulary(graph: &Graph, spec: &SourceSpec) -> anyhow::Result<Vocabulary> {
    match Vocabulary::detect(graph) {
        Some(v) => Ok(v),
        None => Ok(vocabulary_for(&spec.base()?)),
    }
}

pub fn cmd_validate(sources: &[String], strict: bool, config: &Config) -> anyhow::Result<Outcome> {
    let (dataset, mut stderr) = load(sources, config)?;
    let mut stdout = String::new();
    let mut failed = false;
    for (id, graph) in &dataset.per_source {
        let spec = dataset.source(*id).expect("loaded sources have specs");
        let vocabulary = source_vocabulary(graph, spec)?;
        let report = validate(graph, &vocabulary.base(), strict);
        let (errors, warnings) = (report.error_count(), report.warning_count());
        let _ = writeln!(stdout, "{}: {errors} error(s), {warnings} warning(s)", spec.location);
        stdout.push_str(&report.to_string());
        failed |= errors > 0 || (strict && warnings > 0);
    }
    if failed {
        stderr.push_str("validation failed\n");
    }
    Ok(Outcome { code: if failed { EXIT_INVALID } else { EXIT_OK }, stdout, stderr })
}

fn read_query(path: &PathBuf) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read query file {}", path.display()))
}

pub fn cmd_query(
    query: &PathBuf,
    sources: &[String],
    format: ResultFormat,
    config: &Config,
) -> anyhow::Result<Outcome> {
    let text = read_query(query)?;
    let ast = parse_query(&text).with_context(|| format!("in {}", query.display()))?;
    let (dataset, stderr) = load(sources, config)?;
    let table = evaluate(&ast, &dataset.merged);
    Ok(Outcome { code: EXIT_OK, stdout: render(&table, format), stderr })
}

pub fn cmd_contents(
    sources: &[String],
    domain: Option<&str>,
    format: ResultFormat,
    config: &Config,
) -> anyhow::Result<Outcome> {
    if let Some(name) = domain {
        if !pwo_core::model::is_xml_name(name) {
            bail!("domain name {name:?} is not a valid local name");
        }
    }
    let (dataset, stderr) = load(sources, config)?;
    let table = contents_table(&dataset, domain)?;
    Ok(Outcome { code: EXIT_OK, stdout: render(&table, format), stderr })
}

pub fn cmd_convert(source: &str, to: Syntax, config: &Config) -> anyhow::Result<Outcome> {
    let (dataset, stderr) = load(&[source.to_string()], config)?;
    let graph = &dataset.per_source[&0];
    let stdout = match to {
        Syntax::Ntriples => serialize_ntriples(graph),
        Syntax::Rdfxml => {
            let base = source_vocabulary(graph, &dataset.sources[0])?.base();
            serialize_rdfxml(graph, &base)
        }
    };
    Ok(Outcome { code: EXIT_OK, stdout, stderr })
}

pub fn cmd_link(endpoint: &str, query: &PathBuf, sources: &[String]) -> anyhow::Result<Outcome> {
    let text = read_query(query)?;
    let link = federation::make_share_link(endpoint, &text, sources)?;
    Ok(Outcome::ok(format!("{link}\n")))
}
