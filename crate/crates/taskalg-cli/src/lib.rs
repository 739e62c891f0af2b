//! Command-line front end: parse, enumerate, check and compare task flow
//! models, with text, JSON and DOT output.

pub mod dot;
pub mod json;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use taskalg::analysis::{compare, CompareOptions, Relation};
use taskalg::ast::ResolvedModel;
use taskalg::modelcheck::{build_prefix_tree, check_ctl, check_ltl, parse_query, Query, Verdict};
use taskalg::semantics::{enumerate_traces, EnumConfig, Enumeration, SemanticsError, TraceSet};

/// Process exit codes. Verdict-bearing commands never return `Success`
/// when the property fails or the sets differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    /// Command succeeded; a checked property holds; compared sets are equal.
    Success = 0,
    /// The property fails or the sets differ.
    Differs = 1,
    /// Usage, parse, resolution or query error.
    Usage = 2,
    /// A resource cap truncated the enumeration.
    ResourceCap = 3,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Parser)]
#[command(name = "taskalg", version, about = "Task flow algebra toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a model file and pretty-print it
    Parse {
        file: PathBuf,
        /// Dump the abstract syntax tree instead
        #[arg(long)]
        ast: bool,
    },
    /// Enumerate all complete execution paths
    Traces {
        file: PathBuf,
        /// Maximum loop-body executions per loop
        #[arg(long, default_value_t = 3)]
        unroll: u32,
        #[arg(long = "max-traces", default_value_t = 10_000)]
        max_traces: usize,
        #[arg(long = "max-events", default_value_t = 1_000)]
        max_events: usize,
        /// text, json, or dot (the prefix tree)
        #[arg(long, value_enum, default_value_t = TraceFormat::Text)]
        format: TraceFormat,
    },
    /// Check an LTL or CTL query against the trace set
    Check {
        file: PathBuf,
        /// Query text, e.g. "CTL: EF failed"
        #[arg(long)]
        query: Option<String>,
        /// Read the query from a file instead
        #[arg(long = "query-file")]
        query_file: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        unroll: u32,
        #[arg(long, value_enum, default_value_t = CheckFormat::Text)]
        format: CheckFormat,
    },
    /// Compare the trace sets of two models
    Eq {
        file1: PathBuf,
        file2: PathBuf,
        #[arg(long, default_value_t = 3)]
        unroll: u32,
        /// Strip recorded branch assumptions before comparing
        #[arg(long = "ignore-assumes")]
        ignore_assumes: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TraceFormat {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckFormat {
    Text,
    Json,
}

struct Style {
    enabled: bool,
}

impl Style {
    fn from_env() -> Self {
        Style {
            enabled: std::env::var("TASKALG_COLOR").as_deref() == Ok("1"),
        }
    }

    fn good(&self, text: &str) -> String {
        if self.enabled {
            format!("\x1b[32m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    fn bad(&self, text: &str) -> String {
        if self.enabled {
            format!("\x1b[31m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }
}

/// Entry point shared by the binary and the tests. Streams all output to
/// the given writers and returns the exit code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return if e.use_stderr() {
                let _ = write!(err, "{e}");
                ExitCode::Usage.code()
            } else {
                // --help and --version
                let _ = write!(out, "{e}");
                ExitCode::Success.code()
            };
        }
    };
    let style = Style::from_env();
    match cli.command {
        Command::Parse { file, ast } => cmd_parse(&file, ast, out, err),
        Command::Traces {
            file,
            unroll,
            max_traces,
            max_events,
            format,
        } => {
            if max_traces == 0 || max_events == 0 {
                let _ = writeln!(err, "error: --max-traces and --max-events must be positive");
                return ExitCode::Usage.code();
            }
            let config = EnumConfig {
                unroll_bound: unroll,
                max_traces,
                max_events_per_trace: max_events,
            };
            cmd_traces(&file, &config, format, out, err)
        }
        Command::Check {
            file,
            query,
            query_file,
            unroll,
            format,
        } => cmd_check(&file, query, query_file, unroll, format, &style, out, err),
        Command::Eq {
            file1,
            file2,
            unroll,
            ignore_assumes,
        } => cmd_eq(&file1, &file2, unroll, ignore_assumes, &style, out, err),
    }
}

fn load_model(path: &Path, err: &mut dyn Write) -> Result<ResolvedModel, i32> {
    let text = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
            return Err(ExitCode::Usage.code());
        }
    };
    let model = match taskalg::parse_model(&text) {
        Ok(model) => model,
        Err(diag) => {
            let _ = writeln!(err, "error: {}: {diag}", path.display());
            return Err(ExitCode::Usage.code());
        }
    };
    match taskalg::resolve(model) {
        Ok(resolved) => Ok(resolved),
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            Err(ExitCode::Usage.code())
        }
    }
}

fn cmd_parse(file: &Path, ast: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let resolved = match load_model(file, err) {
        Ok(resolved) => resolved,
        Err(code) => return code,
    };
    if ast {
        let _ = writeln!(out, "{:#?}", resolved.model());
    } else {
        let _ = writeln!(out, "{}", taskalg::pretty::print_model(resolved.model()));
    }
    ExitCode::Success.code()
}

/// Enumerates, forwarding warnings to stderr. A capped enumeration still
/// prints its partial set but exits with the resource-cap code.
fn enumerate(
    resolved: &ResolvedModel,
    config: &EnumConfig,
    err: &mut dyn Write,
) -> Result<(TraceSet, i32), i32> {
    match enumerate_traces(resolved, config) {
        Ok(Enumeration { set, warnings }) => {
            for warning in warnings {
                let _ = writeln!(err, "warning: {warning}");
            }
            Ok((set, ExitCode::Success.code()))
        }
        Err(SemanticsError::TraceExplosion { partial }) => {
            let _ = writeln!(
                err,
                "error: trace enumeration exceeded resource caps; output is partial"
            );
            Ok((partial, ExitCode::ResourceCap.code()))
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            Err(ExitCode::Usage.code())
        }
    }
}

fn cmd_traces(
    file: &Path,
    config: &EnumConfig,
    format: TraceFormat,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let resolved = match load_model(file, err) {
        Ok(resolved) => resolved,
        Err(code) => return code,
    };
    let (set, code) = match enumerate(&resolved, config, err) {
        Ok(result) => result,
        Err(code) => return code,
    };
    match format {
        TraceFormat::Text => {
            for trace in set.iter() {
                let _ = writeln!(out, "{trace}");
            }
            if set.flags.loop_bound_hit {
                let _ = writeln!(
                    err,
                    "note: loop unroll bound reached; the set is a lower approximation"
                );
            }
        }
        TraceFormat::Json => {
            let _ = writeln!(out, "{}", json::trace_set_to_json(&set));
        }
        TraceFormat::Dot => {
            let tree = build_prefix_tree(&set);
            let _ = write!(out, "{}", dot::tree_to_dot(&tree));
        }
    }
    code
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    file: &Path,
    query: Option<String>,
    query_file: Option<PathBuf>,
    unroll: u32,
    format: CheckFormat,
    style: &Style,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let query_text = match (query, query_file) {
        (Some(text), None) => text,
        (None, Some(path)) => match std::fs::read_to_string(&path) {
            Ok(text) => text.trim().to_string(),
            Err(e) => {
                let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
                return ExitCode::Usage.code();
            }
        },
        _ => {
            let _ = writeln!(err, "error: provide exactly one of --query or --query-file");
            return ExitCode::Usage.code();
        }
    };
    let parsed = match parse_query(&query_text) {
        Ok(parsed) => parsed,
        Err(e) => {
            let _ = writeln!(err, "error: query: {e}");
            return ExitCode::Usage.code();
        }
    };
    let resolved = match load_model(file, err) {
        Ok(resolved) => resolved,
        Err(code) => return code,
    };
    let config = EnumConfig::with_unroll(unroll);
    let (set, code) = match enumerate(&resolved, &config, err) {
        Ok(result) => result,
        Err(code) => return code,
    };
    if code != ExitCode::Success.code() {
        return code;
    }
    let verdict = match &parsed {
        Query::Ltl(f) => check_ltl(&set, f),
        Query::Ctl(f) => {
            let tree = build_prefix_tree(&set);
            check_ctl(&tree, f)
        }
    };
    let verdict = match verdict {
        Ok(verdict) => verdict,
        Err(e) => {
            let _ = writeln!(err, "error: query: {e}");
            return ExitCode::Usage.code();
        }
    };
    print_verdict(&verdict, &parsed, format, style, out);
    if verdict.holds {
        ExitCode::Success.code()
    } else {
        ExitCode::Differs.code()
    }
}

fn print_verdict(
    verdict: &Verdict,
    query: &Query,
    format: CheckFormat,
    style: &Style,
    out: &mut dyn Write,
) {
    match format {
        CheckFormat::Json => {
            let _ = writeln!(out, "{}", json::verdict_to_json(verdict));
        }
        CheckFormat::Text => {
            let result = if verdict.holds {
                style.good("holds")
            } else {
                style.bad("does not hold")
            };
            let _ = writeln!(out, "result: {result}");
            let _ = writeln!(
                out,
                "assumption-dependent: {}",
                verdict.assumption_dependent
            );
            if let Some(trace) = &verdict.evidence {
                let role = match (verdict.holds, query) {
                    (true, Query::Ctl(_)) => "witness",
                    _ => "counterexample",
                };
                let _ = writeln!(out, "{role}: {trace}");
            }
        }
    }
}

fn cmd_eq(
    file1: &Path,
    file2: &Path,
    unroll: u32,
    ignore_assumes: bool,
    style: &Style,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let left = match load_model(file1, err) {
        Ok(resolved) => resolved,
        Err(code) => return code,
    };
    let right = match load_model(file2, err) {
        Ok(resolved) => resolved,
        Err(code) => return code,
    };
    let config = EnumConfig::with_unroll(unroll);
    let options = CompareOptions { ignore_assumes };
    let report = match compare(&left, &right, &config, options) {
        Ok(report) => report,
        Err(SemanticsError::TraceExplosion { .. }) => {
            let _ = writeln!(err, "error: trace enumeration exceeded resource caps");
            return ExitCode::ResourceCap.code();
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return ExitCode::Usage.code();
        }
    };
    let relation = if report.relation == Relation::Equal {
        style.good(&report.relation.to_string())
    } else {
        style.bad(&report.relation.to_string())
    };
    let _ = writeln!(out, "relation: {relation}");
    let _ = writeln!(out, "flags-differ: {}", report.flags_differ);
    for trace in &report.left_only {
        let _ = writeln!(out, "left-only: {trace}");
    }
    for trace in &report.right_only {
        let _ = writeln!(out, "right-only: {trace}");
    }
    if report.relation == Relation::Equal {
        ExitCode::Success.code()
    } else {
        ExitCode::Differs.code()
    }
}
