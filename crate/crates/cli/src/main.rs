//! `ctxgram`: check, parse, normalize and enumerate grammars with two-sided
//! contexts.
//!
//! Exit codes: 0 accept or ok, 1 reject or diagnostic error, 2 usage or
//! I/O error, 3 oracle and parser disagree.

use std::collections::BTreeSet;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser as ClapParser, Subcommand, ValueEnum};
use serde_json::json;

use ctxgram::corpus::{self, CorpusError};
use ctxgram::deduction::Item;
use ctxgram::diag::{Diagnostic, Severity};
use ctxgram::grammar::{Grammar, NtId, Symbol};
use ctxgram::json::grammar_to_json;
use ctxgram::normalize::{
    compute_nullable_left_eps, compute_nullable_right_eps, compute_nullable_with, normalize_with_report, nullable_json,
    pre_normalize, render_triple, NormalizeOptions,
};
use ctxgram::parser::{Parser, ParserOptions};
use ctxgram::validate::has_errors;
use ctxgram::{parse_grammar, pretty_print, validate, Oracle};

#[derive(ClapParser)]
#[command(name = "ctxgram", version, about = "Grammars with two-sided contexts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a grammar and print its diagnostics.
    Check(Common),
    /// Decide whether an input is in the language.
    Parse(ParseArgs),
    /// Transform a grammar to binary normal form.
    Normalize(NormalizeArgs),
    /// List accepted strings up to a length, shortest first.
    Enumerate(EnumerateArgs),
    /// Print the nullable sets of the pre-normal form.
    Nullable(NullableArgs),
}

#[derive(Args)]
struct Common {
    /// A `.2cg` file or the id (or unique id prefix) of a corpus entry.
    grammar: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the main output to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ParseArgs {
    #[command(flatten)]
    common: Common,
    /// The input string, or `@path` to read it from a file.
    #[arg(long, allow_hyphen_values = true)]
    input: String,
    /// Decide membership with the reference deduction on the original
    /// grammar. Needed for the empty input.
    #[arg(long)]
    oracle: bool,
    /// Run both the reference deduction and the tabular parser and fail
    /// with exit code 3 if they disagree.
    #[arg(long, conflicts_with = "oracle")]
    compare: bool,
    /// Print a proof of the whole input.
    #[arg(long)]
    proof: bool,
    /// Print the parse table (or the derived items with --oracle).
    #[arg(long)]
    table: bool,
}

#[derive(Args)]
struct NormalizeArgs {
    #[command(flatten)]
    common: Common,
    /// Include the nullable triples in the report.
    #[arg(long)]
    nullable: bool,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 6)]
    max_len: usize,
}

#[derive(Args)]
struct NullableArgs {
    #[command(flatten)]
    common: Common,
    /// Keep triples implied by smaller ones.
    #[arg(long)]
    all: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

/// A failure with its exit code.
struct Fail {
    code: u8,
    error: anyhow::Error,
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail { code: 2, error: anyhow!(msg.into()) }
}

fn rejected(error: anyhow::Error) -> Fail {
    Fail { code: 1, error }
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Self {
        Fail { code: 2, error: e.into() }
    }
}

type Run = Result<u8, Fail>;

fn color_enabled() -> bool {
    match std::env::var("CTXGRAM_COLOR").as_deref() {
        Ok("1") => true,
        Ok("0") => false,
        _ => std::io::stderr().is_terminal(),
    }
}

fn print_diagnostic(origin: &str, d: &Diagnostic) {
    let line = format!("{origin}:{d}");
    if color_enabled() {
        let code = if d.severity == Severity::Error { "31" } else { "33" };
        eprintln!("\x1b[{code}m{line}\x1b[0m");
    } else {
        eprintln!("{line}");
    }
}

/// Reads a grammar from a file, or from the corpus when no such file
/// exists. Returns the grammar and a label for messages.
fn load_grammar(arg: &str) -> Result<(Grammar, String), Fail> {
    let path = Path::new(arg);
    if path.is_file() {
        let src = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {arg}"))
            .map_err(|error| Fail { code: 2, error })?;
        return match parse_grammar(&src) {
            Ok(g) => Ok((g, arg.to_string())),
            Err(diags) => {
                for d in &diags.0 {
                    print_diagnostic(arg, d);
                }
                Err(rejected(anyhow!("{arg}: the grammar has errors")))
            }
        };
    }
    if arg.contains(['/', '\\']) || arg.ends_with(".2cg") {
        return Err(usage(format!("cannot read {arg}: no such file")));
    }
    match corpus::load(arg) {
        Ok(e) => Ok((e.grammar, e.id.to_string())),
        Err(e @ (CorpusError::Unknown(_) | CorpusError::Ambiguous(..))) => {
            Err(usage(format!("{e}; not a file either (known entries: {})", corpus::ids().join(", "))))
        }
        Err(e) => Err(rejected(e.into())),
    }
}

fn load_valid(arg: &str) -> Result<(Grammar, String), Fail> {
    let (g, label) = load_grammar(arg)?;
    let diags = validate(&g);
    if has_errors(&diags) {
        for d in &diags {
            print_diagnostic(&label, d);
        }
        return Err(rejected(anyhow!("{label}: the grammar has errors")));
    }
    Ok((g, label))
}

fn read_input(arg: &str) -> Result<Vec<char>, Fail> {
    match arg.strip_prefix('@') {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read input file {path}"))
                .map_err(|error| Fail { code: 2, error })?;
            Ok(text.strip_suffix('\n').unwrap_or(&text).trim_end_matches('\r').chars().collect())
        }
        None => Ok(arg.chars().collect()),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Fail> {
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(|error| Fail { code: 2, error }),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn json_text(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn check(args: &Common) -> Run {
    if args.format == Format::Dot {
        return Err(usage("check supports --format text or json"));
    }
    let (g, label) = load_grammar(&args.grammar)?;
    let diags = validate(&g);
    if args.format == Format::Json {
        emit(&args.out, &json_text(&json!({ "grammar": label, "diagnostics": diags })))?;
    } else {
        for d in &diags {
            print_diagnostic(&label, d);
        }
        emit(&args.out, &format!("{label}: {} rules, {} nonterminals\n", g.rules().len(), g.num_nonterminals()))?;
    }
    Ok(if has_errors(&diags) { 1 } else { 0 })
}

fn verdict(b: bool) -> &'static str {
    if b {
        "accept"
    } else {
        "reject"
    }
}

fn parse(args: &ParseArgs) -> Run {
    let fmt = args.common.format;
    if fmt == Format::Dot && !args.proof {
        return Err(usage("--format dot needs --proof"));
    }
    let (g, _) = load_valid(&args.common.grammar)?;
    let w = read_input(&args.input)?;
    if let Err(ch) = g.check_input(&w) {
        return Err(rejected(anyhow!("input character {ch:?} is not in the alphabet")));
    }
    if w.is_empty() && !args.oracle {
        return Err(usage(
            "the tabular parser needs a non-empty input; the normal form cannot express the empty string, use --oracle",
        ));
    }
    let input: String = w.iter().collect();
    let n = w.len();

    // Each branch yields the verdict, the grammar proofs and tables refer
    // to, and the optional table and proof.
    let (accepted, proof_grammar, table_text, table_json, proof, oracle_verdict);
    if args.oracle {
        let items = Oracle::new(&g).map_err(|e| rejected(e.into()))?.derive(&w).map_err(|e| rejected(e.into()))?;
        let goal = Item::new(Symbol::N(g.start()), 0, n);
        accepted = items.contains_item(&goal);
        proof =
            if args.proof && accepted { Some(items.proof(&g, &goal).map_err(|e| rejected(e.into()))?) } else { None };
        table_text = items.derived_items().iter().map(|it| it.display(&g, &w) + "\n").collect::<String>();
        table_json = items.to_json(&g);
        proof_grammar = g.clone();
        oracle_verdict = None;
    } else {
        let nf = ctxgram::to_binary_normal_form(&g).map_err(|e| rejected(e.into()))?;
        let parser = Parser::with_options(&nf, ParserOptions { justify: args.proof, ..Default::default() });
        let t = parser.parse(&w).map_err(|e| rejected(e.into()))?;
        accepted = t.accepts();
        let goal = Item::new(Symbol::N(nf.start()), 0, n);
        proof = if args.proof && accepted {
            Some(t.extract_proof(&nf, &w, goal).map_err(|e| rejected(e.into()))?)
        } else {
            None
        };
        table_text = t.render_text(&nf);
        table_json = t.to_json(&nf);
        oracle_verdict = if args.compare {
            Some(Oracle::new(&g).and_then(|o| o.accepts(&w)).map_err(|e| rejected(e.into()))?)
        } else {
            None
        };
        proof_grammar = nf.into_inner();
    }

    let text = match fmt {
        Format::Dot => match &proof {
            Some(p) => p.to_dot(&proof_grammar, &w),
            None => String::new(),
        },
        Format::Json => {
            let mut v = json!({ "input": input, "accepted": accepted });
            if let Some(o) = oracle_verdict {
                v["oracle"] = json!(o);
                v["agree"] = json!(o == accepted);
            }
            if args.table {
                v["table"] = table_json;
            }
            if let Some(p) = &proof {
                v["proof"] = p.to_json(&proof_grammar, &w);
            }
            json_text(&v)
        }
        Format::Text => {
            let mut s = format!("{}\n", verdict(accepted));
            if let Some(o) = oracle_verdict {
                s.push_str(&format!("oracle: {}, parser: {}\n", verdict(o), verdict(accepted)));
            }
            if args.table {
                s.push_str(&table_text);
            }
            if let Some(p) = &proof {
                s.push_str(&p.render_text(&proof_grammar, &w));
            }
            s
        }
    };
    emit(&args.common.out, &text)?;
    if args.proof && !accepted {
        eprintln!("no proof: the input is rejected");
    }
    if let Some(o) = oracle_verdict {
        if o != accepted {
            eprintln!("divergence on {input:?}: oracle says {}, parser says {}", verdict(o), verdict(accepted));
            return Ok(3);
        }
    }
    Ok(if accepted { 0 } else { 1 })
}

fn names(g: &Grammar, s: &BTreeSet<NtId>) -> Vec<String> {
    s.iter().map(|&x| g.name(x).to_string()).collect()
}

fn normalize(args: &NormalizeArgs) -> Run {
    let fmt = args.common.format;
    if fmt == Format::Dot {
        return Err(usage("normalize supports --format text or json"));
    }
    let (g, label) = load_valid(&args.common.grammar)?;
    let (nf, report) = normalize_with_report(&g, NormalizeOptions::default()).map_err(|e| rejected(e.into()))?;
    let has_empty = Oracle::new(&g).and_then(|o| o.accepts(&[])).map_err(|e| rejected(e.into()))?;
    let pre = &report.pre_normal;
    match fmt {
        Format::Json => {
            let mut v = json!({
                "grammar": grammar_to_json(&nf),
                "stages": report.stages,
                "max_growth": report.max_growth(),
                "accepts_empty_string": has_empty,
            });
            if args.nullable {
                v["nullable"] = nullable_json(pre, &report.nullable.triples);
            }
            emit(&args.common.out, &json_text(&v))?;
        }
        _ => {
            emit(&args.common.out, &pretty_print(&nf))?;
            eprintln!("{label}:");
            for s in &report.stages {
                eprintln!("  {:<13} {:>6} rules {:>5} nonterminals", s.stage, s.rules, s.nonterminals);
            }
            eprintln!("  largest growth between stages: x{:.2}", report.max_growth());
            if args.nullable {
                eprintln!("nullable triples:");
                for t in &report.nullable.triples {
                    eprintln!("  {}", render_triple(pre, t));
                }
            }
        }
    }
    if has_empty {
        eprintln!("note: the empty string is in the language; the normal form omits it, `parse --oracle` decides it");
    }
    if nf.rules().is_empty() {
        eprintln!("warning: the normal form has no rules: no non-empty string is accepted");
    }
    Ok(0)
}

fn enumerate(args: &EnumerateArgs) -> Run {
    if args.common.format == Format::Dot {
        return Err(usage("enumerate supports --format text or json"));
    }
    let (g, _) = load_valid(&args.common.grammar)?;
    let lang = Oracle::new(&g).map_err(|e| rejected(e.into()))?.enumerate(args.max_len);
    let text = match args.common.format {
        Format::Json => json_text(&json!(lang)),
        _ => corpus::render_lang(&lang),
    };
    emit(&args.common.out, &text)?;
    Ok(0)
}

fn nullable(args: &NullableArgs) -> Run {
    if args.common.format == Format::Dot {
        return Err(usage("nullable supports --format text or json"));
    }
    let (g, _) = load_valid(&args.common.grammar)?;
    let pre = pre_normalize(&g);
    let analysis = compute_nullable_with(&pre, !args.all).map_err(|e| rejected(e.into()))?;
    let triples = analysis.triples();
    let left = compute_nullable_left_eps(triples);
    let right = compute_nullable_right_eps(triples);
    let text = match args.common.format {
        Format::Json => json_text(&json!({
            "triples": nullable_json(&pre, triples),
            "left": left.iter().map(|l| json!({ "A": pre.name(l.a), "V": names(&pre, &l.v), "right_edge": l.right_edge })).collect::<Vec<_>>(),
            "right": right.iter().map(|r| json!({ "U": names(&pre, &r.u), "A": pre.name(r.a), "left_edge": r.left_edge })).collect::<Vec<_>>(),
        })),
        _ => {
            let mut s = String::new();
            for t in triples {
                s.push_str(&format!("{}\n", render_triple(&pre, t)));
            }
            for l in &left {
                let flag = if l.right_edge { " >eps" } else { "" };
                s.push_str(&format!(
                    "empty left context: ({}, {{{}}}){flag}\n",
                    pre.name(l.a),
                    names(&pre, &l.v).join(", ")
                ));
            }
            for r in &right {
                let flag = if r.left_edge { " <eps" } else { "" };
                s.push_str(&format!(
                    "empty right context: ({{{}}}, {}){flag}\n",
                    names(&pre, &r.u).join(", "),
                    pre.name(r.a)
                ));
            }
            s
        }
    };
    emit(&args.common.out, &text)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check(a) => check(a),
        Command::Parse(a) => parse(a),
        Command::Normalize(a) => normalize(a),
        Command::Enumerate(a) => enumerate(a),
        Command::Nullable(a) => nullable(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Fail { code, error }) => {
            eprintln!("ctxgram: {error:#}");
            ExitCode::from(code)
        }
    }
}
