//! Embedded example grammars with golden languages.
//!
//! Each entry lives in `corpus/<id>/`: `grammar.2cg`, `notes.md` (prose
//! followed by `key: value` lines), `lang.txt` (accepted inputs, one per
//! line, shortest first, then lexicographic; the empty string is an empty
//! line) and optionally `trace.txt` and `table.json`. `notes.md` records
//! the SHA-256 of the grammar source the goldens were generated from, so an
//! edited grammar with old goldens is reported as stale.

use std::collections::BTreeSet;

use sha2::{Digest, Sha256};

use crate::diag::Diagnostics;
use crate::dsl::parse_grammar;
use crate::grammar::Grammar;
use crate::oracle::Oracle;

/// Raw embedded files of one entry.
#[derive(Clone, Copy, Debug)]
pub struct RawEntry {
    pub id: &'static str,
    pub grammar: &'static str,
    pub notes: &'static str,
    pub lang: &'static str,
    pub trace: Option<&'static str>,
    pub table: Option<&'static str>,
}

macro_rules! entry {
    ($id:literal) => {
        entry!($id, None, None)
    };
    ($id:literal, trace) => {
        entry!($id, Some(include_str!(concat!("../corpus/", $id, "/trace.txt"))), None)
    };
    ($id:literal, table) => {
        entry!($id, None, Some(include_str!(concat!("../corpus/", $id, "/table.json"))))
    };
    ($id:literal, $trace:expr, $table:expr) => {
        RawEntry {
            id: $id,
            grammar: include_str!(concat!("../corpus/", $id, "/grammar.2cg")),
            notes: include_str!(concat!("../corpus/", $id, "/notes.md")),
            lang: include_str!(concat!("../corpus/", $id, "/lang.txt")),
            trace: $trace,
            table: $table,
        }
    };
}

pub const RAW: &[RawEntry] = &[
    entry!("ex1-abca", trace),
    entry!("ex-s5-cycle", table),
    entry!("ex2-decl"),
    entry!("ex3-proto"),
    entry!("ex4-graph"),
    entry!("ex-s4-cf"),
    entry!("ex-s4-twosided"),
    entry!("uv-gadget"),
    entry!("edge-flags"),
    entry!("null-extended"),
];

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CorpusError {
    #[error("unknown corpus entry `{0}`")]
    Unknown(String),
    #[error("corpus entry `{0}` matches several entries: {1}")]
    Ambiguous(String, String),
    #[error("corpus entry `{id}`: golden files are stale (grammar hash {actual}, recorded {recorded})")]
    Stale { id: String, actual: String, recorded: String },
    #[error("corpus entry `{id}`: {source}")]
    Grammar { id: String, source: Diagnostics },
    #[error("corpus entry `{id}`: {message}")]
    Notes { id: String, message: String },
}

/// Extra structured inputs: concatenations of blocks `x^k t` with `x` from
/// `letters`, `k <= max_size`, at most `max_blocks` blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSpec {
    pub letters: Vec<char>,
    pub terminator: char,
    pub max_blocks: usize,
    pub max_size: usize,
}

impl BlockSpec {
    pub fn strings(&self) -> Vec<String> {
        let mut blocks = BTreeSet::new();
        for &x in &self.letters {
            for k in 0..=self.max_size {
                let mut b: String = std::iter::repeat_n(x, k).collect();
                b.push(self.terminator);
                blocks.insert(b);
            }
        }
        let mut out = vec![String::new()];
        let mut layer = vec![String::new()];
        for _ in 0..self.max_blocks {
            layer = layer.iter().flat_map(|p| blocks.iter().map(move |b| format!("{p}{b}"))).collect();
            out.extend(layer.iter().cloned());
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub id: &'static str,
    pub source: &'static str,
    pub grammar: Grammar,
    pub notes: &'static str,
    /// Every string over the alphabet up to this length is an input.
    pub bound: usize,
    pub blocks: Option<BlockSpec>,
    /// Accepted inputs, as recorded.
    pub lang: Vec<String>,
    pub trace: Option<&'static str>,
    pub table: Option<&'static str>,
    /// Input the recorded table was built for.
    pub table_input: Option<String>,
}

pub fn ids() -> Vec<&'static str> {
    RAW.iter().map(|e| e.id).collect()
}

pub fn grammar_sha256(source: &str) -> String {
    hex::encode(Sha256::digest(source.as_bytes()))
}

/// `key: value` lines of a notes file.
pub fn note_fields(notes: &str) -> Vec<(&str, &str)> {
    notes
        .lines()
        .filter_map(|l| {
            let (k, v) = l.split_once(": ")?;
            (!k.is_empty() && k.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-'))
                .then(|| (k, v.trim()))
        })
        .collect()
}

fn field<'a>(fields: &[(&'a str, &'a str)], key: &str) -> Option<&'a str> {
    fields.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
}

/// One string per line; an empty line is the empty string.
pub fn parse_lang(text: &str) -> Vec<String> {
    text.lines().map(str::to_string).collect()
}

pub fn render_lang(strings: &[String]) -> String {
    strings.iter().map(|s| format!("{s}\n")).collect()
}

/// Finds an entry by exact id or unique prefix.
pub fn resolve(name: &str) -> Result<&'static RawEntry, CorpusError> {
    if let Some(e) = RAW.iter().find(|e| e.id == name) {
        return Ok(e);
    }
    let hits: Vec<&RawEntry> = RAW.iter().filter(|e| e.id.starts_with(name)).collect();
    match hits.as_slice() {
        [e] => Ok(e),
        [] => Err(CorpusError::Unknown(name.to_string())),
        _ => Err(CorpusError::Ambiguous(name.to_string(), hits.iter().map(|e| e.id).collect::<Vec<_>>().join(", "))),
    }
}

/// Parses an entry without checking that its goldens are current.
pub fn load_unchecked(raw: &RawEntry) -> Result<CorpusEntry, CorpusError> {
    let id = raw.id;
    let grammar = parse_grammar(raw.grammar).map_err(|source| CorpusError::Grammar { id: id.into(), source })?;
    let fields = note_fields(raw.notes);
    let notes_err = |message: String| CorpusError::Notes { id: id.into(), message };
    let bound = field(&fields, "bound")
        .ok_or_else(|| notes_err("missing `bound`".into()))?
        .parse()
        .map_err(|e| notes_err(format!("bad `bound`: {e}")))?;
    let blocks = match field(&fields, "blocks") {
        None => None,
        Some(letters) => {
            let num = |key: &str| -> Result<usize, CorpusError> {
                field(&fields, key)
                    .ok_or_else(|| notes_err(format!("missing `{key}`")))?
                    .parse()
                    .map_err(|e| notes_err(format!("bad `{key}`: {e}")))
            };
            let terminator = field(&fields, "terminator")
                .and_then(|t| t.chars().next())
                .ok_or_else(|| notes_err("missing `terminator`".into()))?;
            Some(BlockSpec {
                letters: letters.split_whitespace().filter_map(|s| s.chars().next()).collect(),
                terminator,
                max_blocks: num("max-blocks")?,
                max_size: num("max-size")?,
            })
        }
    };
    Ok(CorpusEntry {
        id,
        source: raw.grammar,
        grammar,
        notes: raw.notes,
        bound,
        blocks,
        lang: parse_lang(raw.lang),
        trace: raw.trace,
        table: raw.table,
        table_input: field(&fields, "table-input").map(str::to_string),
    })
}

/// Loads and validates an entry, refusing stale goldens.
pub fn load(name: &str) -> Result<CorpusEntry, CorpusError> {
    let raw = resolve(name)?;
    let actual = grammar_sha256(raw.grammar);
    let recorded = field(&note_fields(raw.notes), "grammar-sha256").unwrap_or("").to_string();
    if actual != recorded {
        return Err(CorpusError::Stale { id: raw.id.into(), actual, recorded });
    }
    let e = load_unchecked(raw)?;
    let diags = crate::validate::validate(&e.grammar);
    if crate::validate::has_errors(&diags) {
        return Err(CorpusError::Grammar { id: raw.id.into(), source: Diagnostics(diags) });
    }
    Ok(e)
}

pub fn all() -> Result<Vec<CorpusEntry>, CorpusError> {
    RAW.iter().map(|e| load(e.id)).collect()
}

impl CorpusEntry {
    /// All test inputs, shortest first, then lexicographic.
    pub fn inputs(&self) -> Vec<String> {
        let sigma: Vec<char> = self.grammar.alphabet().iter().copied().collect();
        let mut set: BTreeSet<(usize, String)> = BTreeSet::new();
        let mut layer = vec![String::new()];
        set.insert((0, String::new()));
        for len in 1..=self.bound {
            layer = layer.iter().flat_map(|p| sigma.iter().map(move |c| format!("{p}{c}"))).collect();
            set.extend(layer.iter().map(|s| (len, s.clone())));
        }
        if let Some(b) = &self.blocks {
            for s in b.strings() {
                if s.chars().all(|c| self.grammar.alphabet().contains(&c)) {
                    set.insert((s.chars().count(), s));
                }
            }
        }
        set.into_iter().map(|(_, s)| s).collect()
    }

    /// Recomputes the accepted inputs with the oracle.
    pub fn generate_lang(&self) -> Vec<String> {
        let o = Oracle::new(&self.grammar).expect("validated grammar");
        self.inputs()
            .into_iter()
            .filter(|s| o.accepts(&s.chars().collect::<Vec<_>>()).expect("inputs over the alphabet"))
            .collect()
    }

    pub fn is_accepted(&self, s: &str) -> bool {
        self.lang.iter().any(|l| l == s)
    }
}

/// The notes text with its `grammar-sha256` line set to `hash`.
pub fn with_hash(notes: &str, hash: &str) -> String {
    let mut out: Vec<String> =
        notes.lines().filter(|l| !l.starts_with("grammar-sha256: ")).map(str::to_string).collect();
    while out.last().is_some_and(|l| l.is_empty()) {
        out.pop();
    }
    out.push(format!("grammar-sha256: {hash}"));
    out.join("\n") + "\n"
}
