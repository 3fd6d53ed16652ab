//! Well-formedness checks.

use std::collections::HashSet;

use crate::diag::Diagnostic;
use crate::grammar::{Grammar, Symbol};

/// Errors for undeclared symbols and missing base conjuncts; warnings for
/// unreachable and unproductive nonterminals. An empty list means the
/// grammar is well-formed.
pub fn validate(g: &Grammar) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let n = g.num_nonterminals();

    let mut seen = HashSet::new();
    for name in g.names() {
        if !seen.insert(name) {
            out.push(Diagnostic::error(format!("duplicate nonterminal `{name}`")));
        }
    }
    if g.start().index() >= n {
        out.push(Diagnostic::error(format!("start symbol #{} is not declared", g.start().0)));
    }
    if g.alphabet().is_empty() {
        out.push(Diagnostic::warning("alphabet is empty"));
    }

    for (k, r) in g.rules().iter().enumerate() {
        if r.head.index() >= n {
            out.push(Diagnostic::error(format!("rule {k}: head #{} is not declared", r.head.0)));
            continue;
        }
        if !r.has_base() {
            out.push(Diagnostic::error(format!("rule {k} for `{}`: rule has no base conjunct", g.name(r.head))));
        }
        for s in r.symbols() {
            match s {
                Symbol::N(b) if b.index() >= n => {
                    out.push(Diagnostic::error(format!(
                        "rule {k} for `{}`: undeclared nonterminal #{}",
                        g.name(r.head),
                        b.0
                    )));
                }
                Symbol::T(c) if !g.alphabet().contains(&c) => {
                    out.push(Diagnostic::error(format!(
                        "rule {k} for `{}`: undeclared terminal {}",
                        g.name(r.head),
                        crate::grammar::terminal_token(c)
                    )));
                }
                _ => {}
            }
        }
    }
    if out.iter().any(Diagnostic::is_error) {
        return out;
    }

    let reach = g.reachable();
    let prod = g.productive();
    for a in g.nonterminals() {
        if !reach[a.index()] {
            out.push(Diagnostic::warning(format!("unreachable nonterminal {}", g.name(a))));
        }
    }
    for a in g.nonterminals() {
        if !prod[a.index()] {
            out.push(Diagnostic::warning(format!("unproductive nonterminal {}", g.name(a))));
        }
    }
    out
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}
