//! Lowering of empty context bodies to edge flags.
//!
//! `<(eps)` and `>(eps)` become the left and right edge flags. `<=(eps)`
//! and `>=(eps)` only hold for an empty substring, and rules with an empty
//! base conjunct only derive empty substrings; in a grammar without
//! empty-string items both kinds of rule can never apply and are dropped.

use crate::grammar::{ConjunctKind, Grammar, Rule};

pub fn eliminate_null_contexts(g: &Grammar) -> Grammar {
    let mut rules = Vec::new();
    'rules: for r in g.rules() {
        let mut out = Rule::new(r.head, Vec::new()).with_edges(r.left_edge, r.right_edge);
        for c in &r.conjuncts {
            if !c.body.is_empty() {
                if !out.conjuncts.contains(c) {
                    out.conjuncts.push(c.clone());
                }
                continue;
            }
            match c.kind {
                ConjunctKind::LeftProper => out.left_edge = true,
                ConjunctKind::RightProper => out.right_edge = true,
                _ => continue 'rules,
            }
        }
        if out.has_base() && !rules.contains(&out) {
            rules.push(out);
        }
    }
    g.with_rules(rules)
}
