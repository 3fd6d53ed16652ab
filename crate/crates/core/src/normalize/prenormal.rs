//! Rewriting every rule into one of four shapes: `A -> a`, `A -> B C`,
//! `A -> B1 & ... & Bk & contexts` with single-nonterminal bodies, and
//! `A -> eps`.

use std::collections::HashMap;

use crate::grammar::{Conjunct, ConjunctKind, Grammar, GrammarBuilder, NtId, Rule, Symbol};

struct Pre {
    b: GrammarBuilder,
    bodies: HashMap<Vec<Symbol>, NtId>,
}

fn wrapper_stem(c: char) -> String {
    if c.is_ascii_alphanumeric() {
        format!("X{c}")
    } else {
        format!("XU{:04X}", c as u32)
    }
}

impl Pre {
    /// A nonterminal generating exactly `body` in any context.
    fn nt_for(&mut self, body: &[Symbol]) -> NtId {
        if let [Symbol::N(a)] = body {
            return *a;
        }
        if let Some(&a) = self.bodies.get(body) {
            return a;
        }
        let stem = match body {
            [] => "E".to_string(),
            [Symbol::T(c)] => wrapper_stem(*c),
            _ => "N".to_string(),
        };
        let a = self.b.fresh(&stem);
        self.bodies.insert(body.to_vec(), a);
        self.emit_plain(a, body);
        a
    }

    /// Emits `head -> body` (no contexts) in one of the four shapes.
    fn emit_plain(&mut self, head: NtId, body: &[Symbol]) {
        if body.len() <= 1 {
            self.b.rule(Rule::new(head, vec![Conjunct::base(body.to_vec())]));
            return;
        }
        let lifted: Vec<Symbol> = body.iter().map(|&s| Symbol::N(self.nt_for(&[s]))).collect();
        let second = if lifted.len() == 2 { lifted[1] } else { Symbol::N(self.chain(&lifted[1..])) };
        self.b.rule(Rule::new(head, vec![Conjunct::base(vec![lifted[0], second])]));
    }

    /// A nonterminal for a suffix of a split body.
    fn chain(&mut self, rest: &[Symbol]) -> NtId {
        if let Some(&a) = self.bodies.get(rest) {
            return a;
        }
        let a = self.b.fresh("P");
        self.bodies.insert(rest.to_vec(), a);
        self.emit_plain(a, rest);
        a
    }
}

/// Brings every rule into pre-normal form. Long bodies are split
/// right-nested (`K -> E F c` becomes `K -> E _P; _P -> F _Xc`), terminals
/// inside bodies of length two or more are wrapped, context bodies other
/// than a single nonterminal and the bases of rules with contexts are
/// replaced by fresh nonterminals. Fresh nonterminals are shared between
/// identical bodies.
pub fn pre_normalize(g: &Grammar) -> Grammar {
    let mut pre = Pre { b: GrammarBuilder::from_names(g), bodies: HashMap::new() };
    for r in g.rules() {
        let (mut le, mut re) = (r.left_edge, r.right_edge);
        let mut bases: Vec<&[Symbol]> = Vec::new();
        let mut contexts: Vec<(ConjunctKind, &[Symbol])> = Vec::new();
        for c in &r.conjuncts {
            match (c.kind, c.body.is_empty()) {
                (ConjunctKind::Base, _) => bases.push(&c.body),
                (ConjunctKind::LeftProper, true) => le = true,
                (ConjunctKind::RightProper, true) => re = true,
                (ConjunctKind::LeftExtended, true) => {
                    le = true;
                    bases.push(&[]);
                }
                (ConjunctKind::RightExtended, true) => {
                    re = true;
                    bases.push(&[]);
                }
                (kind, false) => contexts.push((kind, &c.body)),
            }
        }
        if contexts.is_empty() && !le && !re && bases.len() == 1 {
            pre.emit_plain(r.head, bases[0]);
            continue;
        }
        let mut conjuncts: Vec<Conjunct> = Vec::new();
        for body in bases {
            let c = Conjunct::base(vec![Symbol::N(pre.nt_for(body))]);
            if !conjuncts.contains(&c) {
                conjuncts.push(c);
            }
        }
        for (kind, body) in contexts {
            let c = Conjunct::new(kind, vec![Symbol::N(pre.nt_for(body))]);
            if !conjuncts.contains(&c) {
                conjuncts.push(c);
            }
        }
        pre.b.rule(Rule::new(r.head, conjuncts).with_edges(le, re));
    }
    pre.b.alphabet(g.alphabet().iter().copied());
    pre.b.build(g.start())
}

/// Whether every rule has one of the four pre-normal shapes.
pub fn is_pre_normal(g: &Grammar) -> bool {
    g.rules().iter().all(pre_normal_rule)
}

pub(crate) fn pre_normal_rule(r: &Rule) -> bool {
    let single_nt = |c: &Conjunct| matches!(c.body.as_slice(), [Symbol::N(_)]);
    let plain = r.conjuncts.len() == 1 && r.conjuncts[0].kind == ConjunctKind::Base && !r.left_edge && !r.right_edge;
    if plain {
        match r.conjuncts[0].body.as_slice() {
            [] | [Symbol::T(_)] | [Symbol::N(_), Symbol::N(_)] | [Symbol::N(_)] => return true,
            _ => {}
        }
    }
    r.has_base() && r.conjuncts.iter().all(single_nt)
}
