//! Transformation to binary normal form.
//!
//! The pipeline is [`pre_normalize`], [`eliminate_epsilon`],
//! [`eliminate_null_contexts`], [`eliminate_unit_conjuncts`], then a
//! terminal-lifting pass and trimming. The result generates the same
//! non-empty strings as the input grammar; whether the empty string is in
//! the language has to be answered on the original grammar.
//!
//! Boundary conditions stay as rule edge flags throughout, and the parser
//! checks them directly.

pub mod epsilon;
pub mod null_context;
pub mod nullable;
pub mod prenormal;
pub mod unit;

use std::fmt;

use serde::Serialize;

pub use epsilon::{eliminate_epsilon, eliminate_epsilon_with, NullableSets};
pub use null_context::eliminate_null_contexts;
pub use nullable::{
    compute_nullable, compute_nullable_left_eps, compute_nullable_right_eps, compute_nullable_with, nullable_json,
    render_triple, LeftEpsEntry, NullableAnalysis, NullableTriple, RightEpsEntry,
};
pub use prenormal::{is_pre_normal, pre_normalize};
pub use unit::{eliminate_unit_conjuncts, eliminate_unit_conjuncts_with};

use crate::grammar::{Conjunct, ConjunctKind, Grammar, GrammarBuilder, Rule, Symbol};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum NormalizeError {
    #[error("rule is not in pre-normal form: {0}")]
    NotPreNormal(String),
    #[error("rule still has bodies other than a, B C or B: {0}")]
    NotReady(String),
    #[error("rule is not in binary normal form: {0}")]
    Shape(String),
}

/// Checks one rule against the two normal-form shapes:
/// `A -> a & contexts` and `A -> B1 C1 & ... & Bm Cm & contexts`, every
/// context body a single nonterminal.
pub fn nf_rule_ok(r: &Rule) -> bool {
    let mut terms = 0;
    let mut pairs = 0;
    for c in &r.conjuncts {
        match (c.kind, c.body.as_slice()) {
            (ConjunctKind::Base, [Symbol::T(_)]) => terms += 1,
            (ConjunctKind::Base, [Symbol::N(_), Symbol::N(_)]) => pairs += 1,
            (ConjunctKind::Base, _) => return false,
            (_, [Symbol::N(_)]) => {}
            _ => return false,
        }
    }
    (terms == 1 && pairs == 0) || (terms == 0 && pairs >= 1)
}

pub fn check_shape(g: &Grammar) -> Result<(), NormalizeError> {
    match g.rules().iter().find(|r| !nf_rule_ok(r)) {
        Some(r) => Err(NormalizeError::Shape(crate::dsl::render_rule(g, r))),
        None => Ok(()),
    }
}

/// A grammar in binary normal form (with edge flags).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NfGrammar(Grammar);

impl NfGrammar {
    pub fn new(g: Grammar) -> Result<Self, NormalizeError> {
        check_shape(&g)?;
        Ok(NfGrammar(g))
    }

    pub fn grammar(&self) -> &Grammar {
        &self.0
    }

    pub fn into_inner(self) -> Grammar {
        self.0
    }
}

impl std::ops::Deref for NfGrammar {
    type Target = Grammar;
    fn deref(&self) -> &Grammar {
        &self.0
    }
}

impl fmt::Display for NfGrammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Wraps terminals that occur inside pair bodies.
pub fn lift_terminals(g: &Grammar) -> Grammar {
    let mut b = GrammarBuilder::from_names(g);
    b.alphabet(g.alphabet().iter().copied());
    let mut wrappers = std::collections::HashMap::new();
    let mut extra = Vec::new();
    let mut rules = Vec::new();
    for r in g.rules() {
        let mut r = r.clone();
        for c in r.conjuncts.iter_mut().filter(|c| c.body.len() >= 2) {
            for s in c.body.iter_mut() {
                if let Symbol::T(a) = *s {
                    let x = *wrappers.entry(a).or_insert_with(|| {
                        let stem =
                            if a.is_ascii_alphanumeric() { format!("X{a}") } else { format!("XU{:04X}", a as u32) };
                        let x = b.fresh(&stem);
                        extra.push(Rule::new(x, vec![Conjunct::base(vec![Symbol::T(a)])]));
                        x
                    });
                    *s = Symbol::N(x);
                }
            }
        }
        rules.push(r);
    }
    for r in rules.into_iter().chain(extra) {
        b.rule(r);
    }
    b.build(g.start())
}

#[derive(Clone, Copy, Debug)]
pub struct NormalizeOptions {
    /// Reduce nullable sets to their minimal triples.
    pub prune_nullable: bool,
    /// Drop rules implied by weaker rules after unit elimination.
    pub prune_rules: bool,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions { prune_nullable: true, prune_rules: true }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StageCount {
    pub stage: &'static str,
    pub rules: usize,
    pub nonterminals: usize,
}

/// What the pipeline did, for display.
#[derive(Clone, Debug)]
pub struct NormalizeReport {
    pub stages: Vec<StageCount>,
    pub pre_normal: Grammar,
    pub nullable: NullableSets,
}

impl NormalizeReport {
    /// Largest growth factor in rule count between consecutive stages.
    pub fn max_growth(&self) -> f64 {
        self.stages
            .windows(2)
            .map(|w| if w[0].rules == 0 { 1.0 } else { w[1].rules as f64 / w[0].rules as f64 })
            .fold(1.0, f64::max)
    }
}

pub fn to_binary_normal_form(g: &Grammar) -> Result<NfGrammar, NormalizeError> {
    Ok(normalize_with_report(g, NormalizeOptions::default())?.0)
}

pub fn normalize_with_report(
    g: &Grammar,
    opts: NormalizeOptions,
) -> Result<(NfGrammar, NormalizeReport), NormalizeError> {
    let count = |stage, g: &Grammar| StageCount { stage, rules: g.rules().len(), nonterminals: g.num_nonterminals() };
    let mut stages = vec![count("input", g)];
    let pre = pre_normalize(g);
    stages.push(count("pre-normal", &pre));
    let sets = NullableSets::compute(&pre, opts.prune_nullable)?;
    let eps = eliminate_epsilon_with(&pre, &sets)?;
    stages.push(count("epsilon-free", &eps));
    let flags = eliminate_null_contexts(&eps);
    stages.push(count("null-contexts", &flags));
    let units = eliminate_unit_conjuncts_with(&flags, opts.prune_rules)?;
    stages.push(count("unit-free", &units));
    let out = lift_terminals(&units).trimmed();
    stages.push(count("normal-form", &out));
    let nf = NfGrammar::new(out)?;
    Ok((nf, NormalizeReport { stages, pre_normal: pre, nullable: sets }))
}
