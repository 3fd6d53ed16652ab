//! Removal of empty-string generation. Each occurrence of a nullable
//! nonterminal gets companion rules in which it is omitted and the
//! contexts under which it would have generated the empty string are
//! stated explicitly.

use std::collections::BTreeSet;

use super::nullable::{LeftEpsEntry, NullableTriple, RightEpsEntry};
use super::prenormal::pre_normal_rule;
use super::NormalizeError;
use crate::grammar::{Conjunct, ConjunctKind, Grammar, GrammarBuilder, NtId, Rule, Symbol};

/// The nullable sets used by the construction.
#[derive(Clone, Debug, Default)]
pub struct NullableSets {
    pub triples: BTreeSet<NullableTriple>,
    pub left: BTreeSet<LeftEpsEntry>,
    pub right: BTreeSet<RightEpsEntry>,
}

impl NullableSets {
    pub fn compute(g: &Grammar, prune: bool) -> Result<Self, NormalizeError> {
        let triples = super::nullable::compute_nullable_with(g, prune)?.triples().clone();
        let left = super::nullable::compute_nullable_left_eps(&triples);
        let right = super::nullable::compute_nullable_right_eps(&triples);
        Ok(NullableSets { triples, left, right })
    }
}

/// A rule under construction: conjuncts grouped by kind, all bodies single
/// nonterminals.
#[derive(Default)]
struct Parts {
    base: BTreeSet<NtId>,
    left: BTreeSet<NtId>,
    left_ext: BTreeSet<NtId>,
    right_ext: BTreeSet<NtId>,
    right: BTreeSet<NtId>,
    le: bool,
    re: bool,
}

impl Parts {
    fn rule(&self, head: NtId) -> Rule {
        let mut cs = Vec::new();
        let groups = [
            (ConjunctKind::Base, &self.base),
            (ConjunctKind::LeftProper, &self.left),
            (ConjunctKind::LeftExtended, &self.left_ext),
            (ConjunctKind::RightExtended, &self.right_ext),
            (ConjunctKind::RightProper, &self.right),
        ];
        for (kind, set) in groups {
            cs.extend(set.iter().map(|&x| Conjunct::new(kind, vec![Symbol::N(x)])));
        }
        Rule::new(head, cs).with_edges(self.le, self.re)
    }
}

fn single(c: &Conjunct) -> NtId {
    match c.body.as_slice() {
        [Symbol::N(x)] => *x,
        _ => unreachable!("pre-normal conjunct"),
    }
}

/// All ways of picking one element from each list, folded with `merge`.
fn combine<'a, E, S: Ord + Clone>(
    lists: impl IntoIterator<Item = Vec<&'a E>>,
    init: S,
    merge: impl Fn(&S, &E) -> S,
) -> BTreeSet<S>
where
    E: 'a,
{
    let mut states = BTreeSet::from([init]);
    for list in lists {
        states = states.iter().flat_map(|s| list.iter().map(|e| merge(s, e)).collect::<Vec<_>>()).collect();
    }
    states
}

/// Applies the construction to a pre-normal grammar. The result generates
/// the same non-empty strings and no item with an empty substring.
pub fn eliminate_epsilon(g: &Grammar) -> Result<Grammar, NormalizeError> {
    let sets = NullableSets::compute(g, true)?;
    eliminate_epsilon_with(g, &sets)
}

pub fn eliminate_epsilon_with(g: &Grammar, sets: &NullableSets) -> Result<Grammar, NormalizeError> {
    let mut out = GrammarBuilder::from_names(g);
    out.alphabet(g.alphabet().iter().copied());
    for r in g.rules() {
        if !pre_normal_rule(r) {
            return Err(NormalizeError::NotPreNormal(crate::dsl::render_rule(g, r)));
        }
        let plain =
            r.conjuncts.len() == 1 && !r.left_edge && !r.right_edge && r.conjuncts[0].kind == ConjunctKind::Base;
        match r.conjuncts[0].body.as_slice() {
            [] if plain => {}
            [Symbol::T(_)] if plain => {
                out.rule(r.clone());
            }
            [Symbol::N(b), Symbol::N(c)] if plain => {
                out.rule(r.clone());
                pair_companions(&mut out, r.head, *b, *c, sets);
            }
            _ => {
                out.rule(r.clone());
                context_companions(&mut out, r, sets);
            }
        }
    }
    Ok(out.build(g.start()))
}

/// Companions of `A -> B C`.
fn pair_companions(out: &mut GrammarBuilder, a: NtId, b: NtId, c: NtId, sets: &NullableSets) {
    // C omitted; it sits at the right end of a non-empty B, so it can never
    // be at the start of the input.
    for t in sets.triples.iter().filter(|t| t.a == c && !t.left_edge) {
        let p =
            Parts { base: [b].into(), left_ext: t.u.clone(), right: t.v.clone(), re: t.right_edge, ..Parts::default() };
        out.rule(p.rule(a));
    }
    for e in sets.right.iter().filter(|e| e.a == c && !e.left_edge) {
        let p = Parts { base: [b].into(), left_ext: e.u.clone(), re: true, ..Parts::default() };
        out.rule(p.rule(a));
    }
    // B omitted.
    for t in sets.triples.iter().filter(|t| t.a == b && !t.right_edge) {
        let p =
            Parts { base: [c].into(), left: t.u.clone(), right_ext: t.v.clone(), le: t.left_edge, ..Parts::default() };
        out.rule(p.rule(a));
    }
    for e in sets.left.iter().filter(|e| e.a == b && !e.right_edge) {
        let p = Parts { base: [c].into(), right_ext: e.v.clone(), le: true, ..Parts::default() };
        out.rule(p.rule(a));
    }
}

/// Companions of `A -> B1 & ... & Bk & <(D..) & <=(E..) & >=(F..) & >(H..)`
/// for the cases where the proper contexts are empty strings.
fn context_companions(out: &mut GrammarBuilder, r: &Rule, sets: &NullableSets) {
    let mut p = Parts { le: r.left_edge, re: r.right_edge, ..Parts::default() };
    for c in &r.conjuncts {
        let x = single(c);
        match c.kind {
            ConjunctKind::Base => p.base.insert(x),
            ConjunctKind::LeftProper => p.left.insert(x),
            ConjunctKind::LeftExtended => p.left_ext.insert(x),
            ConjunctKind::RightExtended => p.right_ext.insert(x),
            ConjunctKind::RightProper => p.right.insert(x),
        };
    }
    // An entry whose own flag points at the far end of the input would need
    // the whole input to be empty, which the non-empty bases rule out.
    let left_lists: Vec<Vec<&LeftEpsEntry>> =
        p.left.iter().map(|&d| sets.left.iter().filter(|e| e.a == d && !e.right_edge).collect()).collect();
    let right_lists: Vec<Vec<&RightEpsEntry>> =
        p.right.iter().map(|&h| sets.right.iter().filter(|e| e.a == h && !e.left_edge).collect()).collect();
    let lefts = if p.left.is_empty() {
        BTreeSet::new()
    } else {
        combine(left_lists, BTreeSet::new(), |s: &BTreeSet<NtId>, e: &LeftEpsEntry| s | &e.v)
    };
    let rights = if p.right.is_empty() {
        BTreeSet::new()
    } else {
        combine(right_lists, BTreeSet::new(), |s: &BTreeSet<NtId>, e: &RightEpsEntry| s | &e.u)
    };

    // Empty left context: extended left contexts become bases.
    for k in &lefts {
        let q = Parts {
            base: &p.base | &p.left_ext,
            right_ext: &p.right_ext | k,
            right: p.right.clone(),
            le: true,
            re: p.re,
            ..Parts::default()
        };
        out.rule(q.rule(r.head));
    }
    // Empty right context.
    for k in &rights {
        let q = Parts {
            base: &p.base | &p.right_ext,
            left: p.left.clone(),
            left_ext: &p.left_ext | k,
            le: p.le,
            re: true,
            ..Parts::default()
        };
        out.rule(q.rule(r.head));
    }
    // Both: the substring is the whole input.
    for kl in &lefts {
        for kr in &rights {
            let base = &(&(&p.base | &p.left_ext) | &p.right_ext) | &(kl | kr);
            let q = Parts { base, le: true, re: true, ..Parts::default() };
            out.rule(q.rule(r.head));
        }
    }
}
