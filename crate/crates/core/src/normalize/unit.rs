//! Removal of unit base conjuncts by substitution.
//!
//! `A -> B & Phi` is replaced by `A -> Psi & Phi` for every rule
//! `B -> Psi`. Rules are kept in a canonical form (a set of base conjuncts,
//! a set of nonterminals per context kind, two flags), so the closure is
//! taken over a finite universe and terminates. The number of rules can
//! grow exponentially.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::NormalizeError;
use crate::grammar::{Conjunct, ConjunctKind, Grammar, NtId, Rule, Symbol};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Base {
    Term(char),
    Pair(NtId, NtId),
    Unit(NtId),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Canon {
    head: NtId,
    bases: BTreeSet<Base>,
    /// Indexed by context kind: proper left, extended left, extended
    /// right, proper right.
    ctx: [BTreeSet<NtId>; 4],
    le: bool,
    re: bool,
}

const CONTEXT_KINDS: [ConjunctKind; 4] =
    [ConjunctKind::LeftProper, ConjunctKind::LeftExtended, ConjunctKind::RightExtended, ConjunctKind::RightProper];

impl Canon {
    fn from_rule(g: &Grammar, r: &Rule) -> Result<Self, NormalizeError> {
        let bad = || NormalizeError::NotReady(crate::dsl::render_rule(g, r));
        let mut c =
            Canon { head: r.head, bases: BTreeSet::new(), ctx: Default::default(), le: r.left_edge, re: r.right_edge };
        for conj in &r.conjuncts {
            if conj.kind == ConjunctKind::Base {
                let b = match conj.body.as_slice() {
                    [Symbol::T(a)] => Base::Term(*a),
                    [Symbol::N(x)] => Base::Unit(*x),
                    [Symbol::N(x), Symbol::N(y)] => Base::Pair(*x, *y),
                    _ => return Err(bad()),
                };
                c.bases.insert(b);
            } else {
                let [Symbol::N(x)] = conj.body.as_slice() else { return Err(bad()) };
                let k = CONTEXT_KINDS.iter().position(|&k| k == conj.kind).expect("context kind");
                c.ctx[k].insert(*x);
            }
        }
        Ok(c)
    }

    fn first_unit(&self) -> Option<NtId> {
        self.bases.iter().find_map(|b| match b {
            Base::Unit(x) => Some(*x),
            _ => None,
        })
    }

    /// A single symbol and a pair, or two different symbols, can never
    /// hold on the same non-empty substring.
    fn satisfiable(&self) -> bool {
        let terms = self.bases.iter().filter(|b| matches!(b, Base::Term(_))).count();
        let pairs = self.bases.iter().filter(|b| matches!(b, Base::Pair(..))).count();
        terms <= 1 && (terms == 0 || pairs == 0)
    }

    fn substitute(&self, unit: NtId, by: &Canon) -> Canon {
        let mut c = self.clone();
        c.bases.remove(&Base::Unit(unit));
        c.bases.extend(by.bases.iter().cloned());
        for k in 0..4 {
            c.ctx[k].extend(by.ctx[k].iter().copied());
        }
        c.le |= by.le;
        c.re |= by.re;
        c
    }

    fn subsumes(&self, other: &Canon) -> bool {
        self.head == other.head
            && self.bases.is_subset(&other.bases)
            && (0..4).all(|k| self.ctx[k].is_subset(&other.ctx[k]))
            && (!self.le || other.le)
            && (!self.re || other.re)
    }

    fn to_rule(&self) -> Rule {
        let mut cs = Vec::new();
        for b in &self.bases {
            let body = match *b {
                Base::Term(a) => vec![Symbol::T(a)],
                Base::Pair(x, y) => vec![Symbol::N(x), Symbol::N(y)],
                Base::Unit(x) => vec![Symbol::N(x)],
            };
            cs.push(Conjunct::base(body));
        }
        for (k, kind) in CONTEXT_KINDS.iter().enumerate() {
            cs.extend(self.ctx[k].iter().map(|&x| Conjunct::new(*kind, vec![Symbol::N(x)])));
        }
        Rule::new(self.head, cs).with_edges(self.le, self.re)
    }
}

/// Removes every rule whose conjuncts and flags include those of another
/// rule for the same head.
fn drop_subsumed(rules: Vec<Canon>) -> Vec<Canon> {
    let keep: Vec<bool> = rules
        .iter()
        .enumerate()
        .map(|(k, r)| !rules.iter().enumerate().any(|(l, s)| l != k && s.subsumes(r) && (s != r || l < k)))
        .collect();
    rules.into_iter().zip(keep).filter(|(_, k)| *k).map(|(r, _)| r).collect()
}

/// Substitutes rules into unit base conjuncts until none remain. With
/// `prune` set, rules implied by a weaker rule for the same head are
/// dropped from the result.
pub fn eliminate_unit_conjuncts_with(g: &Grammar, prune: bool) -> Result<Grammar, NormalizeError> {
    let mut seen: HashSet<Canon> = HashSet::new();
    let mut work: Vec<Canon> = Vec::new();
    for r in g.rules() {
        let c = Canon::from_rule(g, r)?;
        if seen.insert(c.clone()) {
            work.push(c);
        }
    }
    // Rules waiting on a unit, by that unit.
    let mut waiting: HashMap<NtId, Vec<Canon>> = HashMap::new();
    let mut done: HashMap<NtId, Vec<Canon>> = HashMap::new();
    let mut out: Vec<Canon> = Vec::new();
    let push = |c: Canon, seen: &mut HashSet<Canon>, work: &mut Vec<Canon>| {
        if seen.insert(c.clone()) {
            work.push(c);
        }
    };
    let mut k = 0;
    while k < work.len() {
        let c = work[k].clone();
        k += 1;
        if !c.satisfiable() || c.bases.contains(&Base::Unit(c.head)) {
            continue;
        }
        match c.first_unit() {
            Some(b) => {
                for d in done.get(&b).into_iter().flatten() {
                    push(c.substitute(b, d), &mut seen, &mut work);
                }
                waiting.entry(b).or_default().push(c);
            }
            None => {
                for w in waiting.get(&c.head).into_iter().flatten() {
                    push(w.substitute(c.head, &c), &mut seen, &mut work);
                }
                done.entry(c.head).or_default().push(c.clone());
                out.push(c);
            }
        }
    }
    if prune {
        out = drop_subsumed(out);
    }
    Ok(g.with_rules(out.iter().map(Canon::to_rule).collect()))
}

pub fn eliminate_unit_conjuncts(g: &Grammar) -> Result<Grammar, NormalizeError> {
    eliminate_unit_conjuncts_with(g, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_grammar, render_rule};

    fn rules(g: &Grammar) -> BTreeSet<String> {
        g.rules().iter().map(|r| render_rule(g, r)).collect()
    }

    #[test]
    fn single_substitution() {
        let g = parse_grammar("nonterminals D; A -> B & <(D); B -> b; D -> d;").unwrap();
        let out = eliminate_unit_conjuncts(&g).unwrap();
        assert!(rules(&out).contains("A -> b & <(D)"));
        assert!(out
            .rules()
            .iter()
            .all(|r| r.base_conjuncts().all(|c| c.body.len() != 1 || matches!(c.body[0], Symbol::T(_)))));
    }

    #[test]
    fn unit_cycles_terminate() {
        let g = parse_grammar("A -> B; B -> A | b;").unwrap();
        let out = eliminate_unit_conjuncts(&g).unwrap();
        assert_eq!(rules(&out), BTreeSet::from(["A -> b".to_string(), "B -> b".to_string()]));
    }

    #[test]
    fn conflicting_bases_are_dropped() {
        let g = parse_grammar("nonterminals X Y; A -> B & C; B -> a; C -> b | X Y; X -> a; Y -> a;").unwrap();
        let out = eliminate_unit_conjuncts(&g).unwrap();
        assert!(out.rules_for(g.lookup("A").unwrap()).next().is_none());
    }

    #[test]
    fn flags_are_merged() {
        let g = parse_grammar("A -> B & >(eps); B -> b & <(eps);").unwrap();
        let out = eliminate_unit_conjuncts(&g).unwrap();
        let a = g.lookup("A").unwrap();
        let r = out.rules_for(a).next().unwrap().1;
        assert!(r.left_edge && r.right_edge);
    }

    #[test]
    fn rejects_long_bodies() {
        let g = parse_grammar("A -> a b c;").unwrap();
        assert!(eliminate_unit_conjuncts(&g).is_err());
    }
}
