//! Reference recognizer: the least set of items closed under the axioms
//! and every rule, computed by brute force over all substrings.
//!
//! Sweeps visit spans by length, then left end, then rules in source order,
//! and repeat until a sweep adds nothing. A rule is tried with split points
//! in ascending order, so the first justification recorded for an item is
//! deterministic.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::deduction::{find_partition, Facts, Item, Justification, ProofError, ProofNode};
use crate::grammar::{ConjunctKind, Grammar, NtId, Symbol};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("input character {ch:?} at position {pos} is not in the alphabet")]
    OutsideAlphabet { ch: char, pos: usize },
    #[error("grammar refers to undeclared nonterminal #{0}")]
    Undeclared(u32),
}

struct CompiledRule {
    head: usize,
    conjuncts: Vec<(ConjunctKind, usize)>,
    left_edge: bool,
    right_edge: bool,
}

/// A grammar prepared for repeated membership queries.
pub struct Oracle<'g> {
    g: &'g Grammar,
    bodies: Vec<Vec<Symbol>>,
    rules: Vec<CompiledRule>,
}

/// Iteration order for a closure computation. The result does not depend
/// on it; justifications may.
#[derive(Clone, Debug, Default)]
pub struct Schedule {
    /// A permutation of rule indices; empty means source order.
    pub rule_order: Vec<usize>,
    /// Visit longer spans and later positions first within a sweep.
    pub reverse_spans: bool,
}

struct Table {
    n: usize,
    w: Vec<char>,
    member: Vec<bool>,
}

impl Table {
    fn idx(&self, a: usize, i: usize, j: usize) -> usize {
        (a * (self.n + 1) + i) * (self.n + 1) + j
    }
}

impl Facts for Table {
    fn holds(&self, symbol: Symbol, i: usize, j: usize) -> bool {
        match symbol {
            Symbol::T(c) => j == i + 1 && self.w.get(i) == Some(&c),
            Symbol::N(a) => self.member[self.idx(a.index(), i, j)],
        }
    }
}

impl<'g> Oracle<'g> {
    pub fn new(g: &'g Grammar) -> Result<Self, OracleError> {
        let mut ids: HashMap<&[Symbol], usize> = HashMap::new();
        let mut bodies = Vec::new();
        let mut rules = Vec::new();
        for r in g.rules() {
            for a in std::iter::once(r.head).chain(r.nonterminals()) {
                if a.index() >= g.num_nonterminals() {
                    return Err(OracleError::Undeclared(a.0));
                }
            }
            let conjuncts = r
                .conjuncts
                .iter()
                .map(|c| {
                    let id = *ids.entry(&c.body).or_insert_with(|| {
                        bodies.push(c.body.clone());
                        bodies.len() - 1
                    });
                    (c.kind, id)
                })
                .collect();
            rules.push(CompiledRule {
                head: r.head.index(),
                conjuncts,
                left_edge: r.left_edge,
                right_edge: r.right_edge,
            });
        }
        Ok(Oracle { g, bodies, rules })
    }

    pub fn grammar(&self) -> &'g Grammar {
        self.g
    }

    pub fn derive(&self, w: &[char]) -> Result<ItemSet, OracleError> {
        self.derive_with(w, &Schedule::default())
    }

    pub fn derive_with(&self, w: &[char], schedule: &Schedule) -> Result<ItemSet, OracleError> {
        if let Some(pos) = w.iter().position(|c| !self.g.alphabet().contains(c)) {
            return Err(OracleError::OutsideAlphabet { ch: w[pos], pos });
        }
        let n = w.len();
        let num = self.g.num_nonterminals();
        let mut table = Table { n, w: w.to_vec(), member: vec![false; num * (n + 1) * (n + 1)] };
        let mut just = vec![None; table.member.len()];
        let mut order = Vec::new();
        let rule_order: Vec<usize> =
            if schedule.rule_order.is_empty() { (0..self.rules.len()).collect() } else { schedule.rule_order.clone() };
        let mut spans: Vec<(usize, usize)> = (0..=n).flat_map(|len| (0..=n - len).map(move |i| (i, i + len))).collect();
        if schedule.reverse_spans {
            spans.reverse();
        }
        let mut sat: HashMap<(usize, usize, usize), Vec<usize>> = HashMap::new();
        let mut sweeps = 0;
        loop {
            sweeps += 1;
            let mut unsat: HashSet<(usize, usize, usize)> = HashSet::new();
            let mut changed = false;
            for &(i, j) in &spans {
                for &ri in &rule_order {
                    let r = &self.rules[ri];
                    let at = table.idx(r.head, i, j);
                    if table.member[at] || (r.left_edge && i != 0) || (r.right_edge && j != n) {
                        continue;
                    }
                    let mut parts = Vec::with_capacity(r.conjuncts.len());
                    for &(kind, body) in &r.conjuncts {
                        let (p, q) = kind.span(i, j, n);
                        let key = (body, p, q);
                        if let Some(pts) = sat.get(&key) {
                            parts.push(pts.clone());
                            continue;
                        }
                        if unsat.contains(&key) {
                            break;
                        }
                        match find_partition(&self.bodies[body], p, q, &table) {
                            Some(pts) => {
                                sat.insert(key, pts.clone());
                                parts.push(pts);
                            }
                            None => {
                                unsat.insert(key);
                                break;
                            }
                        }
                    }
                    if parts.len() == r.conjuncts.len() {
                        table.member[at] = true;
                        just[at] = Some(Justification { rule: ri, partitions: parts });
                        order.push(Item::new(Symbol::N(NtId(r.head as u32)), i, j));
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        Ok(ItemSet { n, w: table.w, num, member: table.member, just, order, sweeps })
    }

    pub fn accepts(&self, w: &[char]) -> Result<bool, OracleError> {
        let items = self.derive(w)?;
        Ok(items.contains(Symbol::N(self.g.start()), 0, w.len()))
    }

    /// Number of items one more sweep over `items` would add. Zero for
    /// every closed set.
    pub fn closure_step(&self, items: &ItemSet) -> usize {
        let n = items.n;
        let table = Table { n, w: items.w.clone(), member: items.member.clone() };
        let mut added = 0;
        for len in 0..=n {
            for i in 0..=n - len {
                let j = i + len;
                for r in &self.rules {
                    if table.member[table.idx(r.head, i, j)] || (r.left_edge && i != 0) || (r.right_edge && j != n) {
                        continue;
                    }
                    let ok = r.conjuncts.iter().all(|&(kind, body)| {
                        let (p, q) = kind.span(i, j, n);
                        find_partition(&self.bodies[body], p, q, &table).is_some()
                    });
                    if ok {
                        added += 1;
                    }
                }
            }
        }
        added
    }

    /// Accepted strings of length at most `max_len`, shortest first, then
    /// lexicographic.
    pub fn enumerate(&self, max_len: usize) -> Vec<String> {
        let sigma: Vec<char> = self.g.alphabet().iter().copied().collect();
        let mut out = Vec::new();
        for len in 0..=max_len {
            if sigma.is_empty() && len > 0 {
                break;
            }
            let mut digits = vec![0usize; len];
            loop {
                let w: Vec<char> = digits.iter().map(|&d| sigma[d]).collect();
                if self.accepts(&w).expect("strings over the alphabet") {
                    out.push(w.into_iter().collect());
                }
                let mut k = len;
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    digits[k] += 1;
                    if digits[k] < sigma.len() {
                        break;
                    }
                    digits[k] = 0;
                    if k == 0 {
                        k = usize::MAX;
                        break;
                    }
                }
                if len == 0 || k == usize::MAX {
                    break;
                }
            }
        }
        out
    }
}

pub fn derive_all(g: &Grammar, w: &[char]) -> Result<ItemSet, OracleError> {
    Oracle::new(g)?.derive(w)
}

pub fn accepts(g: &Grammar, w: &[char]) -> Result<bool, OracleError> {
    Oracle::new(g)?.accepts(w)
}

pub fn enumerate(g: &Grammar, max_len: usize) -> Result<Vec<String>, OracleError> {
    Ok(Oracle::new(g)?.enumerate(max_len))
}

/// The closed set of items for one input.
#[derive(Clone, Debug)]
pub struct ItemSet {
    n: usize,
    w: Vec<char>,
    num: usize,
    member: Vec<bool>,
    just: Vec<Option<Justification>>,
    order: Vec<Item>,
    sweeps: usize,
}

#[derive(Serialize)]
struct ItemJson {
    symbol: String,
    i: usize,
    j: usize,
}

impl ItemSet {
    fn idx(&self, a: usize, i: usize, j: usize) -> usize {
        (a * (self.n + 1) + i) * (self.n + 1) + j
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn input(&self) -> &[char] {
        &self.w
    }

    /// Sweeps performed, including the final one that added nothing.
    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn contains(&self, symbol: Symbol, i: usize, j: usize) -> bool {
        if i > j || j > self.n {
            return false;
        }
        match symbol {
            Symbol::T(c) => j == i + 1 && self.w[i] == c,
            Symbol::N(a) => a.index() < self.num && self.member[self.idx(a.index(), i, j)],
        }
    }

    pub fn contains_item(&self, it: &Item) -> bool {
        self.contains(it.symbol, it.i, it.j)
    }

    /// Derived nonterminal items in the order they were first derived.
    pub fn derivation_order(&self) -> &[Item] {
        &self.order
    }

    /// Nonterminal items sorted by span length, left end, then symbol.
    pub fn derived_items(&self) -> Vec<Item> {
        let mut v = self.order.clone();
        v.sort_by_key(|it| (it.j - it.i, it.i, it.symbol));
        v
    }

    /// Axiom items and derived items, sorted as [`ItemSet::derived_items`].
    pub fn items(&self) -> Vec<Item> {
        let mut v = self.order.clone();
        v.extend(self.w.iter().enumerate().map(|(k, &c)| Item::new(Symbol::T(c), k, k + 1)));
        v.sort_by_key(|it| (it.j - it.i, it.i, it.symbol));
        v
    }

    pub fn justification(&self, it: &Item) -> Option<&Justification> {
        match it.symbol {
            Symbol::N(a) if self.contains_item(it) => self.just[self.idx(a.index(), it.i, it.j)].as_ref(),
            _ => None,
        }
    }

    /// Rebuilds the proof of an item from the recorded justifications.
    pub fn proof(&self, g: &Grammar, it: &Item) -> Result<ProofNode, ProofError> {
        if !self.contains_item(it) {
            return Err(ProofError::Unproven(it.display(g, &self.w)));
        }
        let mut memo = HashMap::new();
        Ok(self.build(g, *it, &mut memo))
    }

    fn build(&self, g: &Grammar, it: Item, memo: &mut HashMap<Item, ProofNode>) -> ProofNode {
        if let Some(p) = memo.get(&it) {
            return p.clone();
        }
        let node = match self.justification(&it) {
            None => ProofNode::axiom(it),
            Some(j) => {
                let r = &g.rules()[j.rule];
                let mut node = ProofNode { item: it, rule: Some(j.rule), children: vec![], context_children: vec![] };
                for (c, pts) in r.conjuncts.iter().zip(&j.partitions) {
                    for (t, &s) in c.body.iter().enumerate() {
                        let child = self.build(g, Item::new(s, pts[t], pts[t + 1]), memo);
                        if c.kind == ConjunctKind::Base {
                            node.children.push(child);
                        } else {
                            node.context_children.push(child);
                        }
                    }
                }
                node
            }
        };
        memo.insert(it, node.clone());
        node
    }

    pub fn to_json(&self, g: &Grammar) -> serde_json::Value {
        let items: Vec<ItemJson> = self
            .items()
            .into_iter()
            .map(|it| ItemJson { symbol: g.display_symbol(it.symbol), i: it.i, j: it.j })
            .collect();
        serde_json::json!({ "n": self.n, "items": items })
    }

    /// Same membership, ignoring justifications.
    pub fn same_items(&self, other: &ItemSet) -> bool {
        self.n == other.n && self.w == other.w && self.member == other.member
    }
}
