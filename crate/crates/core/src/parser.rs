//! Multi-pass tabular recognition for grammars in binary normal form.
//!
//! `T[i][j]` (for `0 <= i < j <= n`) collects the nonterminals generating
//! the substring `(i, j]`. Each pass visits spans by right end and then by
//! decreasing left end, as in the classical bottom-up chart, and applies
//! every rule whose context requirements are already satisfied by the
//! table. Passes repeat while an entry `T[0][j]` or `T[i][n]` grew: those
//! are the only entries context conjuncts read, so once they are stable a
//! further pass derives nothing new.

use std::collections::HashMap;

use serde::Serialize;

use crate::deduction::{Item, ProofNode};
use crate::grammar::{ConjunctKind, Grammar, NtId, Symbol};
use crate::normalize::{check_shape, NfGrammar, NormalizeError};

/// Which table entries the right context conjuncts are checked against.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum IndexConvention {
    /// `>=(F)` reads `T[i][n]` and `>(H)` reads `T[j][n]`.
    #[default]
    Corrected,
    /// The two entries swapped: `>=(F)` reads `T[j][n]` and `>(H)` reads
    /// `T[i][n]`, with `i = j - 1` for single-symbol rules. Kept only to
    /// demonstrate that it disagrees with the deduction semantics.
    AsPrinted,
}

#[derive(Clone, Debug, Default)]
pub struct ParserOptions {
    pub convention: IndexConvention,
    /// Record one justification per table entry, needed for proofs.
    pub justify: bool,
    /// Rule visiting order as a permutation of rule indices; empty means
    /// source order.
    pub rule_order: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error(transparent)]
    NotNormalForm(#[from] NormalizeError),
    #[error("the tabular parser needs a non-empty input")]
    EmptyInput,
    #[error("input character {ch:?} at position {pos} is not in the alphabet")]
    OutsideAlphabet { ch: char, pos: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("item is not in the table")]
    Absent,
    #[error("the table was built without justifications")]
    NoJustifications,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(bits: usize) -> Self {
        BitSet(vec![0; bits.div_ceil(64)])
    }
    #[inline]
    fn has(&self, k: usize) -> bool {
        self.0[k / 64] >> (k % 64) & 1 == 1
    }
    /// Returns whether the bit was newly set.
    #[inline]
    fn set(&mut self, k: usize) -> bool {
        let before = self.0[k / 64];
        self.0[k / 64] |= 1 << (k % 64);
        before != self.0[k / 64]
    }
    #[inline]
    fn contains_all(&self, mask: &BitSet) -> bool {
        self.0.iter().zip(&mask.0).all(|(a, m)| a & m == *m)
    }
    fn is_empty(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }
    fn clear(&mut self) {
        self.0.iter_mut().for_each(|x| *x = 0);
    }
    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &x)| (0..64).filter(move |b| x >> b & 1 == 1).map(move |b| w * 64 + b))
    }
}

struct Contexts {
    left: BitSet,
    left_ext: BitSet,
    right_ext: BitSet,
    right: BitSet,
    le: bool,
    re: bool,
}

struct TermRule {
    rule: usize,
    head: usize,
    a: char,
    ctx: Contexts,
}

struct PairRule {
    rule: usize,
    head: usize,
    /// Indices into the pair list, in conjunct order.
    pairs: Vec<usize>,
    ctx: Contexts,
}

/// A normal-form grammar compiled for parsing.
pub struct Parser<'g> {
    g: &'g Grammar,
    terms: Vec<TermRule>,
    pair_rules: Vec<PairRule>,
    pairs: Vec<(usize, usize)>,
    opts: ParserOptions,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Justification {
    /// `A -> a & ...` at `(j - 1, j)`.
    Terminal { rule: usize },
    /// `A -> B1 C1 & ... & Bm Cm & ...`, one split point per pair.
    Pairs { rule: usize, splits: Vec<usize> },
}

impl<'g> Parser<'g> {
    pub fn new(g: &'g NfGrammar) -> Self {
        Self::build(g.grammar(), ParserOptions::default())
    }

    pub fn with_options(g: &'g NfGrammar, opts: ParserOptions) -> Self {
        Self::build(g.grammar(), opts)
    }

    /// Compiles any grammar that passes the normal-form shape check.
    pub fn from_grammar(g: &'g Grammar, opts: ParserOptions) -> Result<Self, ParseError> {
        check_shape(g)?;
        Ok(Self::build(g, opts))
    }

    fn build(g: &'g Grammar, opts: ParserOptions) -> Self {
        let num = g.num_nonterminals();
        let mut pair_ix: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs = Vec::new();
        let mut terms = Vec::new();
        let mut pair_rules = Vec::new();
        for (k, r) in g.rules().iter().enumerate() {
            let mut ctx = Contexts {
                left: BitSet::new(num),
                left_ext: BitSet::new(num),
                right_ext: BitSet::new(num),
                right: BitSet::new(num),
                le: r.left_edge,
                re: r.right_edge,
            };
            let mut term = None;
            let mut rp = Vec::new();
            for c in &r.conjuncts {
                match (c.kind, c.body.as_slice()) {
                    (ConjunctKind::Base, [Symbol::T(a)]) => term = Some(*a),
                    (ConjunctKind::Base, [Symbol::N(b), Symbol::N(c)]) => {
                        let key = (b.index(), c.index());
                        let ix = *pair_ix.entry(key).or_insert_with(|| {
                            pairs.push(key);
                            pairs.len() - 1
                        });
                        rp.push(ix);
                    }
                    (ConjunctKind::LeftProper, [Symbol::N(x)]) => {
                        ctx.left.set(x.index());
                    }
                    (ConjunctKind::LeftExtended, [Symbol::N(x)]) => {
                        ctx.left_ext.set(x.index());
                    }
                    (ConjunctKind::RightExtended, [Symbol::N(x)]) => {
                        ctx.right_ext.set(x.index());
                    }
                    (ConjunctKind::RightProper, [Symbol::N(x)]) => {
                        ctx.right.set(x.index());
                    }
                    _ => unreachable!("shape-checked"),
                }
            }
            match term {
                Some(a) => terms.push(TermRule { rule: k, head: r.head.index(), a, ctx }),
                None => pair_rules.push(PairRule { rule: k, head: r.head.index(), pairs: rp, ctx }),
            }
        }
        if !opts.rule_order.is_empty() {
            let pos: HashMap<usize, usize> = opts.rule_order.iter().enumerate().map(|(p, &r)| (r, p)).collect();
            let key = |r: usize| pos.get(&r).copied().unwrap_or(usize::MAX);
            terms.sort_by_key(|t| key(t.rule));
            pair_rules.sort_by_key(|t| key(t.rule));
        }
        Parser { g, terms, pair_rules, pairs, opts }
    }

    pub fn grammar(&self) -> &'g Grammar {
        self.g
    }

    pub fn parse(&self, w: &[char]) -> Result<ParseTable, ParseError> {
        if w.is_empty() {
            return Err(ParseError::EmptyInput);
        }
        if let Some(pos) = w.iter().position(|c| !self.g.alphabet().contains(c)) {
            return Err(ParseError::OutsideAlphabet { ch: w[pos], pos });
        }
        let n = w.len();
        let num = self.g.num_nonterminals();
        let mut t = ParseTable {
            n,
            num,
            start: self.g.start().index(),
            cells: vec![BitSet::new(num); (n + 1) * (n + 1)],
            passes: 0,
            work: 0,
            just: self.opts.justify.then(HashMap::new),
            convention: self.opts.convention,
        };
        let mut p = BitSet::new(self.pairs.len());
        let mut first_k = vec![0usize; self.pairs.len()];
        loop {
            t.passes += 1;
            let mut boundary_changed = false;
            for j in 1..=n {
                for tr in &self.terms {
                    t.work += 1;
                    if w[j - 1] == tr.a && t.ctx_ok(&tr.ctx, j - 1, j) && t.insert(tr.head, j - 1, j) {
                        boundary_changed |= j - 1 == 0 || j == n;
                        if let Some(just) = t.just.as_mut() {
                            just.insert((tr.head, j - 1, j), Justification::Terminal { rule: tr.rule });
                        }
                    }
                }
                for i in (0..j.saturating_sub(1)).rev() {
                    p.clear();
                    for k in i + 1..j {
                        t.work += 1;
                        let (left, right) = (t.cell(i, k), t.cell(k, j));
                        if left.is_empty() || right.is_empty() {
                            continue;
                        }
                        for (ix, &(b, c)) in self.pairs.iter().enumerate() {
                            if !p.has(ix) && left.has(b) && right.has(c) {
                                p.set(ix);
                                first_k[ix] = k;
                            }
                        }
                    }
                    for pr in &self.pair_rules {
                        t.work += 1;
                        if pr.pairs.iter().all(|&ix| p.has(ix)) && t.ctx_ok(&pr.ctx, i, j) && t.insert(pr.head, i, j) {
                            boundary_changed |= i == 0 || j == n;
                            if let Some(just) = t.just.as_mut() {
                                let splits = pr.pairs.iter().map(|&ix| first_k[ix]).collect();
                                just.insert((pr.head, i, j), Justification::Pairs { rule: pr.rule, splits });
                            }
                        }
                    }
                }
            }
            if !boundary_changed {
                break;
            }
        }
        Ok(t)
    }

    pub fn accepts(&self, w: &[char]) -> Result<bool, ParseError> {
        Ok(self.parse(w)?.accepts())
    }
}

/// The sets `T[i][j]` after the last pass.
#[derive(Clone, Debug)]
pub struct ParseTable {
    n: usize,
    num: usize,
    start: usize,
    cells: Vec<BitSet>,
    passes: usize,
    work: u64,
    just: Option<HashMap<(usize, usize, usize), Justification>>,
    convention: IndexConvention,
}

#[derive(Serialize)]
struct CellJson {
    i: usize,
    j: usize,
    nts: Vec<String>,
}

impl ParseTable {
    #[inline]
    fn cell(&self, i: usize, j: usize) -> &BitSet {
        &self.cells[i * (self.n + 1) + j]
    }

    fn insert(&mut self, a: usize, i: usize, j: usize) -> bool {
        let n = self.n;
        self.cells[i * (n + 1) + j].set(a)
    }

    /// Whether `set` is included in `T[i][j]`; entries with `i = j` do not
    /// exist and include only the empty set.
    fn within(&self, set: &BitSet, i: usize, j: usize) -> bool {
        if i == j {
            set.is_empty()
        } else {
            self.cell(i, j).contains_all(set)
        }
    }

    fn ctx_ok(&self, c: &Contexts, i: usize, j: usize) -> bool {
        let n = self.n;
        let (f_from, h_from) = match self.convention {
            IndexConvention::Corrected => (i, j),
            IndexConvention::AsPrinted => (j, i),
        };
        (!c.le || i == 0)
            && (!c.re || j == n)
            && self.within(&c.left, 0, i)
            && self.within(&c.left_ext, 0, j)
            && self.within(&c.right_ext, f_from, n)
            && self.within(&c.right, h_from, n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn passes(&self) -> usize {
        self.passes
    }

    /// Rule applications attempted plus split points visited.
    pub fn work(&self) -> u64 {
        self.work
    }

    pub fn contains(&self, a: NtId, i: usize, j: usize) -> bool {
        i < j && j <= self.n && a.index() < self.num && self.cell(i, j).has(a.index())
    }

    pub fn cell_set(&self, i: usize, j: usize) -> Vec<NtId> {
        if i >= j || j > self.n {
            return Vec::new();
        }
        self.cell(i, j).iter().map(|k| NtId(k as u32)).collect()
    }

    pub fn accepts(&self) -> bool {
        self.cell(0, self.n).has(self.start)
    }

    /// Same entries, ignoring pass counts and justifications.
    pub fn same_cells(&self, other: &ParseTable) -> bool {
        self.n == other.n && self.cells == other.cells
    }

    pub fn justification(&self, a: NtId, i: usize, j: usize) -> Option<&Justification> {
        self.just.as_ref()?.get(&(a.index(), i, j))
    }

    pub fn to_json(&self, g: &Grammar) -> serde_json::Value {
        let mut cells = Vec::new();
        for len in 1..=self.n {
            for i in 0..=self.n - len {
                let nts = self.cell_set(i, i + len);
                if !nts.is_empty() {
                    cells.push(CellJson { i, j: i + len, nts: nts.iter().map(|&a| g.name(a).to_string()).collect() });
                }
            }
        }
        serde_json::json!({ "n": self.n, "passes": self.passes, "cells": cells })
    }

    /// Plain-text rendering, one nonempty entry per line.
    pub fn render_text(&self, g: &Grammar) -> String {
        let mut out = String::new();
        for len in 1..=self.n {
            for i in 0..=self.n - len {
                let nts = self.cell_set(i, i + len);
                if !nts.is_empty() {
                    let names: Vec<&str> = nts.iter().map(|&a| g.name(a)).collect();
                    out.push_str(&format!("T[{i},{}] = {{{}}}\n", i + len, names.join(", ")));
                }
            }
        }
        out
    }

    /// Rebuilds a proof tree for `item` from the recorded justifications.
    /// Terminal items yield a single axiom node.
    pub fn extract_proof(&self, g: &Grammar, w: &[char], item: Item) -> Result<ProofNode, ExtractError> {
        match item.symbol {
            Symbol::T(c) => {
                if item.j == item.i + 1 && w.get(item.i) == Some(&c) {
                    Ok(ProofNode::axiom(item))
                } else {
                    Err(ExtractError::Absent)
                }
            }
            Symbol::N(a) => {
                if !self.contains(a, item.i, item.j) {
                    return Err(ExtractError::Absent);
                }
                if self.just.is_none() {
                    return Err(ExtractError::NoJustifications);
                }
                let mut memo = HashMap::new();
                Ok(self.build_proof(g, item, &mut memo))
            }
        }
    }

    fn build_proof(&self, g: &Grammar, item: Item, memo: &mut HashMap<Item, ProofNode>) -> ProofNode {
        if let Some(p) = memo.get(&item) {
            return p.clone();
        }
        let Symbol::N(a) = item.symbol else {
            return ProofNode::axiom(item);
        };
        let just = self.justification(a, item.i, item.j).expect("every entry is justified").clone();
        let (rule, splits) = match &just {
            Justification::Terminal { rule } => (*rule, Vec::new()),
            Justification::Pairs { rule, splits } => (*rule, splits.clone()),
        };
        let r = &g.rules()[rule];
        let (i, j, n) = (item.i, item.j, self.n);
        let mut node = ProofNode { item, rule: Some(rule), children: Vec::new(), context_children: Vec::new() };
        let mut split = splits.iter();
        for c in &r.conjuncts {
            match (c.kind, c.body.as_slice()) {
                (ConjunctKind::Base, [s @ Symbol::T(_)]) => node.children.push(ProofNode::axiom(Item::new(*s, i, j))),
                (ConjunctKind::Base, [b, c2]) => {
                    let k = *split.next().expect("one split per pair");
                    node.children.push(self.build_proof(g, Item::new(*b, i, k), memo));
                    node.children.push(self.build_proof(g, Item::new(*c2, k, j), memo));
                }
                (kind, [x]) => {
                    let (p, q) = kind.span(i, j, n);
                    node.context_children.push(self.build_proof(g, Item::new(*x, p, q), memo));
                }
                _ => unreachable!("shape-checked"),
            }
        }
        memo.insert(item, node.clone());
        node
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_grammar;
    use crate::normalize::to_binary_normal_form;

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn cycle_example() {
        let g = NfGrammar::new(parse_grammar("S -> A B; A -> a & >(B); B -> b & <(C); C -> a;").unwrap()).unwrap();
        let t = Parser::new(&g).parse(&chars("ab")).unwrap();
        let set = |i, j| {
            let mut v: Vec<&str> = t.cell_set(i, j).iter().map(|&a| g.name(a)).collect();
            v.sort();
            v
        };
        assert_eq!(set(0, 1), vec!["A", "C"]);
        assert_eq!(set(1, 2), vec!["B"]);
        assert_eq!(set(0, 2), vec!["S"]);
        assert!(t.passes() >= 2);
        assert!(t.accepts());
    }

    #[test]
    fn rejects_non_normal_form() {
        let g = parse_grammar("S -> a b;").unwrap();
        assert!(Parser::from_grammar(&g, ParserOptions::default()).is_err());
    }

    #[test]
    fn empty_input_is_an_error() {
        let g = NfGrammar::new(parse_grammar("S -> a;").unwrap()).unwrap();
        assert_eq!(Parser::new(&g).parse(&[]).unwrap_err(), ParseError::EmptyInput);
    }

    #[test]
    fn example_one() {
        let g = parse_grammar("S -> a S | S a | B C; A -> a; B -> b & <(A); C -> c & >(A);").unwrap();
        let nf = to_binary_normal_form(&g).unwrap();
        let p = Parser::with_options(&nf, ParserOptions { justify: true, ..Default::default() });
        let w = chars("abca");
        let t = p.parse(&w).unwrap();
        assert!(t.accepts());
        assert!(!p.accepts(&chars("abcb")).unwrap());
        let proof = t.extract_proof(&nf, &w, Item::new(Symbol::N(nf.start()), 0, 4)).unwrap();
        proof.verify(&nf, &w).unwrap();
        let leaf = t.extract_proof(&nf, &w, Item::new(Symbol::T('b'), 1, 2)).unwrap();
        assert_eq!(leaf.size(), 1);
        assert_eq!(t.extract_proof(&nf, &w, Item::new(Symbol::N(nf.start()), 0, 1)).unwrap_err(), ExtractError::Absent);
    }

    #[test]
    fn proofs_need_justifications() {
        let g = NfGrammar::new(parse_grammar("S -> a;").unwrap()).unwrap();
        let w = chars("a");
        let t = Parser::new(&g).parse(&w).unwrap();
        let e = t.extract_proof(&g, &w, Item::new(Symbol::N(g.start()), 0, 1)).unwrap_err();
        assert_eq!(e, ExtractError::NoJustifications);
    }

    #[test]
    fn printed_indices_lose_right_contexts() {
        let g = NfGrammar::new(parse_grammar("S -> C A; A -> a; C -> c & >(A);").unwrap()).unwrap();
        let w = chars("ca");
        assert!(Parser::new(&g).accepts(&w).unwrap());
        let printed =
            Parser::with_options(&g, ParserOptions { convention: IndexConvention::AsPrinted, ..Default::default() });
        assert!(!printed.accepts(&w).unwrap());
    }
}
