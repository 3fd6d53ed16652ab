//! The grammar data model.
//!
//! A [`Grammar`] is an alphabet, a table of nonterminal names, a list of
//! rules and a start symbol. Nonterminals are referred to by [`NtId`], an
//! index into the name table, so that the deduction engines can use dense
//! tables. Every rule is a conjunction of conjuncts of five kinds: base
//! conjuncts describe the substring itself, the four context kinds describe
//! the left context, the extended left context (left context plus the
//! substring), the extended right context and the right context.
//!
//! Two boolean edge flags on a rule mark "the substring starts at the left
//! end of the input" and "the substring ends at the right end of the input".
//! They are the lowering of the empty context operators and are never
//! written by hand; the DSL surface forms `<(eps)` and `>(eps)` map onto
//! them.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

/// Index of a nonterminal in its grammar's name table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NtId(pub u32);

impl NtId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A symbol occurring in a conjunct body.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    T(char),
    N(NtId),
}

impl Symbol {
    pub fn as_nonterminal(self) -> Option<NtId> {
        match self {
            Symbol::N(a) => Some(a),
            Symbol::T(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConjunctKind {
    /// `alpha`: the substring itself.
    Base,
    /// `<(beta)`: the left context.
    LeftProper,
    /// `<=(gamma)`: the left context followed by the substring.
    LeftExtended,
    /// `>=(kappa)`: the substring followed by the right context.
    RightExtended,
    /// `>(delta)`: the right context.
    RightProper,
}

impl ConjunctKind {
    pub const ALL: [ConjunctKind; 5] = [
        ConjunctKind::Base,
        ConjunctKind::LeftProper,
        ConjunctKind::LeftExtended,
        ConjunctKind::RightExtended,
        ConjunctKind::RightProper,
    ];

    /// DSL operator prefix; empty for base conjuncts.
    pub fn operator(self) -> &'static str {
        match self {
            ConjunctKind::Base => "",
            ConjunctKind::LeftProper => "<",
            ConjunctKind::LeftExtended => "<=",
            ConjunctKind::RightExtended => ">=",
            ConjunctKind::RightProper => ">",
        }
    }

    /// Name used in the JSON export.
    pub fn json_name(self) -> &'static str {
        match self {
            ConjunctKind::Base => "base",
            ConjunctKind::LeftProper => "left",
            ConjunctKind::LeftExtended => "left_extended",
            ConjunctKind::RightExtended => "right_extended",
            ConjunctKind::RightProper => "right",
        }
    }

    /// The span `(p, q]` a conjunct of this kind describes, for a substring
    /// `(i, j]` of an input of length `n`.
    #[inline]
    pub fn span(self, i: usize, j: usize, n: usize) -> (usize, usize) {
        match self {
            ConjunctKind::Base => (i, j),
            ConjunctKind::LeftProper => (0, i),
            ConjunctKind::LeftExtended => (0, j),
            ConjunctKind::RightExtended => (i, n),
            ConjunctKind::RightProper => (j, n),
        }
    }

    pub fn is_context(self) -> bool {
        self != ConjunctKind::Base
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Conjunct {
    pub kind: ConjunctKind,
    pub body: Vec<Symbol>,
}

impl Conjunct {
    pub fn new(kind: ConjunctKind, body: Vec<Symbol>) -> Self {
        Conjunct { kind, body }
    }

    pub fn base(body: Vec<Symbol>) -> Self {
        Conjunct::new(ConjunctKind::Base, body)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: NtId,
    pub conjuncts: Vec<Conjunct>,
    pub left_edge: bool,
    pub right_edge: bool,
}

impl Rule {
    pub fn new(head: NtId, conjuncts: Vec<Conjunct>) -> Self {
        Rule { head, conjuncts, left_edge: false, right_edge: false }
    }

    pub fn with_edges(mut self, left_edge: bool, right_edge: bool) -> Self {
        self.left_edge = left_edge;
        self.right_edge = right_edge;
        self
    }

    pub fn base_conjuncts(&self) -> impl Iterator<Item = &Conjunct> {
        self.conjuncts.iter().filter(|c| c.kind == ConjunctKind::Base)
    }

    pub fn context_conjuncts(&self) -> impl Iterator<Item = &Conjunct> {
        self.conjuncts.iter().filter(|c| c.kind.is_context())
    }

    pub fn has_base(&self) -> bool {
        self.base_conjuncts().next().is_some()
    }

    /// Every symbol in every conjunct body.
    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.conjuncts.iter().flat_map(|c| c.body.iter().copied())
    }

    pub fn nonterminals(&self) -> impl Iterator<Item = NtId> + '_ {
        self.symbols().filter_map(Symbol::as_nonterminal)
    }
}

/// A grammar with two-sided contexts.
///
/// Construction does not check well-formedness; see [`crate::validate`].
#[derive(Clone, Debug)]
pub struct Grammar {
    alphabet: BTreeSet<char>,
    names: Vec<String>,
    rules: Vec<Rule>,
    start: NtId,
}

impl Grammar {
    pub fn new(alphabet: BTreeSet<char>, names: Vec<String>, rules: Vec<Rule>, start: NtId) -> Self {
        Grammar { alphabet, names, rules, start }
    }

    pub fn alphabet(&self) -> &BTreeSet<char> {
        &self.alphabet
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn start(&self) -> NtId {
        self.start
    }

    pub fn num_nonterminals(&self) -> usize {
        self.names.len()
    }

    pub fn nonterminals(&self) -> impl Iterator<Item = NtId> {
        (0..self.names.len() as u32).map(NtId)
    }

    /// Name of a nonterminal; out-of-range ids render as `?<index>`.
    pub fn name(&self, a: NtId) -> &str {
        self.names.get(a.index()).map(String::as_str).unwrap_or("?")
    }

    pub fn lookup(&self, name: &str) -> Option<NtId> {
        self.names.iter().position(|n| n == name).map(|i| NtId(i as u32))
    }

    pub fn rules_for(&self, a: NtId) -> impl Iterator<Item = (usize, &Rule)> {
        self.rules.iter().enumerate().filter(move |(_, r)| r.head == a)
    }

    /// A copy of this grammar with its rules replaced.
    pub fn with_rules(&self, rules: Vec<Rule>) -> Grammar {
        Grammar { rules, ..self.clone() }
    }

    pub fn with_alphabet(&self, alphabet: BTreeSet<char>) -> Grammar {
        Grammar { alphabet, ..self.clone() }
    }

    /// Whether `w` uses only symbols of the alphabet; returns the first
    /// offending character otherwise.
    pub fn check_input(&self, w: &[char]) -> Result<(), char> {
        match w.iter().find(|c| !self.alphabet.contains(c)) {
            Some(&c) => Err(c),
            None => Ok(()),
        }
    }

    pub fn display_symbol(&self, s: Symbol) -> String {
        match s {
            Symbol::T(c) => terminal_token(c),
            Symbol::N(a) => self.name(a).to_string(),
        }
    }

    /// Rules rendered with names, sorted; the basis of grammar equality.
    fn rule_multiset(&self) -> Vec<String> {
        let mut v: Vec<String> = self.rules.iter().map(|r| crate::dsl::render_rule(self, r)).collect();
        v.sort();
        v
    }

    /// Drops rules whose head is unreachable from the start symbol and
    /// rules that mention a nonterminal with no derivations, then compacts
    /// the name table. The start symbol is always kept.
    pub fn trimmed(&self) -> Grammar {
        let productive = self.productive();
        let rules: Vec<Rule> = self
            .rules
            .iter()
            .filter(|r| productive[r.head.index()] && r.nonterminals().all(|b| productive[b.index()]))
            .cloned()
            .collect();
        let g = self.with_rules(rules);
        let reach = g.reachable();
        let rules = g.rules.iter().filter(|r| reach[r.head.index()]).cloned().collect();
        g.with_rules(rules).compacted()
    }

    /// Nonterminals reachable from the start symbol through any conjunct.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.names.len()];
        if self.start.index() >= seen.len() {
            return seen;
        }
        let mut stack = vec![self.start];
        seen[self.start.index()] = true;
        while let Some(a) = stack.pop() {
            for (_, r) in self.rules_for(a) {
                for b in r.nonterminals() {
                    if b.index() < seen.len() && !seen[b.index()] {
                        seen[b.index()] = true;
                        stack.push(b);
                    }
                }
            }
        }
        seen
    }

    /// Least set of nonterminals having a rule whose referenced
    /// nonterminals are all in the set.
    pub fn productive(&self) -> Vec<bool> {
        let mut prod = vec![false; self.names.len()];
        loop {
            let mut changed = false;
            for r in &self.rules {
                let h = r.head.index();
                if h < prod.len() && !prod[h] && r.nonterminals().all(|b| b.index() < prod.len() && prod[b.index()]) {
                    prod[h] = true;
                    changed = true;
                }
            }
            if !changed {
                return prod;
            }
        }
    }

    /// Removes nonterminals that are neither the start symbol nor mentioned
    /// by any rule, renumbering the rest in their original order.
    pub fn compacted(&self) -> Grammar {
        let mut used = vec![false; self.names.len()];
        used[self.start.index()] = true;
        for r in &self.rules {
            used[r.head.index()] = true;
            for b in r.nonterminals() {
                used[b.index()] = true;
            }
        }
        let mut map = vec![None; self.names.len()];
        let mut names = Vec::new();
        for (i, n) in self.names.iter().enumerate() {
            if used[i] {
                map[i] = Some(NtId(names.len() as u32));
                names.push(n.clone());
            }
        }
        let remap = |a: NtId| map[a.index()].expect("used nonterminal");
        let rules = self
            .rules
            .iter()
            .map(|r| Rule {
                head: remap(r.head),
                conjuncts: r
                    .conjuncts
                    .iter()
                    .map(|c| Conjunct {
                        kind: c.kind,
                        body: c
                            .body
                            .iter()
                            .map(|&s| match s {
                                Symbol::N(b) => Symbol::N(remap(b)),
                                t => t,
                            })
                            .collect(),
                    })
                    .collect(),
                left_edge: r.left_edge,
                right_edge: r.right_edge,
            })
            .collect();
        Grammar { alphabet: self.alphabet.clone(), names, rules, start: remap(self.start) }
    }

    /// Total number of symbols over all rules plus one per rule.
    pub fn size(&self) -> usize {
        self.rules.iter().map(|r| 1 + r.conjuncts.iter().map(|c| c.body.len().max(1)).sum::<usize>()).sum()
    }
}

/// Equality up to rule order and nonterminal numbering.
impl PartialEq for Grammar {
    fn eq(&self, other: &Self) -> bool {
        let names_a: BTreeSet<&String> = self.names.iter().collect();
        let names_b: BTreeSet<&String> = other.names.iter().collect();
        self.alphabet == other.alphabet
            && self.name(self.start) == other.name(other.start)
            && names_a == names_b
            && self.rule_multiset() == other.rule_multiset()
    }
}

impl Eq for Grammar {}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::dsl::pretty_print(self))
    }
}

/// The DSL token for a terminal: bare for lowercase ASCII letters, quoted
/// otherwise.
pub fn terminal_token(c: char) -> String {
    if c.is_ascii_lowercase() {
        c.to_string()
    } else if c == '\'' || c == '\\' {
        format!("'\\{c}'")
    } else {
        format!("'{c}'")
    }
}

/// Prefix reserved for nonterminals invented by transformations.
pub const RESERVED_PREFIX: char = '_';

/// Incremental grammar construction with name interning and fresh names.
#[derive(Clone, Debug, Default)]
pub struct GrammarBuilder {
    alphabet: BTreeSet<char>,
    names: Vec<String>,
    index: BTreeMap<String, NtId>,
    rules: Vec<Rule>,
    rule_set: HashSet<Rule>,
    counter: usize,
}

impl GrammarBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts from an existing grammar's alphabet and names (not its rules).
    pub fn from_names(g: &Grammar) -> Self {
        let mut b = GrammarBuilder::new();
        b.alphabet = g.alphabet.clone();
        for n in &g.names {
            b.nonterminal(n);
        }
        b
    }

    pub fn terminal(&mut self, c: char) -> Symbol {
        self.alphabet.insert(c);
        Symbol::T(c)
    }

    pub fn alphabet(&mut self, cs: impl IntoIterator<Item = char>) -> &mut Self {
        self.alphabet.extend(cs);
        self
    }

    /// Interns `name`, returning the existing id if already present.
    pub fn nonterminal(&mut self, name: &str) -> NtId {
        if let Some(&a) = self.index.get(name) {
            return a;
        }
        let a = NtId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), a);
        a
    }

    pub fn lookup(&self, name: &str) -> Option<NtId> {
        self.index.get(name).copied()
    }

    /// A new nonterminal named `_<stem>`, suffixed with a counter if taken.
    pub fn fresh(&mut self, stem: &str) -> NtId {
        let base = format!("{RESERVED_PREFIX}{stem}");
        if !self.index.contains_key(&base) {
            return self.nonterminal(&base);
        }
        loop {
            self.counter += 1;
            let name = format!("{base}{}", self.counter);
            if !self.index.contains_key(&name) {
                return self.nonterminal(&name);
            }
        }
    }

    /// Adds a rule unless an identical one is already present.
    pub fn rule(&mut self, r: Rule) -> &mut Self {
        if self.rule_set.insert(r.clone()) {
            self.rules.push(r);
        }
        self
    }

    pub fn num_rules(&self) -> usize {
        self.rules.len()
    }

    pub fn build(self, start: NtId) -> Grammar {
        Grammar { alphabet: self.alphabet, names: self.names, rules: self.rules, start }
    }
}
