//! Items, rule application and deduction replay.
//!
//! An item `X(u<w>v)` over a fixed input `a_1 ... a_n` is identified by the
//! symbol and the two positions `i <= j` with `u = a_1..a_i`,
//! `w = a_{i+1}..a_j` and `v = a_{j+1}..a_n`. A rule derives `A` at `(i, j)`
//! when every base conjunct body can be split over `(i, j]`, every context
//! body over its context span (see [`ConjunctKind::span`]), and the edge
//! flags hold (`i = 0` for the left flag, `j = n` for the right one).

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::grammar::{ConjunctKind, Grammar, Rule, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Item {
    pub symbol: Symbol,
    pub i: usize,
    pub j: usize,
}

impl Item {
    pub fn new(symbol: Symbol, i: usize, j: usize) -> Self {
        debug_assert!(i <= j);
        Item { symbol, i, j }
    }

    /// `X(u<w>v)` notation.
    pub fn display(&self, g: &Grammar, w: &[char]) -> String {
        let s = |a: usize, b: usize| w[a..b].iter().collect::<String>();
        format!("{}({}<{}>{})", g.display_symbol(self.symbol), s(0, self.i), s(self.i, self.j), s(self.j, w.len()))
    }
}

/// Membership oracle for items, used by rule application.
pub trait Facts {
    fn holds(&self, symbol: Symbol, i: usize, j: usize) -> bool;
}

/// Facts given by an explicit set of items.
impl Facts for HashSet<Item> {
    fn holds(&self, symbol: Symbol, i: usize, j: usize) -> bool {
        self.contains(&Item { symbol, i, j })
    }
}

/// Finds a split `p = k_0 <= k_1 <= ... <= k_l = q` with `body[t]` holding
/// on `(k_t, k_{t+1}]`, trying split points in ascending order. Returns the
/// `l + 1` boundary points.
pub fn find_partition<F: Facts + ?Sized>(body: &[Symbol], p: usize, q: usize, facts: &F) -> Option<Vec<usize>> {
    if p > q {
        return None;
    }
    if body.is_empty() {
        return (p == q).then(|| vec![p]);
    }
    let mut points = vec![p];
    let mut dead: HashSet<(usize, usize)> = HashSet::new();
    if split(body, 0, p, q, facts, &mut points, &mut dead) {
        Some(points)
    } else {
        None
    }
}

fn split<F: Facts + ?Sized>(
    body: &[Symbol],
    t: usize,
    x: usize,
    q: usize,
    facts: &F,
    points: &mut Vec<usize>,
    dead: &mut HashSet<(usize, usize)>,
) -> bool {
    if t == body.len() {
        return x == q;
    }
    if dead.contains(&(t, x)) {
        return false;
    }
    let last = t + 1 == body.len();
    let ys: Box<dyn Iterator<Item = usize>> = match body[t] {
        Symbol::T(_) => Box::new(std::iter::once(x + 1).filter(|&y| y <= q)),
        Symbol::N(_) if last => Box::new(std::iter::once(q)),
        Symbol::N(_) => Box::new(x..=q),
    };
    for y in ys {
        if facts.holds(body[t], x, y) {
            points.push(y);
            if split(body, t + 1, y, q, facts, points, dead) {
                return true;
            }
            points.pop();
        }
    }
    dead.insert((t, x));
    false
}

/// How one rule application was satisfied: the boundary points chosen for
/// each conjunct, in conjunct order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Justification {
    pub rule: usize,
    pub partitions: Vec<Vec<usize>>,
}

/// Tries rule `r` at `(i, j)` on an input of length `n`.
pub fn apply_rule<F: Facts + ?Sized>(r: &Rule, i: usize, j: usize, n: usize, facts: &F) -> Option<Vec<Vec<usize>>> {
    if (r.left_edge && i != 0) || (r.right_edge && j != n) {
        return None;
    }
    r.conjuncts
        .iter()
        .map(|c| {
            let (p, q) = c.kind.span(i, j, n);
            find_partition(&c.body, p, q, facts)
        })
        .collect()
}

/// The premises named by a justification: one item per body symbol of
/// every conjunct.
pub fn premises(r: &Rule, partitions: &[Vec<usize>]) -> Vec<Item> {
    let mut out = Vec::new();
    for (c, pts) in r.conjuncts.iter().zip(partitions) {
        for (t, &s) in c.body.iter().enumerate() {
            out.push(Item::new(s, pts[t], pts[t + 1]));
        }
    }
    out
}

/// A node of a proof tree. Leaves are axioms (`rule == None`), i.e.
/// terminal items of length one. `children` holds the sub-proofs for base
/// conjunct symbols, `context_children` those for context conjuncts, each
/// in conjunct order and then body order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProofNode {
    #[serde(skip)]
    pub item: Item,
    pub rule: Option<usize>,
    pub children: Vec<ProofNode>,
    pub context_children: Vec<ProofNode>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ProofError {
    #[error("item {0} is not an axiom of the input")]
    BadAxiom(String),
    #[error("rule {rule} does not derive {item}: {why}")]
    BadStep { rule: usize, item: String, why: String },
    #[error("premise {0} is used before it is derived")]
    Unproven(String),
    #[error("unknown rule {0}")]
    UnknownRule(usize),
}

impl ProofNode {
    pub fn axiom(item: Item) -> Self {
        ProofNode { item, rule: None, children: Vec::new(), context_children: Vec::new() }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().chain(&self.context_children).map(ProofNode::size).sum::<usize>()
    }

    /// Checks that every node replays one rule application over the exact
    /// items of its children.
    pub fn verify(&self, g: &Grammar, w: &[char]) -> Result<(), ProofError> {
        let n = w.len();
        let shown = |it: &Item| it.display(g, w);
        let Some(rule_ix) = self.rule else {
            return match self.item.symbol {
                Symbol::T(c) if self.item.j == self.item.i + 1 && w.get(self.item.i) == Some(&c) => Ok(()),
                _ => Err(ProofError::BadAxiom(shown(&self.item))),
            };
        };
        let r = g.rules().get(rule_ix).ok_or(ProofError::UnknownRule(rule_ix))?;
        let bad = |why: &str| ProofError::BadStep { rule: rule_ix, item: shown(&self.item), why: why.into() };
        if self.item.symbol != Symbol::N(r.head) {
            return Err(bad("head mismatch"));
        }
        let (i, j) = (self.item.i, self.item.j);
        if (r.left_edge && i != 0) || (r.right_edge && j != n) {
            return Err(bad("edge flag violated"));
        }
        let mut base = self.children.iter();
        let mut ctx = self.context_children.iter();
        for c in &r.conjuncts {
            let (mut x, q) = c.kind.span(i, j, n);
            let source = if c.kind == ConjunctKind::Base { &mut base } else { &mut ctx };
            for &s in &c.body {
                let child = source.next().ok_or_else(|| bad("missing sub-proof"))?;
                if child.item.symbol != s || child.item.i != x {
                    return Err(bad("sub-proof does not match the conjunct body"));
                }
                x = child.item.j;
            }
            if x != q {
                return Err(bad("conjunct body does not cover its span"));
            }
        }
        if base.next().is_some() || ctx.next().is_some() {
            return Err(bad("extra sub-proofs"));
        }
        for child in self.children.iter().chain(&self.context_children) {
            child.verify(g, w)?;
        }
        Ok(())
    }

    /// Linearizes the tree into deduction steps, premises first, each item
    /// concluded once.
    pub fn steps(&self) -> Vec<Step> {
        let mut out = Vec::new();
        let mut done = HashSet::new();
        self.collect_steps(&mut out, &mut done);
        out
    }

    fn collect_steps(&self, out: &mut Vec<Step>, done: &mut HashSet<Item>) {
        if done.contains(&self.item) {
            return;
        }
        for c in self.children.iter().chain(&self.context_children) {
            c.collect_steps(out, done);
        }
        done.insert(self.item);
        let mut premises: Vec<Item> = self.children.iter().map(|c| c.item).collect();
        premises.extend(self.context_children.iter().map(|c| c.item));
        out.push(Step { conclusion: self.item, rule: self.rule, premises });
    }

    /// Indented text rendering, one item per line.
    pub fn render_text(&self, g: &Grammar, w: &[char]) -> String {
        let mut out = String::new();
        self.render_into(g, w, 0, "", &mut out);
        out
    }

    fn render_into(&self, g: &Grammar, w: &[char], depth: usize, tag: &str, out: &mut String) {
        use std::fmt::Write as _;
        let rule = match self.rule {
            None => "axiom".to_string(),
            Some(r) => crate::dsl::render_rule(g, &g.rules()[r]),
        };
        let _ = writeln!(out, "{}{}{}  [{}]", "  ".repeat(depth), tag, self.item.display(g, w), rule);
        for c in &self.children {
            c.render_into(g, w, depth + 1, "", out);
        }
        for c in &self.context_children {
            c.render_into(g, w, depth + 1, "ctx ", out);
        }
    }

    pub fn to_json(&self, g: &Grammar, w: &[char]) -> serde_json::Value {
        serde_json::json!({
            "symbol": g.display_symbol(self.item.symbol),
            "i": self.item.i,
            "j": self.item.j,
            "text": self.item.display(g, w),
            "rule": self.rule.map(|r| crate::dsl::render_rule(g, &g.rules()[r])),
            "children": self.children.iter().map(|c| c.to_json(g, w)).collect::<Vec<_>>(),
            "context_children": self.context_children.iter().map(|c| c.to_json(g, w)).collect::<Vec<_>>(),
        })
    }

    /// Graphviz rendering; shared sub-proofs become shared nodes, context
    /// edges are dashed.
    pub fn to_dot(&self, g: &Grammar, w: &[char]) -> String {
        use std::fmt::Write as _;
        let mut ids: HashMap<Item, usize> = HashMap::new();
        let mut nodes = String::new();
        let mut edges = String::new();
        fn walk(
            node: &ProofNode,
            g: &Grammar,
            w: &[char],
            ids: &mut HashMap<Item, usize>,
            nodes: &mut String,
            edges: &mut String,
        ) -> usize {
            if let Some(&id) = ids.get(&node.item) {
                return id;
            }
            let id = ids.len();
            ids.insert(node.item, id);
            let label = node.item.display(g, w).replace('\\', "\\\\").replace('"', "\\\"");
            let shape = if node.rule.is_none() { "plaintext" } else { "ellipse" };
            let _ = writeln!(nodes, "  n{id} [label=\"{label}\", shape={shape}];");
            for c in &node.children {
                let cid = walk(c, g, w, ids, nodes, edges);
                let _ = writeln!(edges, "  n{id} -> n{cid};");
            }
            for c in &node.context_children {
                let cid = walk(c, g, w, ids, nodes, edges);
                let _ = writeln!(edges, "  n{id} -> n{cid} [style=dashed];");
            }
            id
        }
        walk(self, g, w, &mut ids, &mut nodes, &mut edges);
        format!("digraph proof {{\n{nodes}{edges}}}\n")
    }
}

/// One line of a deduction: `premises |- conclusion (rule)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub conclusion: Item,
    /// `None` for an axiom.
    pub rule: Option<usize>,
    pub premises: Vec<Item>,
}

/// Replays a deduction: every step must be an axiom of `w` or an
/// application of its rule using only its listed premises, and every
/// premise must have been concluded by an earlier step.
pub fn replay(g: &Grammar, w: &[char], steps: &[Step]) -> Result<(), ProofError> {
    let n = w.len();
    let mut proven: HashSet<Item> = HashSet::new();
    for st in steps {
        let shown = st.conclusion.display(g, w);
        for p in &st.premises {
            if !proven.contains(p) {
                return Err(ProofError::Unproven(p.display(g, w)));
            }
        }
        match st.rule {
            None => match st.conclusion.symbol {
                Symbol::T(c) if st.conclusion.j == st.conclusion.i + 1 && w.get(st.conclusion.i) == Some(&c) => {}
                _ => return Err(ProofError::BadAxiom(shown)),
            },
            Some(ix) => {
                let r = g.rules().get(ix).ok_or(ProofError::UnknownRule(ix))?;
                let local: HashSet<Item> = st.premises.iter().copied().collect();
                let ok = st.conclusion.symbol == Symbol::N(r.head)
                    && apply_rule(r, st.conclusion.i, st.conclusion.j, n, &local).is_some();
                if !ok {
                    return Err(ProofError::BadStep {
                        rule: ix,
                        item: shown,
                        why: "premises do not satisfy the rule".into(),
                    });
                }
            }
        }
        proven.insert(st.conclusion);
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct TraceError {
    pub line: usize,
    pub message: String,
}

/// Parses an item written as `X(u<w>v)` against the input `w`.
pub fn parse_item(g: &Grammar, input: &[char], text: &str) -> Result<Item, String> {
    let text = text.trim();
    let open = text.find('(').ok_or("missing `(`")?;
    if !text.ends_with(')') {
        return Err("missing `)`".into());
    }
    let sym_text = &text[..open];
    let inner: Vec<char> = text[open + 1..text.len() - 1].chars().collect();
    let lt = inner.iter().position(|&c| c == '<').ok_or("missing `<`")?;
    let gt = inner.iter().rposition(|&c| c == '>').ok_or("missing `>`")?;
    if gt < lt {
        return Err("`>` before `<`".into());
    }
    let u = &inner[..lt];
    let w = &inner[lt + 1..gt];
    let v = &inner[gt + 1..];
    let whole: Vec<char> = u.iter().chain(w).chain(v).copied().collect();
    if whole != input {
        return Err(format!("`{text}` is not about the input"));
    }
    let symbol = if let Some(a) = g.lookup(sym_text) {
        Symbol::N(a)
    } else {
        let cs: Vec<char> = sym_text.chars().collect();
        match cs.as_slice() {
            [c] => Symbol::T(*c),
            ['\'', c, '\''] => Symbol::T(*c),
            _ => return Err(format!("unknown symbol `{sym_text}`")),
        }
    };
    Ok(Item::new(symbol, u.len(), u.len() + w.len()))
}

fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parses a deduction trace. Each non-blank, non-`#` line reads
///
/// ```text
/// premise, premise |- conclusion (rule)
/// ```
///
/// where the rule is written as in the DSL (`B -> b & <(A)`) or is the word
/// `axiom`.
pub fn parse_trace(g: &Grammar, input: &[char], text: &str) -> Result<Vec<Step>, TraceError> {
    let rendered: Vec<String> = g.rules().iter().map(|r| normalize_ws(&crate::dsl::render_rule(g, r))).collect();
    let mut steps = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let err = |message: String| TraceError { line: k + 1, message };
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (lhs, rhs) = line.split_once("|-").ok_or_else(|| err("missing `|-`".into()))?;
        let rhs = rhs.trim();
        let close = rhs.find(')').ok_or_else(|| err("missing conclusion".into()))?;
        let conclusion = parse_item(g, input, &rhs[..=close]).map_err(err)?;
        let rule_text = rhs[close + 1..].trim();
        let rule_text = rule_text
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| err("rule must be given in parentheses".into()))?;
        let rule = if rule_text.trim() == "axiom" {
            None
        } else {
            let want = normalize_ws(rule_text);
            Some(rendered.iter().position(|r| *r == want).ok_or_else(|| err(format!("no rule `{want}`")))?)
        };
        let mut premises = Vec::new();
        let lhs = lhs.trim();
        if !lhs.is_empty() {
            for part in split_items(lhs) {
                premises.push(parse_item(g, input, part).map_err(err)?);
            }
        }
        steps.push(Step { conclusion, rule, premises });
    }
    Ok(steps)
}

/// Splits `X(..), Y(..)` at top-level commas.
fn split_items(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut begin) = (0i32, 0usize);
    for (k, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[begin..k].trim());
                begin = k + 1;
            }
            _ => {}
        }
    }
    out.push(s[begin..].trim());
    out
}

/// Renders steps in the trace format accepted by [`parse_trace`].
pub fn render_trace(g: &Grammar, w: &[char], steps: &[Step]) -> String {
    let mut out = String::new();
    for st in steps {
        let premises: Vec<String> = st.premises.iter().map(|p| p.display(g, w)).collect();
        let rule = match st.rule {
            None => "axiom".to_string(),
            Some(r) => crate::dsl::render_rule(g, &g.rules()[r]),
        };
        let lhs = if premises.is_empty() { String::new() } else { format!("{} ", premises.join(", ")) };
        out.push_str(&format!("{lhs}|- {} ({rule})\n", st.conclusion.display(g, w)));
    }
    out
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} <- {:?} by {:?}", self.conclusion, self.premises, self.rule)
    }
}
