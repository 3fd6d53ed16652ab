//! Generation of the empty string, recorded together with the contexts in
//! which it happens.
//!
//! A triple `(U, A, V)` says that `A` generates the empty string at a
//! position whose whole prefix is generated by every member of `U` and
//! whose whole suffix is generated by every member of `V`. The two flags
//! additionally require the position to be the start (resp. end) of the
//! input; they arise from rules carrying edge flags.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::NormalizeError;
use crate::grammar::{ConjunctKind, Grammar, NtId, Symbol};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NullableTriple {
    pub u: BTreeSet<NtId>,
    pub a: NtId,
    pub v: BTreeSet<NtId>,
    pub left_edge: bool,
    pub right_edge: bool,
}

impl NullableTriple {
    pub fn plain(u: &[NtId], a: NtId, v: &[NtId]) -> Self {
        NullableTriple {
            u: u.iter().copied().collect(),
            a,
            v: v.iter().copied().collect(),
            left_edge: false,
            right_edge: false,
        }
    }

    /// Whether `self` holds wherever `other` does.
    pub fn subsumes(&self, other: &Self) -> bool {
        self.a == other.a
            && self.u.is_subset(&other.u)
            && self.v.is_subset(&other.v)
            && (!self.left_edge || other.left_edge)
            && (!self.right_edge || other.right_edge)
    }
}

/// `(A, V)`: `A` generates the empty string at the start of the input when
/// every member of `V` generates the whole input.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LeftEpsEntry {
    pub a: NtId,
    pub v: BTreeSet<NtId>,
    pub right_edge: bool,
}

/// `(U, A)`: mirror image of [`LeftEpsEntry`] at the end of the input.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RightEpsEntry {
    pub u: BTreeSet<NtId>,
    pub a: NtId,
    pub left_edge: bool,
}

#[derive(Clone, Debug)]
pub struct NullableAnalysis {
    /// `stages[i]` is the set after `i + 1` rounds; the last one is the
    /// fixpoint.
    pub stages: Vec<BTreeSet<NullableTriple>>,
}

impl NullableAnalysis {
    pub fn triples(&self) -> &BTreeSet<NullableTriple> {
        static EMPTY: BTreeSet<NullableTriple> = BTreeSet::new();
        self.stages.last().unwrap_or(&EMPTY)
    }
}

type Acc = (BTreeSet<NtId>, BTreeSet<NtId>, bool, bool);

fn merge(a: &Acc, t: &NullableTriple) -> Acc {
    (&a.0 | &t.u, &a.1 | &t.v, a.2 || t.left_edge, a.3 || t.right_edge)
}

fn acc_subsumes(x: &Acc, y: &Acc) -> bool {
    x.0.is_subset(&y.0) && x.1.is_subset(&y.1) && (!x.2 || y.2) && (!x.3 || y.3)
}

fn prune_accs(set: BTreeSet<Acc>) -> BTreeSet<Acc> {
    let v: Vec<Acc> = set.into_iter().collect();
    v.iter()
        .enumerate()
        .filter(|(k, x)| !v.iter().enumerate().any(|(l, y)| l != *k && acc_subsumes(y, x) && (y != *x)))
        .map(|(_, x)| x.clone())
        .collect()
}

/// Keeps only triples not subsumed by another one.
pub fn prune(set: &BTreeSet<NullableTriple>) -> BTreeSet<NullableTriple> {
    set.iter().filter(|t| !set.iter().any(|s| s != *t && s.subsumes(t))).cloned().collect()
}

fn check_contexts(g: &Grammar) -> Result<(), NormalizeError> {
    for r in g.rules() {
        for c in r.context_conjuncts() {
            if !matches!(c.body.as_slice(), [Symbol::N(_)]) {
                return Err(NormalizeError::NotPreNormal(crate::dsl::render_rule(g, r)));
            }
        }
    }
    Ok(())
}

fn round(g: &Grammar, prev: &BTreeSet<NullableTriple>, prune_states: bool) -> BTreeSet<NullableTriple> {
    let mut by_head: BTreeMap<NtId, Vec<&NullableTriple>> = BTreeMap::new();
    for t in prev {
        by_head.entry(t.a).or_default().push(t);
    }
    let mut out = BTreeSet::new();
    'rules: for r in g.rules() {
        let mut u = BTreeSet::new();
        let mut v = BTreeSet::new();
        for c in r.context_conjuncts() {
            let Symbol::N(x) = c.body[0] else { unreachable!("checked") };
            match c.kind {
                ConjunctKind::LeftProper | ConjunctKind::LeftExtended => u.insert(x),
                _ => v.insert(x),
            };
        }
        let mut states: BTreeSet<Acc> = BTreeSet::from([(u, v, r.left_edge, r.right_edge)]);
        for c in r.base_conjuncts() {
            for &s in &c.body {
                let Symbol::N(b) = s else { continue 'rules };
                let Some(ts) = by_head.get(&b) else { continue 'rules };
                let next: BTreeSet<Acc> = states.iter().flat_map(|a| ts.iter().map(move |t| merge(a, t))).collect();
                states = if prune_states { prune_accs(next) } else { next };
            }
        }
        for (u, v, le, re) in states {
            out.insert(NullableTriple { u, a: r.head, v, left_edge: le, right_edge: re });
        }
    }
    out
}

/// The exact set of nullable triples, with every intermediate stage.
/// Requires every context body to be a single nonterminal; base conjuncts
/// may be arbitrary.
pub fn compute_nullable(g: &Grammar) -> Result<NullableAnalysis, NormalizeError> {
    compute_nullable_with(g, false)
}

/// As [`compute_nullable`]; with `prune` set, every stage is reduced to
/// the triples not subsumed by another one. The pruned set characterizes
/// the same contexts.
pub fn compute_nullable_with(g: &Grammar, prune_sets: bool) -> Result<NullableAnalysis, NormalizeError> {
    check_contexts(g)?;
    let mut stages: Vec<BTreeSet<NullableTriple>> = Vec::new();
    let mut cur = BTreeSet::new();
    loop {
        let mut next = round(g, &cur, prune_sets);
        if prune_sets {
            next.extend(cur.iter().cloned());
            next = prune(&next);
        }
        if next == cur {
            break;
        }
        stages.push(next.clone());
        cur = next;
    }
    Ok(NullableAnalysis { stages })
}

/// Entries for nonterminals generating the empty string in an empty left
/// context, accumulating the right contexts required along the way.
pub fn compute_nullable_left_eps(nullable: &BTreeSet<NullableTriple>) -> BTreeSet<LeftEpsEntry> {
    type State = (BTreeSet<NtId>, bool);
    let mut cur: BTreeSet<LeftEpsEntry> = BTreeSet::new();
    loop {
        let mut by_head: BTreeMap<NtId, Vec<&LeftEpsEntry>> = BTreeMap::new();
        for e in &cur {
            by_head.entry(e.a).or_default().push(e);
        }
        let mut next = cur.clone();
        'triples: for t in nullable {
            let mut states: BTreeSet<State> = BTreeSet::from([(t.v.clone(), t.right_edge)]);
            for j in &t.u {
                let Some(es) = by_head.get(j) else { continue 'triples };
                states =
                    states.iter().flat_map(|s| es.iter().map(move |e| (&s.0 | &e.v, s.1 || e.right_edge))).collect();
            }
            for (v, re) in states {
                next.insert(LeftEpsEntry { a: t.a, v, right_edge: re });
            }
        }
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// Mirror image of [`compute_nullable_left_eps`].
pub fn compute_nullable_right_eps(nullable: &BTreeSet<NullableTriple>) -> BTreeSet<RightEpsEntry> {
    let mirrored: BTreeSet<NullableTriple> = nullable
        .iter()
        .map(|t| NullableTriple {
            u: t.v.clone(),
            a: t.a,
            v: t.u.clone(),
            left_edge: t.right_edge,
            right_edge: t.left_edge,
        })
        .collect();
    compute_nullable_left_eps(&mirrored)
        .into_iter()
        .map(|e| RightEpsEntry { u: e.v, a: e.a, left_edge: e.right_edge })
        .collect()
}

#[derive(Serialize)]
struct TripleJson {
    #[serde(rename = "U")]
    u: Vec<String>,
    #[serde(rename = "A")]
    a: String,
    #[serde(rename = "V")]
    v: Vec<String>,
    left_edge: bool,
    right_edge: bool,
}

pub fn nullable_json<'a>(g: &Grammar, triples: impl IntoIterator<Item = &'a NullableTriple>) -> serde_json::Value {
    let names = |s: &BTreeSet<NtId>| s.iter().map(|&x| g.name(x).to_string()).collect();
    let v: Vec<TripleJson> = triples
        .into_iter()
        .map(|t| TripleJson {
            u: names(&t.u),
            a: g.name(t.a).to_string(),
            v: names(&t.v),
            left_edge: t.left_edge,
            right_edge: t.right_edge,
        })
        .collect();
    serde_json::to_value(v).expect("serializable")
}

/// `({D}, B, {})` style rendering; flags appear as `<eps` / `>eps`.
pub fn render_triple(g: &Grammar, t: &NullableTriple) -> String {
    let set = |s: &BTreeSet<NtId>| s.iter().map(|&x| g.name(x)).collect::<Vec<_>>().join(", ");
    let mut flags = String::new();
    if t.left_edge {
        flags.push_str(" <eps");
    }
    if t.right_edge {
        flags.push_str(" >eps");
    }
    format!("({{{}}}, {}, {{{}}}){flags}", set(&t.u), g.name(t.a), set(&t.v))
}
