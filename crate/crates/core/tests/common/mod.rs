//! Seeded random grammars for differential and property tests.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ctxgram::grammar::{Conjunct, ConjunctKind, Grammar, GrammarBuilder, NtId, Rule, Symbol};

pub const CONTEXT_KINDS: [ConjunctKind; 4] =
    [ConjunctKind::LeftProper, ConjunctKind::LeftExtended, ConjunctKind::RightExtended, ConjunctKind::RightProper];

/// A user-level grammar over `{a, b}`: bodies of length up to 3 mixing
/// terminals and nonterminals, occasional empty bodies and contexts of any
/// kind. No edge flags.
pub fn random_grammar(seed: u64, max_nts: usize, max_rules: usize) -> Grammar {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GrammarBuilder::new();
    b.alphabet(['a', 'b']);
    let nts: Vec<NtId> = (0..rng.gen_range(1..=max_nts)).map(|k| b.nonterminal(&format!("N{k}"))).collect();
    let body = |rng: &mut ChaCha8Rng, max: usize| -> Vec<Symbol> {
        (0..rng.gen_range(0..=max))
            .map(|_| {
                if rng.gen_bool(0.4) {
                    Symbol::T(if rng.gen_bool(0.5) { 'a' } else { 'b' })
                } else {
                    Symbol::N(nts[rng.gen_range(0..nts.len())])
                }
            })
            .collect()
    };
    for _ in 0..rng.gen_range(1..=max_rules) {
        let head = nts[rng.gen_range(0..nts.len())];
        let mut cs = vec![Conjunct::base(body(&mut rng, 3))];
        if rng.gen_bool(0.2) {
            cs.push(Conjunct::base(body(&mut rng, 2)));
        }
        for kind in CONTEXT_KINDS {
            if rng.gen_bool(0.15) {
                cs.push(Conjunct::new(kind, body(&mut rng, 2)));
            }
        }
        b.rule(Rule::new(head, cs));
    }
    b.build(nts[0])
}

/// Every string over `sigma` of length at most `max_len`.
pub fn words(sigma: &[char], max_len: usize) -> Vec<Vec<char>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|p: &Vec<char>| {
                sigma.iter().map(move |&c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}
