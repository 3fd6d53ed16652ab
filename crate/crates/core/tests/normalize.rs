mod common;

use std::collections::BTreeSet;

use ctxgram::corpus;
use ctxgram::dsl::render_rule;
use ctxgram::grammar::{Grammar, Symbol};
use ctxgram::normalize::{
    check_shape, compute_nullable, eliminate_epsilon, eliminate_null_contexts, eliminate_unit_conjuncts, is_pre_normal,
    normalize_with_report, pre_normalize, NormalizeOptions,
};
use ctxgram::parser::Parser;
use ctxgram::{parse_grammar, to_binary_normal_form, Oracle};

fn rules(g: &Grammar) -> BTreeSet<String> {
    g.rules().iter().map(|r| render_rule(g, r)).collect()
}

fn same_language(a: &Grammar, b: &Grammar, max_len: usize, skip_empty: bool) -> Result<(), String> {
    let (oa, ob) = (Oracle::new(a).unwrap(), Oracle::new(b).unwrap());
    let sigma: Vec<char> = a.alphabet().iter().copied().collect();
    for w in common::words(&sigma, max_len) {
        if skip_empty && w.is_empty() {
            continue;
        }
        if oa.accepts(&w).unwrap() != ob.accepts(&w).unwrap() {
            return Err(w.into_iter().collect());
        }
    }
    Ok(())
}

/// Oracle on `g` against the parser on its normal form, for non-empty
/// strings.
fn nf_agrees(g: &Grammar, opts: NormalizeOptions, max_len: usize) -> Result<(), String> {
    let (nf, _) = normalize_with_report(g, opts).map_err(|e| e.to_string())?;
    let oracle = Oracle::new(g).unwrap();
    let parser = Parser::new(&nf);
    let sigma: Vec<char> = g.alphabet().iter().copied().collect();
    for w in common::words(&sigma, max_len).into_iter().filter(|w| !w.is_empty()) {
        if oracle.accepts(&w).unwrap() != parser.accepts(&w).unwrap() {
            return Err(format!("{:?}", w.iter().collect::<String>()));
        }
    }
    Ok(())
}

#[test]
fn long_context_bodies_are_split() {
    let g = parse_grammar("nonterminals B E F; C -> B & <=(E F c); B -> b; E -> e; F -> f;").unwrap();
    let p = pre_normalize(&g);
    assert!(is_pre_normal(&p));
    assert_eq!(
        rules(&p),
        ["C -> B & <=(_N)", "B -> b", "E -> e", "F -> f", "_N -> E _P", "_P -> F _Xc", "_Xc -> c"]
            .into_iter()
            .map(String::from)
            .collect()
    );
    same_language(&g, &p, 6, false).unwrap();
    let plain = parse_grammar("A -> a;").unwrap();
    assert_eq!(pre_normalize(&plain), plain);
}

#[test]
fn empty_base_with_contexts() {
    let g = parse_grammar("nonterminals D; A -> eps & <(D); D -> d;").unwrap();
    assert_eq!(
        rules(&pre_normalize(&g)),
        ["A -> _E & <(D)", "D -> d", "_E -> eps"].into_iter().map(String::from).collect()
    );
}

#[test]
fn pre_normal_form_preserves_corpus_languages() {
    for e in corpus::all().unwrap() {
        let p = pre_normalize(&e.grammar);
        assert!(is_pre_normal(&p), "{}", e.id);
        same_language(&e.grammar, &p, 5, false).unwrap_or_else(|w| panic!("{}: {w}", e.id));
    }
}

#[test]
fn empty_rule_elimination_on_corpus() {
    for e in corpus::all().unwrap() {
        let eps = eliminate_epsilon(&pre_normalize(&e.grammar)).unwrap();
        same_language(&e.grammar, &eps, 5, true).unwrap_or_else(|w| panic!("{}: {w}", e.id));
        let o = Oracle::new(&eps).unwrap();
        let sigma: Vec<char> = eps.alphabet().iter().copied().collect();
        for w in common::words(&sigma, 4) {
            let items = o.derive(&w).unwrap();
            for a in eps.nonterminals() {
                for i in 0..=w.len() {
                    assert!(!items.contains(Symbol::N(a), i, i), "{}: {} derives the empty string", e.id, eps.name(a));
                }
            }
        }
    }
}

#[test]
fn nullable_stages_grow() {
    for e in corpus::all().unwrap() {
        let a = compute_nullable(&pre_normalize(&e.grammar)).unwrap();
        for pair in a.stages.windows(2) {
            assert!(pair[0].is_subset(&pair[1]), "{}", e.id);
        }
    }
    let none = compute_nullable(&parse_grammar("S -> a S | a;").unwrap()).unwrap();
    assert!(none.triples().is_empty());
}

#[test]
fn boundary_flags() {
    let g = parse_grammar("S -> a & <(eps) & >(eps);").unwrap();
    let flags = eliminate_null_contexts(&g);
    assert_eq!(flags, g);
    assert!(flags.rules()[0].left_edge && flags.rules()[0].right_edge);
    let nf = to_binary_normal_form(&g).unwrap();
    let o = Oracle::new(&g).unwrap();
    let p = Parser::new(&nf);
    for w in common::words(&['a'], 3).into_iter().skip(1) {
        assert_eq!(p.accepts(&w).unwrap(), w.len() == 1);
        assert_eq!(o.accepts(&w).unwrap(), w.len() == 1);
    }
}

#[test]
fn unit_cycles() {
    let g = parse_grammar("A -> B; B -> A | b b;").unwrap();
    let out = eliminate_unit_conjuncts(&pre_normalize(&g)).unwrap();
    assert!(out
        .rules()
        .iter()
        .all(|r| r.base_conjuncts().all(|c| c.body.len() != 1 || matches!(c.body[0], Symbol::T(_)))));
    nf_agrees(&g, NormalizeOptions::default(), 6).unwrap();
}

#[test]
fn empty_language() {
    let g = parse_grammar("alphabet a; S -> eps;").unwrap();
    let nf = to_binary_normal_form(&g).unwrap();
    assert!(nf.rules().is_empty());
    assert!(Oracle::new(&g).unwrap().accepts(&[]).unwrap());
}

#[test]
fn corpus_normal_forms() {
    for e in corpus::all().unwrap() {
        for opts in [NormalizeOptions::default(), NormalizeOptions { prune_nullable: false, prune_rules: false }] {
            let (nf, report) = normalize_with_report(&e.grammar, opts).unwrap();
            check_shape(&nf).unwrap();
            assert_eq!(report.stages.last().unwrap().rules, nf.rules().len());
            assert!(nf.rules().iter().all(|r| r.has_base()));
        }
        nf_agrees(&e.grammar, NormalizeOptions { prune_nullable: false, prune_rules: false }, 4)
            .unwrap_or_else(|w| panic!("{}: {w}", e.id));
    }
}

#[test]
fn random_grammars_normalize_exactly() {
    for seed in 0..300 {
        let g = common::random_grammar(seed, 4, 6);
        for opts in [NormalizeOptions::default(), NormalizeOptions { prune_nullable: false, prune_rules: false }] {
            nf_agrees(&g, opts, 5)
                .unwrap_or_else(|w| panic!("seed {seed} ({opts:?}): {w}\n{}", ctxgram::pretty_print(&g)));
        }
    }
}
