use ctxgram::grammar::{ConjunctKind, Symbol};
use ctxgram::json::grammar_to_json;
use ctxgram::validate::has_errors;
use ctxgram::{parse_grammar, pretty_print, validate};

const EX1: &str = "S -> a S | S a | B C; A -> a; B -> b & <(A); C -> c & >(A);";

#[test]
fn json_field_names() {
    let g = parse_grammar(EX1).unwrap();
    let j = grammar_to_json(&g);
    assert_eq!(j["alphabet"], serde_json::json!(["a", "b", "c"]));
    assert_eq!(j["start"], "S");
    let rules = j["rules"].as_array().unwrap();
    assert_eq!(rules.len(), 6);
    let b = rules.iter().find(|r| r["head"] == "B").unwrap();
    assert_eq!(b["left_edge"], false);
    assert_eq!(b["right_edge"], false);
    let kinds: Vec<&str> = b["conjuncts"].as_array().unwrap().iter().map(|c| c["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds.len(), 2);
    assert_eq!(b["conjuncts"][1]["body"], serde_json::json!(["A"]));
}

#[test]
fn every_conjunct_kind_parses() {
    let g = parse_grammar("S -> a & <(A) & <=(A a) & >=(a A) & >(A); A -> a;").unwrap();
    let kinds: Vec<ConjunctKind> = g.rules()[0].conjuncts.iter().map(|c| c.kind).collect();
    assert_eq!(
        kinds,
        vec![
            ConjunctKind::Base,
            ConjunctKind::LeftProper,
            ConjunctKind::LeftExtended,
            ConjunctKind::RightExtended,
            ConjunctKind::RightProper
        ]
    );
    assert_eq!(parse_grammar(&pretty_print(&g)).unwrap(), g);
}

#[test]
fn empty_extended_context_touches_the_boundary() {
    let g = parse_grammar("S -> a & <=(eps);").unwrap();
    let r = &g.rules()[0];
    assert!(r.left_edge && !r.right_edge);
    assert!(r.conjuncts.iter().any(|c| c.kind == ConjunctKind::Base && c.body.is_empty()));
}

#[test]
fn eps_rule() {
    let g = parse_grammar("S -> eps;").unwrap();
    assert_eq!(g.rules().len(), 1);
    assert!(g.rules()[0].conjuncts[0].body.is_empty());
}

#[test]
fn diagnostics() {
    let err = parse_grammar("S -> & <(A); A -> a;").unwrap_err();
    assert!(err.messages().any(|m| m.contains("rule has no base conjunct")), "{err}");

    let err = parse_grammar("S -> Z;").unwrap_err();
    assert!(err.messages().any(|m| m.contains('Z')), "{err}");

    let g = parse_grammar("nonterminals A; S -> A;").unwrap();
    let d = validate(&g);
    assert!(!has_errors(&d));
    assert!(d.iter().any(|d| d.message == "unproductive nonterminal A"));
    assert!(validate(&parse_grammar(EX1).unwrap()).is_empty());
}

#[test]
fn quoted_terminals_round_trip() {
    let g = parse_grammar("S -> '(' S ')' S | eps;").unwrap();
    assert!(g.rules()[0].conjuncts[0].body.contains(&Symbol::T('(')));
    assert_eq!(parse_grammar(&pretty_print(&g)).unwrap(), g);
}
