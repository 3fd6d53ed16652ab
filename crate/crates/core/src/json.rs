//! JSON export of grammars.

use serde::Serialize;

use crate::grammar::Grammar;

#[derive(Serialize)]
struct ConjunctJson {
    kind: &'static str,
    body: Vec<String>,
}

#[derive(Serialize)]
struct RuleJson {
    head: String,
    conjuncts: Vec<ConjunctJson>,
    left_edge: bool,
    right_edge: bool,
}

#[derive(Serialize)]
struct GrammarJson {
    alphabet: Vec<String>,
    start: String,
    nonterminals: Vec<String>,
    rules: Vec<RuleJson>,
}

/// Body symbols are written as DSL tokens: nonterminal names, bare or
/// quoted terminals.
pub fn grammar_to_json(g: &Grammar) -> serde_json::Value {
    let out = GrammarJson {
        alphabet: g.alphabet().iter().map(|c| c.to_string()).collect(),
        start: g.name(g.start()).to_string(),
        nonterminals: g.names().to_vec(),
        rules: g
            .rules()
            .iter()
            .map(|r| RuleJson {
                head: g.name(r.head).to_string(),
                conjuncts: r
                    .conjuncts
                    .iter()
                    .map(|c| ConjunctJson {
                        kind: c.kind.json_name(),
                        body: c.body.iter().map(|&s| g.display_symbol(s)).collect(),
                    })
                    .collect(),
                left_edge: r.left_edge,
                right_edge: r.right_edge,
            })
            .collect(),
    };
    serde_json::to_value(out).expect("serializable")
}
