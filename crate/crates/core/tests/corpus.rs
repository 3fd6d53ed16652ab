//! Golden files regenerate exactly from the oracle. Set `CTXGRAM_BLESS=1`
//! to rewrite them after changing a grammar.

use std::path::PathBuf;

use ctxgram::corpus::{self, grammar_sha256, load_unchecked, render_lang, with_hash, CorpusEntry, RAW};
use ctxgram::normalize::{check_shape, NfGrammar};
use ctxgram::parser::Parser;
use ctxgram::validate::{has_errors, validate};

fn dir(id: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(id)
}

fn table_golden(e: &CorpusEntry) -> Option<String> {
    let input: Vec<char> = e.table_input.as_ref()?.chars().collect();
    let nf = if check_shape(&e.grammar).is_ok() {
        NfGrammar::new(e.grammar.clone()).unwrap()
    } else {
        ctxgram::to_binary_normal_form(&e.grammar).unwrap()
    };
    let t = Parser::new(&nf).parse(&input).unwrap();
    Some(serde_json::to_string_pretty(&t.to_json(&nf)).unwrap() + "\n")
}

#[test]
fn goldens_regenerate() {
    let bless = std::env::var("CTXGRAM_BLESS").is_ok_and(|v| v == "1");
    let mut stale = Vec::new();
    for raw in RAW {
        let e = load_unchecked(raw).unwrap();
        let lang = render_lang(&e.generate_lang());
        let table = table_golden(&e);
        let hash = grammar_sha256(raw.grammar);
        if bless {
            std::fs::write(dir(raw.id).join("lang.txt"), &lang).unwrap();
            std::fs::write(dir(raw.id).join("notes.md"), with_hash(raw.notes, &hash)).unwrap();
            if let Some(t) = &table {
                std::fs::write(dir(raw.id).join("table.json"), t).unwrap();
            }
            continue;
        }
        if lang != raw.lang {
            stale.push(format!("{}: lang.txt", raw.id));
        }
        if table.as_deref() != raw.table {
            stale.push(format!("{}: table.json", raw.id));
        }
        if corpus::load(raw.id).is_err() {
            stale.push(format!("{}: grammar hash", raw.id));
        }
    }
    assert!(stale.is_empty(), "stale goldens (rerun with CTXGRAM_BLESS=1): {stale:?}");
}

#[test]
fn every_grammar_validates() {
    for raw in RAW {
        let e = load_unchecked(raw).unwrap();
        let d = validate(&e.grammar);
        assert!(!has_errors(&d), "{}: {d:?}", raw.id);
    }
}

#[test]
fn grammars_round_trip() {
    for raw in RAW {
        let e = load_unchecked(raw).unwrap();
        let text = ctxgram::pretty_print(&e.grammar);
        let back = ctxgram::parse_grammar(&text).unwrap();
        assert_eq!(back, e.grammar, "{}", raw.id);
    }
}

#[test]
fn known_languages() {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    assert_eq!(corpus::load("ex1-abca").unwrap().lang, s(&["abca"]));
    assert_eq!(corpus::load("ex-s5-cycle").unwrap().lang, s(&["ab"]));
    assert_eq!(corpus::load("ex-s4-cf").unwrap().lang, s(&["a", "d", "ab", "ac", "bd", "cd", "abc", "bcd"]));
    assert_eq!(corpus::load("ex-s4-twosided").unwrap().lang, s(&["ac", "bd", "abc", "bcd"]));
    let ex2 = corpus::load("ex2-decl").unwrap();
    assert!(ex2.is_accepted("acbc"));
    assert!(ex2.is_accepted("bcac"));
    assert!(!ex2.is_accepted("bbcac"));
    assert!(ex2.inputs().contains(&"bbcac".to_string()));
    let ex3 = corpus::load("ex3-proto").unwrap();
    assert!(ex3.is_accepted("acdc"));
    assert!(!ex3.is_accepted("ac"));
    let uv = corpus::load("uv-gadget").unwrap();
    assert!(uv.lang.iter().all(|w| w.starts_with('b')));
    assert_eq!(uv.lang.len(), 1 + 2 + 4 + 8 + 16);
}

#[test]
fn unknown_and_stale_entries() {
    assert!(matches!(corpus::load("no-such-entry"), Err(corpus::CorpusError::Unknown(_))));
    let raw = corpus::resolve("ex1").unwrap();
    let mut copy = *raw;
    copy.grammar = "S -> a;";
    assert_ne!(grammar_sha256(copy.grammar), grammar_sha256(raw.grammar));
}
