use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctxgram")).args(args).env("CTXGRAM_COLOR", "0").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ctxgram-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn check_exit_codes() {
    assert_eq!(code(&run(&["check", "ex1"])), 0);
    let bad = scratch("undeclared.2cg", "S -> Z;\n");
    let o = run(&["check", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("error"));
    assert_eq!(code(&run(&["check", "missing/file.2cg"])), 2);
    assert_eq!(code(&run(&["check", "no-such-entry"])), 2);
    let warn = scratch("unproductive.2cg", "nonterminals A; S -> A | s;\n");
    let o = run(&["check", warn.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("warning: unproductive nonterminal A"));
}

#[test]
fn check_json() {
    let o = run(&["check", "ex1-abca", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["diagnostics"], serde_json::json!([]));
}

#[test]
fn parse_accept_reject() {
    let o = run(&["parse", "ex1", "--input", "abca"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "accept\n");
    assert_eq!(code(&run(&["parse", "ex1", "--input", "abcb"])), 1);
    assert_eq!(code(&run(&["parse", "ex1", "--input", "abca", "--oracle"])), 0);
    assert_eq!(code(&run(&["parse", "ex1", "--input", "abcd"])), 1);
}

#[test]
fn parse_compare() {
    let o = run(&["parse", "ex1", "--input", "abca", "--compare"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("oracle: accept, parser: accept"));
    let o = run(&["parse", "ex2", "--input", "bbcac", "--compare", "--format", "json"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["agree"], true);
}

#[test]
fn empty_input_needs_the_oracle() {
    let o = run(&["parse", "ex1", "--input", ""]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--oracle"));
    assert_eq!(code(&run(&["parse", "ex2", "--input", "", "--oracle"])), 0);
    assert_eq!(code(&run(&["parse", "ex1", "--input", "", "--oracle"])), 1);
}

#[test]
fn input_from_file() {
    let p = scratch("input.txt", "abca\n");
    let arg = format!("@{}", p.display());
    assert_eq!(code(&run(&["parse", "ex1", "--input", &arg])), 0);
    assert_eq!(code(&run(&["parse", "ex1", "--input", "@/no/such/input"])), 2);
}

#[test]
fn tables_and_proofs() {
    let o = run(&["parse", "ex-s5-cycle", "--input", "ab", "--table", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["table"]["cells"][0]["nts"], serde_json::json!(["A", "C"]));
    assert_eq!(v["table"]["n"], 2);

    let o = run(&["parse", "ex1", "--input", "abca", "--proof"]);
    assert!(stdout(&o).contains("B(a<b>ca)  [B -> b & <(A)]"));
    let o = run(&["parse", "ex1", "--input", "abca", "--proof", "--oracle", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["proof"].is_object());
    let o = run(&["parse", "ex1", "--input", "abca", "--proof", "--format", "dot"]);
    assert!(stdout(&o).starts_with("digraph proof {"));
    assert_eq!(code(&run(&["parse", "ex1", "--input", "abca", "--format", "dot"])), 2);
}

#[test]
fn normalize_outputs() {
    let out = scratch("nf.2cg", "");
    let o = run(&["normalize", "ex1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("normal-form"));
    let nf = std::fs::read_to_string(&out).unwrap();
    assert!(nf.starts_with("pragma generated;"));
    assert_eq!(code(&run(&["check", out.to_str().unwrap()])), 0);
    let o = run(&["parse", out.to_str().unwrap(), "--input", "abca"]);
    assert_eq!(code(&o), 0);

    let eps = scratch("eps.2cg", "alphabet a;\nS -> eps;\n");
    let o = run(&["normalize", eps.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("warning: the normal form has no rules"));
    assert!(stderr(&o).contains("empty string is in the language"));

    let o = run(&["normalize", "ex-s4-twosided", "--format", "json", "--nullable"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["grammar"]["rules"].is_array());
    assert_eq!(v["stages"].as_array().unwrap().len(), 6);
    assert!(v["nullable"].as_array().unwrap().iter().any(|t| t["A"] == "A" && t["U"] == serde_json::json!(["D"])));
}

#[test]
fn enumerate_languages() {
    assert_eq!(stdout(&run(&["enumerate", "ex1", "--max-len", "6"])), "abca\n");
    assert_eq!(stdout(&run(&["enumerate", "ex-s5-cycle", "--max-len", "4"])), "ab\n");
    assert_eq!(stdout(&run(&["enumerate", "ex2", "--max-len", "0"])), "\n");
    assert_eq!(stdout(&run(&["enumerate", "ex1", "--max-len", "0"])), "");
    let o = run(&["enumerate", "ex-s4-cf", "--max-len", "4", "--format", "json"]);
    let v: Vec<String> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v, ["a", "d", "ab", "ac", "bd", "cd", "abc", "bcd"]);
}

#[test]
fn nullable_sets() {
    let o = run(&["nullable", "ex-s4-cf"]);
    assert_eq!(code(&o), 0);
    for t in ["({}, A, {})", "({}, B, {})", "({}, C, {})"] {
        assert!(stdout(&o).contains(t), "{}", stdout(&o));
    }
    let o = run(&["nullable", "ex-s4-twosided", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["left"].as_array().unwrap().iter().any(|e| e["A"] == "C" && e["V"] == serde_json::json!(["E"])));
    assert!(v["right"].as_array().unwrap().iter().any(|e| e["A"] == "B" && e["U"] == serde_json::json!(["D"])));
}

#[test]
fn colour_switch() {
    let bad = scratch("colour.2cg", "S -> Z;\n");
    let o = Command::new(env!("CARGO_BIN_EXE_ctxgram"))
        .args(["check", bad.to_str().unwrap()])
        .env("CTXGRAM_COLOR", "1")
        .output()
        .unwrap();
    assert!(stderr(&o).contains("\x1b[31m"));
    assert!(!stderr(&run(&["check", bad.to_str().unwrap()])).contains('\x1b'));
}
