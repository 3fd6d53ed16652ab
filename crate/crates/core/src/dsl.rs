//! Textual grammar format (`.2cg` files).
//!
//! ```text
//! # comment
//! S -> a S | S a | B C;
//! A -> a;
//! B -> b & <(A);
//! C -> c & >(A);
//! start S;
//! ```
//!
//! Nonterminals are identifiers with an uppercase first letter; terminals
//! are single lowercase letters or quoted characters (`'x'`, `'\''`).
//! Conjuncts are separated by `&` and alternatives by `|`. The context
//! operators are `<(..)`, `<=(..)`, `>=(..)` and `>(..)`; `eps` is the
//! empty string. Statements:
//!
//! * `start S;` selects the start symbol (default: first rule head);
//! * `alphabet a b 'c';` fixes the alphabet (default: terminals used);
//! * `nonterminals A B;` declares nonterminals that have no rules;
//! * `pragma generated;` admits `_`-prefixed names, which are otherwise
//!   reserved for nonterminals invented by the normal-form pipeline.
//!
//! `<(eps)` and `>(eps)` become the rule's edge flags; `<=(eps)` becomes
//! the left flag plus an empty base conjunct, `>=(eps)` symmetrically.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::diag::{Diagnostic, Diagnostics, Pos};
use crate::grammar::{terminal_token, Conjunct, ConjunctKind, Grammar, NtId, Rule, Symbol, RESERVED_PREFIX};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Term(char),
    Eps,
    Arrow,
    Bar,
    Amp,
    Semi,
    LParen,
    RParen,
    Op(ConjunctKind),
    Keyword(&'static str),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Term(c) => format!("terminal {}", terminal_token(*c)),
            Tok::Eps => "`eps`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Semi => "`;`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Op(k) => format!("`{}`", k.operator()),
            Tok::Keyword(k) => format!("`{k}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

const KEYWORDS: [&str; 5] = ["start", "alphabet", "nonterminals", "pragma", "generated"];

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, Diagnostic> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut k, mut line, mut col) = (0usize, 1usize, 1usize);
    while k < chars.len() {
        let c = chars[k];
        let pos = Pos { line, col };
        let advance = |n: usize, k: &mut usize, col: &mut usize| {
            *k += n;
            *col += n;
        };
        match c {
            '\n' => {
                k += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut k, &mut col),
            '#' => {
                while k < chars.len() && chars[k] != '\n' {
                    k += 1;
                }
            }
            '-' if chars.get(k + 1) == Some(&'>') => {
                out.push((Tok::Arrow, pos));
                advance(2, &mut k, &mut col);
            }
            '|' => {
                out.push((Tok::Bar, pos));
                advance(1, &mut k, &mut col);
            }
            '&' => {
                out.push((Tok::Amp, pos));
                advance(1, &mut k, &mut col);
            }
            ';' => {
                out.push((Tok::Semi, pos));
                advance(1, &mut k, &mut col);
            }
            '(' => {
                out.push((Tok::LParen, pos));
                advance(1, &mut k, &mut col);
            }
            ')' => {
                out.push((Tok::RParen, pos));
                advance(1, &mut k, &mut col);
            }
            '<' | '>' => {
                let ext = chars.get(k + 1) == Some(&'=');
                let kind = match (c, ext) {
                    ('<', false) => ConjunctKind::LeftProper,
                    ('<', true) => ConjunctKind::LeftExtended,
                    ('>', true) => ConjunctKind::RightExtended,
                    _ => ConjunctKind::RightProper,
                };
                out.push((Tok::Op(kind), pos));
                advance(if ext { 2 } else { 1 }, &mut k, &mut col);
            }
            '\'' => {
                let (ch, len) = match (chars.get(k + 1), chars.get(k + 2), chars.get(k + 3)) {
                    (Some('\\'), Some(&e), Some('\'')) if e == '\'' || e == '\\' => (e, 4),
                    (Some(&ch), Some('\''), _) if ch != '\n' && ch != '\\' => (ch, 3),
                    _ => return Err(Diagnostic::error("malformed quoted terminal").at(pos)),
                };
                out.push((Tok::Term(ch), pos));
                advance(len, &mut k, &mut col);
            }
            c if c.is_alphabetic() || c == RESERVED_PREFIX => {
                let begin = k;
                while k < chars.len() && (chars[k].is_alphanumeric() || chars[k] == '_') {
                    k += 1;
                }
                let word: String = chars[begin..k].iter().collect();
                col += k - begin;
                let tok = if word == "eps" {
                    Tok::Eps
                } else if let Some(kw) = KEYWORDS.iter().find(|kw| **kw == word) {
                    Tok::Keyword(kw)
                } else if c.is_uppercase() || c == RESERVED_PREFIX {
                    Tok::Ident(word)
                } else if word.chars().count() == 1 {
                    Tok::Term(c)
                } else {
                    return Err(Diagnostic::error(format!(
                        "`{word}`: terminals are single characters; separate them with spaces"
                    ))
                    .at(pos));
                };
                out.push((tok, pos));
            }
            other => {
                return Err(Diagnostic::error(format!("unexpected character {other:?}")).at(pos));
            }
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

/// One conjunct as written, before symbol resolution.
#[derive(Debug)]
struct RawConjunct {
    kind: ConjunctKind,
    /// `None` for `eps`.
    body: Option<Vec<(RawSym, Pos)>>,
}

#[derive(Debug, Clone)]
enum RawSym {
    Name(String),
    Term(char),
}

#[derive(Debug)]
struct RawRule {
    head: String,
    head_pos: Pos,
    conjuncts: Vec<RawConjunct>,
    pos: Pos,
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    k: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.k].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.k].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.k].clone();
        if self.k + 1 < self.toks.len() {
            self.k += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<Pos, Diagnostic> {
        let (t, p) = self.bump();
        if t == want {
            Ok(p)
        } else {
            Err(Diagnostic::error(format!("expected {}, found {}", want.describe(), t.describe())).at(p))
        }
    }

    fn symbol_list(&mut self) -> Vec<(RawSym, Pos)> {
        let mut out = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Ident(s) => {
                    let (_, p) = self.bump();
                    out.push((RawSym::Name(s), p));
                }
                Tok::Term(c) => {
                    let (_, p) = self.bump();
                    out.push((RawSym::Term(c), p));
                }
                _ => return out,
            }
        }
    }

    /// A conjunct body: `eps` or a non-empty symbol sequence.
    fn body(&mut self) -> Result<Option<Vec<(RawSym, Pos)>>, Diagnostic> {
        if *self.peek() == Tok::Eps {
            self.bump();
            return Ok(None);
        }
        let syms = self.symbol_list();
        if syms.is_empty() {
            let (t, p) = self.bump();
            return Err(Diagnostic::error(format!("expected symbols or `eps`, found {}", t.describe())).at(p));
        }
        Ok(Some(syms))
    }

    fn conjunct(&mut self) -> Result<RawConjunct, Diagnostic> {
        if let Tok::Op(kind) = *self.peek() {
            self.bump();
            self.expect(Tok::LParen)?;
            let body = self.body()?;
            self.expect(Tok::RParen)?;
            Ok(RawConjunct { kind, body })
        } else {
            let body = self.body()?;
            Ok(RawConjunct { kind: ConjunctKind::Base, body })
        }
    }

    /// `conj (& conj)*`; a leading `&` is tolerated so that a missing base
    /// conjunct is reported as such rather than as a syntax error.
    fn alternative(&mut self) -> Result<Vec<RawConjunct>, Diagnostic> {
        let mut out = Vec::new();
        if *self.peek() == Tok::Amp {
            self.bump();
        }
        out.push(self.conjunct()?);
        while *self.peek() == Tok::Amp {
            self.bump();
            out.push(self.conjunct()?);
        }
        Ok(out)
    }

    fn name_list(&mut self) -> Result<Vec<(String, Pos)>, Diagnostic> {
        let mut out = Vec::new();
        while let Tok::Ident(s) = self.peek().clone() {
            let (_, p) = self.bump();
            out.push((s, p));
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Admit `_`-prefixed nonterminal names without `pragma generated;`.
    pub allow_reserved: bool,
}

/// Parses DSL source into a grammar.
pub fn parse_grammar(src: &str) -> Result<Grammar, Diagnostics> {
    parse_grammar_with(src, ParseOptions::default())
}

pub fn parse_grammar_with(src: &str, opts: ParseOptions) -> Result<Grammar, Diagnostics> {
    let toks = lex(src).map_err(|d| Diagnostics(vec![d]))?;
    let mut p = Parser { toks, k: 0 };
    let mut raw_rules: Vec<RawRule> = Vec::new();
    let mut start: Option<(String, Pos)> = None;
    let mut declared_alphabet: Option<BTreeSet<char>> = None;
    let mut declared_nts: Vec<(String, Pos)> = Vec::new();
    let mut allow_reserved = opts.allow_reserved;
    let mut diags = Vec::new();

    let one = |d: Diagnostic| Diagnostics(vec![d]);
    loop {
        let (tok, pos) = p.bump();
        match tok {
            Tok::Eof => break,
            Tok::Keyword("start") => {
                let (t, q) = p.bump();
                match t {
                    Tok::Ident(s) => start = Some((s, q)),
                    t => {
                        return Err(one(Diagnostic::error(format!(
                            "expected a nonterminal after `start`, found {}",
                            t.describe()
                        ))
                        .at(q)))
                    }
                }
                p.expect(Tok::Semi).map_err(one)?;
            }
            Tok::Keyword("alphabet") => {
                let set = declared_alphabet.get_or_insert_with(BTreeSet::new);
                while let Tok::Term(c) = *p.peek() {
                    p.bump();
                    set.insert(c);
                }
                p.expect(Tok::Semi).map_err(one)?;
            }
            Tok::Keyword("nonterminals") => {
                declared_nts.extend(p.name_list().map_err(one)?);
                p.expect(Tok::Semi).map_err(one)?;
            }
            Tok::Keyword("pragma") => {
                let (t, q) = p.bump();
                if t != Tok::Keyword("generated") {
                    return Err(one(Diagnostic::error(format!("unknown pragma {}", t.describe())).at(q)));
                }
                p.expect(Tok::Semi).map_err(one)?;
                allow_reserved = true;
            }
            Tok::Ident(head) => {
                p.expect(Tok::Arrow).map_err(one)?;
                loop {
                    let alt_pos = p.pos();
                    let conjuncts = p.alternative().map_err(one)?;
                    raw_rules.push(RawRule { head: head.clone(), head_pos: pos, conjuncts, pos: alt_pos });
                    if *p.peek() == Tok::Bar {
                        p.bump();
                    } else {
                        break;
                    }
                }
                p.expect(Tok::Semi).map_err(one)?;
            }
            t => {
                return Err(one(
                    Diagnostic::error(format!("expected a rule or a declaration, found {}", t.describe())).at(pos)
                ))
            }
        }
    }

    // Name table: rule heads and declared nonterminals, in order of first
    // appearance.
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, NtId> = HashMap::new();
    let mut declare = |name: &str, pos: Pos, diags: &mut Vec<Diagnostic>| {
        if !allow_reserved && name.starts_with(RESERVED_PREFIX) {
            diags.push(Diagnostic::error(format!("`{name}`: names starting with `_` are reserved")).at(pos));
        }
        if !index.contains_key(name) {
            index.insert(name.to_string(), NtId(names.len() as u32));
            names.push(name.to_string());
        }
    };
    for r in &raw_rules {
        declare(&r.head, r.head_pos, &mut diags);
    }
    for (n, pos) in &declared_nts {
        declare(n, *pos, &mut diags);
    }

    let mut alphabet = declared_alphabet.clone().unwrap_or_default();
    let mut rules = Vec::new();
    for r in &raw_rules {
        let head = index[&r.head];
        let mut rule = Rule::new(head, Vec::new());
        for c in &r.conjuncts {
            match &c.body {
                None => match c.kind {
                    ConjunctKind::Base => rule.conjuncts.push(Conjunct::base(Vec::new())),
                    ConjunctKind::LeftProper => rule.left_edge = true,
                    ConjunctKind::RightProper => rule.right_edge = true,
                    ConjunctKind::LeftExtended => {
                        rule.left_edge = true;
                        rule.conjuncts.push(Conjunct::base(Vec::new()));
                    }
                    ConjunctKind::RightExtended => {
                        rule.right_edge = true;
                        rule.conjuncts.push(Conjunct::base(Vec::new()));
                    }
                },
                Some(syms) => {
                    let mut body = Vec::with_capacity(syms.len());
                    for (s, pos) in syms {
                        match s {
                            RawSym::Term(ch) => {
                                match &declared_alphabet {
                                    Some(set) if !set.contains(ch) => diags.push(
                                        Diagnostic::error(format!(
                                            "unknown symbol {}: not in the declared alphabet",
                                            terminal_token(*ch)
                                        ))
                                        .at(*pos),
                                    ),
                                    _ => {
                                        alphabet.insert(*ch);
                                    }
                                }
                                body.push(Symbol::T(*ch));
                            }
                            RawSym::Name(n) => match index.get(n) {
                                Some(&b) => body.push(Symbol::N(b)),
                                None => {
                                    diags.push(
                                        Diagnostic::error(format!(
                                            "unknown symbol `{n}`: no rules and not declared in `nonterminals`"
                                        ))
                                        .at(*pos),
                                    );
                                }
                            },
                        }
                    }
                    rule.conjuncts.push(Conjunct::new(c.kind, body));
                }
            }
        }
        if !rule.has_base() {
            diags.push(Diagnostic::error(format!("rule has no base conjunct (in a rule for `{}`)", r.head)).at(r.pos));
        }
        rules.push(rule);
    }

    let start = match start {
        Some((s, pos)) => match index.get(&s) {
            Some(&a) => Some(a),
            None => {
                diags.push(
                    Diagnostic::error(format!("missing start declaration: start symbol `{s}` is not defined")).at(pos),
                );
                None
            }
        },
        None => match raw_rules.first() {
            Some(r) => Some(index[&r.head]),
            None => {
                diags.push(Diagnostic::error("missing start declaration: no rules and no `start`"));
                None
            }
        },
    };

    if !diags.is_empty() {
        return Err(Diagnostics(diags));
    }
    Ok(Grammar::new(alphabet, names, rules, start.expect("start resolved")))
}

fn render_body(g: &Grammar, body: &[Symbol]) -> String {
    if body.is_empty() {
        return "eps".into();
    }
    body.iter().map(|&s| g.display_symbol(s)).collect::<Vec<_>>().join(" ")
}

pub fn render_conjunct(g: &Grammar, c: &Conjunct) -> String {
    match c.kind {
        ConjunctKind::Base => render_body(g, &c.body),
        k => format!("{}({})", k.operator(), render_body(g, &c.body)),
    }
}

/// The right-hand side of a rule: its conjuncts in order, then the edge
/// flags as `<(eps)` / `>(eps)`.
pub fn render_rhs(g: &Grammar, r: &Rule) -> String {
    let mut parts: Vec<String> = r.conjuncts.iter().map(|c| render_conjunct(g, c)).collect();
    if r.left_edge {
        parts.push("<(eps)".into());
    }
    if r.right_edge {
        parts.push(">(eps)".into());
    }
    parts.join(" & ")
}

/// `A -> rhs`, without the terminating semicolon.
pub fn render_rule(g: &Grammar, r: &Rule) -> String {
    format!("{} -> {}", g.name(r.head), render_rhs(g, r))
}

/// Renders a grammar as DSL source that parses back to an equal grammar.
pub fn pretty_print(g: &Grammar) -> String {
    let mut out = String::new();
    if g.names().iter().any(|n| n.starts_with(RESERVED_PREFIX)) {
        out.push_str("pragma generated;\n");
    }
    let alpha: Vec<String> = g.alphabet().iter().map(|&c| terminal_token(c)).collect();
    if alpha.is_empty() {
        out.push_str("alphabet;\n");
    } else {
        let _ = writeln!(out, "alphabet {};", alpha.join(" "));
    }
    let _ = writeln!(out, "start {};", g.name(g.start()));
    let mut without_rules = Vec::new();
    for a in g.nonterminals() {
        let alts: Vec<String> = g.rules_for(a).map(|(_, r)| render_rhs(g, r)).collect();
        if alts.is_empty() {
            without_rules.push(g.name(a).to_string());
            continue;
        }
        let _ = writeln!(out, "{} -> {};", g.name(a), alts.join(" | "));
    }
    if !without_rules.is_empty() {
        let _ = writeln!(out, "nonterminals {};", without_rules.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX1: &str = "S -> a S | S a | B C; A -> a; B -> b & <(A); C -> c & >(A);";

    #[test]
    fn example_one_shape() {
        let g = parse_grammar(EX1).unwrap();
        assert_eq!(g.num_nonterminals(), 4);
        assert_eq!(g.rules().len(), 6);
        assert_eq!(g.name(g.start()), "S");
        assert_eq!(g.alphabet().iter().collect::<String>(), "abc");
        let b = g.lookup("B").unwrap();
        let (_, rb) = g.rules_for(b).next().unwrap();
        assert_eq!(rb.conjuncts[1].kind, ConjunctKind::LeftProper);
    }

    #[test]
    fn eps_rule_has_empty_base() {
        let g = parse_grammar("S -> eps;").unwrap();
        assert_eq!(g.rules().len(), 1);
        assert_eq!(g.rules()[0].conjuncts, vec![Conjunct::base(vec![])]);
        assert!(g.alphabet().is_empty());
    }

    #[test]
    fn missing_base_is_reported() {
        let e = parse_grammar("S -> & <(A); A -> a;").unwrap_err();
        assert!(e.messages().any(|m| m.contains("rule has no base conjunct")), "{e}");
        let e = parse_grammar("S -> <(A); A -> a;").unwrap_err();
        assert!(e.messages().any(|m| m.contains("rule has no base conjunct")));
    }

    #[test]
    fn empty_contexts_become_flags() {
        let g = parse_grammar("S -> A B & <(eps) & >(eps); A -> a; B -> b;").unwrap();
        let r = &g.rules()[0];
        assert!(r.left_edge && r.right_edge);
        assert_eq!(r.conjuncts.len(), 1);

        let g = parse_grammar("S -> a & <=(eps);").unwrap();
        let r = &g.rules()[0];
        assert!(r.left_edge && !r.right_edge);
        assert_eq!(r.conjuncts.len(), 2);
        assert!(r.conjuncts[1].body.is_empty());
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_grammar("S -> a Z;\n").unwrap_err();
        assert_eq!(e.0[0].pos, Some(Pos { line: 1, col: 8 }));
        assert!(e.0[0].message.contains("unknown symbol `Z`"));

        let e = parse_grammar("S -> a;\nA -> $;").unwrap_err();
        assert_eq!(e.0[0].pos, Some(Pos { line: 2, col: 6 }));

        let e = parse_grammar("S -> ab;").unwrap_err();
        assert!(e.0[0].message.contains("single characters"));
    }

    #[test]
    fn start_and_declarations() {
        let g = parse_grammar("nonterminals A; S -> A; start S;").unwrap();
        assert_eq!(g.num_nonterminals(), 2);
        assert_eq!(g.rules_for(g.lookup("A").unwrap()).count(), 0);

        let e = parse_grammar("S -> a; start T;").unwrap_err();
        assert!(e.0[0].message.starts_with("missing start declaration"));
        let e = parse_grammar("# nothing\n").unwrap_err();
        assert!(e.0[0].message.starts_with("missing start declaration"));

        let e = parse_grammar("alphabet a; S -> a b;").unwrap_err();
        assert!(e.0[0].message.contains("unknown symbol b"));
    }

    #[test]
    fn reserved_names() {
        assert!(parse_grammar("S -> _X; _X -> a;").is_err());
        assert!(parse_grammar("pragma generated; S -> _X; _X -> a;").is_ok());
        assert!(parse_grammar_with("S -> _X; _X -> a;", ParseOptions { allow_reserved: true }).is_ok());
    }

    #[test]
    fn quoted_terminals() {
        let g = parse_grammar(r"S -> 'X' '\'' '+' a;").unwrap();
        assert_eq!(g.alphabet().iter().collect::<String>(), "'+Xa");
        let again = parse_grammar(&pretty_print(&g)).unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn pretty_print_round_trips() {
        let g = parse_grammar(EX1).unwrap();
        let text = pretty_print(&g);
        assert_eq!(parse_grammar(&text).unwrap(), g);

        let g = parse_grammar("S -> A & <(eps) | B & >(eps) & <=(B); A -> a; B -> b; start S;").unwrap();
        let text = pretty_print(&g);
        assert!(text.contains("<(eps)") && text.contains(">(eps)"));
        assert_eq!(parse_grammar(&text).unwrap(), g);
    }

    #[test]
    fn empty_alphabet_prints_explicitly() {
        let g = parse_grammar("S -> eps;").unwrap();
        let text = pretty_print(&g);
        assert!(text.contains("alphabet;"));
        assert_eq!(parse_grammar(&text).unwrap(), g);
    }
}
