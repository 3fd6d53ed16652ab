//! Grammars with two-sided contexts: a textual format, a reference
//! recognizer, transformation to binary normal form and a tabular parser.

pub mod corpus;
pub mod deduction;
pub mod diag;
pub mod dsl;
pub mod grammar;
pub mod json;
pub mod normalize;
pub mod oracle;
pub mod parser;
pub mod validate;

pub use deduction::{Item, ProofNode};
pub use diag::{Diagnostic, Diagnostics};
pub use dsl::{parse_grammar, pretty_print};
pub use grammar::{Conjunct, ConjunctKind, Grammar, NtId, Rule, Symbol};
pub use normalize::{to_binary_normal_form, NfGrammar};
pub use oracle::{ItemSet, Oracle};
pub use parser::{ParseTable, Parser};
pub use validate::validate;
