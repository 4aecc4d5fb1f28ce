//! The grammar language and its compiler.
//!
//! Grammars are lists of `name = expr;` statements. Expressions combine
//! string literals, references to earlier definitions, `@@PLACEHOLDER@@`
//! lexicon slots, union `|`, juxtaposition (concatenation), postfix `?` and
//! `*`, the cross operator `:`, grouping, and an `Optimize[...]` wrapper.
//! Placeholders are bound from a [`Lexicon`] before compilation; digit
//! readings come from a built-in number verbalizer parameterized by a
//! [`NumberSpec`] and exposed to grammars as predefined names
//! (`num_cardinal`, `num_ordinal`, `num_digits`, `num_paired`,
//! `num_hundreds`, `num_digit`).

use thiserror::Error;

mod compile;
mod lexicon;
mod number;
mod parser;

pub use compile::{builtin_names, compile, compile_with_builtins, number_builtins};
pub use lexicon::{bind_lexicon, Lexicon};
pub use number::{build_number_fst, NumberSpec, ReadingMode};
pub use parser::{parse_grammar, parse_grammar_with_builtins};

#[derive(Debug, Error)]
pub enum GrammarError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("undefined variable `{name}` at line {line}, column {col}")]
    UndefinedVariable { name: String, line: usize, col: usize },
    #[error("duplicate definition of `{name}` at line {line}")]
    DuplicateDefinition { name: String, line: usize },
    #[error("lexicon has no entry for placeholder `{key}`")]
    MissingLexiconKey { key: String },
    #[error("unbound placeholder `{key}` reached the compiler")]
    UnboundPlaceholder { key: String },
    #[error("unknown root definition `{name}`")]
    UnknownRoot { name: String },
    #[error("malformed lexicon at line {line}: {msg}")]
    LexiconFormat { line: usize, msg: String },
    #[error("malformed number table at line {line}: {msg}")]
    NumberFormat { line: usize, msg: String },
}

/// One grammar expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Literal(String),
    Var(String),
    Placeholder(String),
    Union(Vec<Expr>),
    Concat(Vec<Expr>),
    Optional(Box<Expr>),
    Star(Box<Expr>),
    Cross(Box<Expr>, Box<Expr>),
    Optimize(Box<Expr>),
}

/// A parsed grammar: ordered `name = expr` definitions. References always
/// point at earlier definitions (or registered builtins), so compilation
/// never needs cycle detection.
#[derive(Debug, Clone, Default)]
pub struct GrammarAst {
    pub definitions: Vec<(String, Expr)>,
}

impl GrammarAst {
    pub fn get(&self, name: &str) -> Option<&Expr> {
        self.definitions
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| e)
    }

    /// Name of the last definition; the default compilation root.
    pub fn last_name(&self) -> Option<&str> {
        self.definitions.last().map(|(n, _)| n.as_str())
    }
}
