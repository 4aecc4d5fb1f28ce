//! Lexical maps: `@@KEY@@` placeholders to spoken expansions.
//!
//! File format is TSV, one expansion per line, repeated keys allowed (the
//! expansions union):
//!
//! ```text
//! @@MINUS@@<TAB>minus
//! @@PLUS@@<TAB>plus
//! @@PLUS@@<TAB>and
//! ```

use super::{Expr, GrammarAst, GrammarError};

/// An ordered placeholder-to-expansion map.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: Vec<(String, String)>,
}

impl Lexicon {
    pub fn new() -> Self {
        Lexicon::default()
    }

    pub fn add(&mut self, key: &str, expansion: &str) {
        debug_assert!(is_valid_key(key), "bad placeholder key {key}");
        debug_assert!(!expansion.is_empty());
        self.entries.push((key.to_string(), expansion.to_string()));
    }

    /// All expansions for `key`, in file order.
    pub fn expansions(&self, key: &str) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|(k, _)| k == key)
            .map(|(_, e)| e.as_str())
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn parse(text: &str) -> Result<Lexicon, GrammarError> {
        let mut lex = Lexicon::new();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, expansion)) = line.split_once('\t') else {
                return Err(GrammarError::LexiconFormat {
                    line: lineno,
                    msg: "expected `@@KEY@@<TAB>expansion`".to_string(),
                });
            };
            if !is_valid_key(key) {
                return Err(GrammarError::LexiconFormat {
                    line: lineno,
                    msg: format!("invalid placeholder key `{key}`"),
                });
            }
            if expansion.is_empty() {
                return Err(GrammarError::LexiconFormat {
                    line: lineno,
                    msg: "empty expansion".to_string(),
                });
            }
            lex.entries.push((key.to_string(), expansion.to_string()));
        }
        Ok(lex)
    }
}

fn is_valid_key(key: &str) -> bool {
    key.len() > 4
        && key.starts_with("@@")
        && key.ends_with("@@")
        && key[2..key.len() - 2]
            .chars()
            .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

/// Replace every placeholder node with the union of its expansion literals.
/// Nothing else changes; a grammar without placeholders is returned as-is.
pub fn bind_lexicon(ast: &GrammarAst, lex: &Lexicon) -> Result<GrammarAst, GrammarError> {
    let mut out = GrammarAst::default();
    for (name, expr) in &ast.definitions {
        out.definitions.push((name.clone(), bind_expr(expr, lex)?));
    }
    Ok(out)
}

fn bind_expr(expr: &Expr, lex: &Lexicon) -> Result<Expr, GrammarError> {
    Ok(match expr {
        Expr::Placeholder(key) => {
            let expansions = lex.expansions(key);
            if expansions.is_empty() {
                return Err(GrammarError::MissingLexiconKey { key: key.clone() });
            }
            if expansions.len() == 1 {
                Expr::Literal(expansions[0].to_string())
            } else {
                Expr::Union(expansions.iter().map(|e| Expr::Literal(e.to_string())).collect())
            }
        }
        Expr::Literal(_) | Expr::Var(_) => expr.clone(),
        Expr::Union(parts) => {
            Expr::Union(parts.iter().map(|p| bind_expr(p, lex)).collect::<Result<_, _>>()?)
        }
        Expr::Concat(parts) => {
            Expr::Concat(parts.iter().map(|p| bind_expr(p, lex)).collect::<Result<_, _>>()?)
        }
        Expr::Optional(inner) => Expr::Optional(Box::new(bind_expr(inner, lex)?)),
        Expr::Star(inner) => Expr::Star(Box::new(bind_expr(inner, lex)?)),
        Expr::Cross(a, b) => {
            Expr::Cross(Box::new(bind_expr(a, lex)?), Box::new(bind_expr(b, lex)?))
        }
        Expr::Optimize(inner) => Expr::Optimize(Box::new(bind_expr(inner, lex)?)),
    })
}
