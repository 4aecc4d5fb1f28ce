//! Recursive-descent parser for the grammar language.
//!
//! Operator precedence, loosest to tightest: `|`, juxtaposition, `:`,
//! postfix `?` / `*`. `#` starts a line comment. String literals use double
//! quotes with `\"` and `\\` escapes.

use std::collections::HashSet;

use super::{Expr, GrammarAst, GrammarError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Placeholder(String),
    Str(String),
    Equals,
    Pipe,
    Question,
    Star,
    Colon,
    Semi,
    LParen,
    RParen,
    LBracket,
    RBracket,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(source: &str) -> Result<Vec<Spanned>, GrammarError> {
    let mut toks = Vec::new();
    let mut chars = source.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);

    let syntax = |line: usize, col: usize, msg: &str| GrammarError::Syntax {
        line,
        col,
        msg: msg.to_string(),
    };

    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>, line: &mut usize, col: &mut usize| {
            let c = chars.next().unwrap();
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            c
        };

        match c {
            c if c.is_whitespace() => {
                bump(&mut chars, &mut line, &mut col);
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    bump(&mut chars, &mut line, &mut col);
                    if c == '\n' {
                        break;
                    }
                }
            }
            '"' => {
                bump(&mut chars, &mut line, &mut col);
                let mut s = String::new();
                loop {
                    match chars.peek() {
                        None => return Err(syntax(tline, tcol, "unterminated string literal")),
                        Some('"') => {
                            bump(&mut chars, &mut line, &mut col);
                            break;
                        }
                        Some('\\') => {
                            bump(&mut chars, &mut line, &mut col);
                            match chars.peek() {
                                Some('"') => {
                                    s.push('"');
                                    bump(&mut chars, &mut line, &mut col);
                                }
                                Some('\\') => {
                                    s.push('\\');
                                    bump(&mut chars, &mut line, &mut col);
                                }
                                _ => {
                                    return Err(syntax(line, col, "unknown escape; only \\\" and \\\\ are supported"))
                                }
                            }
                        }
                        Some('\n') => return Err(syntax(tline, tcol, "newline inside string literal")),
                        Some(&c) => {
                            s.push(c);
                            bump(&mut chars, &mut line, &mut col);
                        }
                    }
                }
                toks.push(Spanned { tok: Tok::Str(s), line: tline, col: tcol });
            }
            '@' => {
                bump(&mut chars, &mut line, &mut col);
                if chars.peek() != Some(&'@') {
                    return Err(syntax(tline, tcol, "placeholders start with @@"));
                }
                bump(&mut chars, &mut line, &mut col);
                let mut key = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_' {
                        key.push(c);
                        bump(&mut chars, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                if key.is_empty() {
                    return Err(syntax(tline, tcol, "empty placeholder name"));
                }
                if chars.peek() == Some(&'@') {
                    bump(&mut chars, &mut line, &mut col);
                    if chars.peek() == Some(&'@') {
                        bump(&mut chars, &mut line, &mut col);
                    } else {
                        return Err(syntax(tline, tcol, "placeholders end with @@"));
                    }
                } else {
                    return Err(syntax(tline, tcol, "placeholders end with @@"));
                }
                toks.push(Spanned { tok: Tok::Placeholder(format!("@@{key}@@")), line: tline, col: tcol });
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        name.push(c);
                        bump(&mut chars, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                toks.push(Spanned { tok: Tok::Ident(name), line: tline, col: tcol });
            }
            _ => {
                let c = bump(&mut chars, &mut line, &mut col);
                let tok = match c {
                    '=' => Tok::Equals,
                    '|' => Tok::Pipe,
                    '?' => Tok::Question,
                    '*' => Tok::Star,
                    ':' => Tok::Colon,
                    ';' => Tok::Semi,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    other => return Err(syntax(tline, tcol, &format!("unexpected character `{other}`"))),
                };
                toks.push(Spanned { tok, line: tline, col: tcol });
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    defined: HashSet<String>,
    builtins: &'a HashSet<String>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, msg: &str) -> GrammarError {
        let (line, col) = self
            .peek()
            .map(|s| (s.line, s.col))
            .or_else(|| self.toks.last().map(|s| (s.line, s.col)))
            .unwrap_or((1, 1));
        GrammarError::Syntax { line, col, msg: msg.to_string() }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Spanned, GrammarError> {
        match self.peek() {
            Some(s) if s.tok == tok => Ok(self.next().unwrap()),
            _ => Err(self.err_here(&format!("expected {what}"))),
        }
    }

    fn grammar(&mut self) -> Result<GrammarAst, GrammarError> {
        let mut ast = GrammarAst::default();
        while self.peek().is_some() {
            let (name, line) = match self.next().unwrap() {
                Spanned { tok: Tok::Ident(name), line, .. } => (name, line),
                s => {
                    return Err(GrammarError::Syntax {
                        line: s.line,
                        col: s.col,
                        msg: "expected definition name".to_string(),
                    })
                }
            };
            if self.defined.contains(&name) || self.builtins.contains(&name) {
                return Err(GrammarError::DuplicateDefinition { name, line });
            }
            self.expect(Tok::Equals, "`=`")?;
            let expr = self.alt()?;
            self.expect(Tok::Semi, "`;`")?;
            self.defined.insert(name.clone());
            ast.definitions.push((name, expr));
        }
        Ok(ast)
    }

    fn alt(&mut self) -> Result<Expr, GrammarError> {
        let mut parts = vec![self.cat()?];
        while matches!(self.peek(), Some(Spanned { tok: Tok::Pipe, .. })) {
            self.next();
            parts.push(self.cat()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Expr::Union(parts) })
    }

    fn cat(&mut self) -> Result<Expr, GrammarError> {
        let mut parts = vec![self.cross()?];
        while self.starts_primary() {
            parts.push(self.cross()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Expr::Concat(parts) })
    }

    fn starts_primary(&self) -> bool {
        matches!(
            self.peek(),
            Some(Spanned {
                tok: Tok::Ident(_) | Tok::Placeholder(_) | Tok::Str(_) | Tok::LParen,
                ..
            })
        )
    }

    fn cross(&mut self) -> Result<Expr, GrammarError> {
        let left = self.postfix()?;
        if matches!(self.peek(), Some(Spanned { tok: Tok::Colon, .. })) {
            self.next();
            let right = self.postfix()?;
            Ok(Expr::Cross(Box::new(left), Box::new(right)))
        } else {
            Ok(left)
        }
    }

    fn postfix(&mut self) -> Result<Expr, GrammarError> {
        let mut expr = self.primary()?;
        loop {
            match self.peek() {
                Some(Spanned { tok: Tok::Question, .. }) => {
                    self.next();
                    expr = Expr::Optional(Box::new(expr));
                }
                Some(Spanned { tok: Tok::Star, .. }) => {
                    self.next();
                    expr = Expr::Star(Box::new(expr));
                }
                _ => return Ok(expr),
            }
        }
    }

    fn primary(&mut self) -> Result<Expr, GrammarError> {
        match self.peek().cloned() {
            Some(Spanned { tok: Tok::Str(s), .. }) => {
                self.next();
                Ok(Expr::Literal(s))
            }
            Some(Spanned { tok: Tok::Placeholder(key), .. }) => {
                self.next();
                Ok(Expr::Placeholder(key))
            }
            Some(Spanned { tok: Tok::Ident(name), line, col }) => {
                self.next();
                if name == "Optimize" {
                    self.expect(Tok::LBracket, "`[` after Optimize")?;
                    let inner = self.alt()?;
                    self.expect(Tok::RBracket, "`]`")?;
                    return Ok(Expr::Optimize(Box::new(inner)));
                }
                if !self.defined.contains(&name) && !self.builtins.contains(&name) {
                    return Err(GrammarError::UndefinedVariable { name, line, col });
                }
                Ok(Expr::Var(name))
            }
            Some(Spanned { tok: Tok::LParen, .. }) => {
                self.next();
                let inner = self.alt()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.err_here("expected an expression")),
        }
    }
}

/// Parse a grammar. Variable references must resolve to earlier definitions.
pub fn parse_grammar(source: &str) -> Result<GrammarAst, GrammarError> {
    parse_grammar_with_builtins(source, &HashSet::new())
}

/// Parse a grammar where `builtins` names (the number verbalizers, for
/// example) count as already defined.
pub fn parse_grammar_with_builtins(
    source: &str,
    builtins: &HashSet<String>,
) -> Result<GrammarAst, GrammarError> {
    let toks = lex(source)?;
    let mut parser = Parser { toks, pos: 0, defined: HashSet::new(), builtins };
    parser.grammar()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TIME_FRAGMENT: &str = r#"
period = @@TIME_AM@@ | @@TIME_PM@@;
space = " " | ("" : " ");
time = Optimize[(period space)? time_variants |
                time_variants (space period)?];
"#;

    #[test]
    fn time_fragment_parses_into_three_definitions() {
        // `time_variants` must exist before use.
        let source = format!("time_variants = \"3:30\" : \"three thirty\";\n{TIME_FRAGMENT}");
        let ast = parse_grammar(&source).unwrap();
        assert_eq!(ast.definitions.len(), 4);
        assert_eq!(ast.definitions[1].0, "period");
        assert!(matches!(ast.definitions[1].1, Expr::Union(ref parts) if parts.len() == 2));
        assert_eq!(ast.definitions[2].0, "space");
        assert!(matches!(ast.definitions[3].1, Expr::Optimize(_)));
        assert_eq!(ast.last_name(), Some("time"));
    }

    #[test]
    fn cross_of_literals() {
        let ast = parse_grammar(r#"x = "a" : "b";"#).unwrap();
        assert_eq!(
            ast.get("x"),
            Some(&Expr::Cross(
                Box::new(Expr::Literal("a".into())),
                Box::new(Expr::Literal("b".into()))
            ))
        );
    }

    #[test]
    fn forward_reference_is_undefined() {
        let err = parse_grammar("x = y;").unwrap_err();
        assert!(matches!(err, GrammarError::UndefinedVariable { ref name, .. } if name == "y"));
    }

    #[test]
    fn duplicate_definition_rejected() {
        let err = parse_grammar("x = \"a\";\nx = \"b\";").unwrap_err();
        assert!(matches!(err, GrammarError::DuplicateDefinition { ref name, line } if name == "x" && line == 2));
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_grammar("x = ;").unwrap_err();
        match err {
            GrammarError::Syntax { line, col, .. } => {
                assert_eq!(line, 1);
                assert_eq!(col, 5);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn escapes_in_literals() {
        let ast = parse_grammar(r#"x = "a\"b\\c";"#).unwrap();
        assert_eq!(ast.get("x"), Some(&Expr::Literal("a\"b\\c".into())));
    }

    #[test]
    fn comments_are_skipped() {
        let ast = parse_grammar("# header\nx = \"a\"; # trailing\n").unwrap();
        assert_eq!(ast.definitions.len(), 1);
    }

    #[test]
    fn builtins_count_as_defined() {
        let builtins: HashSet<String> = ["num_cardinal".to_string()].into_iter().collect();
        assert!(parse_grammar("x = num_cardinal;").is_err());
        assert!(parse_grammar_with_builtins("x = num_cardinal;", &builtins).is_ok());
    }

    #[test]
    fn precedence_cross_binds_tighter_than_concat() {
        let ast = parse_grammar(r#"x = "a" : "b" "c";"#).unwrap();
        match ast.get("x").unwrap() {
            Expr::Concat(parts) => {
                assert_eq!(parts.len(), 2);
                assert!(matches!(parts[0], Expr::Cross(_, _)));
                assert_eq!(parts[1], Expr::Literal("c".into()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
