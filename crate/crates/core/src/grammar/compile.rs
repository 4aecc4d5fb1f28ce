//! AST-to-transducer compilation.
//!
//! Literals compile to identity acceptors; inside a cross, only the
//! relevant tape of each operand survives. Variable references resolve to
//! earlier definitions (memoized) or to registered builtins such as the
//! number verbalizers.

use std::collections::{HashMap, HashSet};

use crate::fst::{
    concat, cross_fst, literal, optional, rmepsilon_optimize, star, union_all, Fst,
};

use super::{build_number_fst, Expr, GrammarAst, GrammarError, NumberSpec, ReadingMode};

/// Compile `root` (and everything it references) to a transducer.
pub fn compile(ast: &GrammarAst, root: &str) -> Result<Fst, GrammarError> {
    compile_with_builtins(ast, root, &HashMap::new())
}

/// Compile with extra predefined names bound to existing transducers.
pub fn compile_with_builtins(
    ast: &GrammarAst,
    root: &str,
    builtins: &HashMap<String, Fst>,
) -> Result<Fst, GrammarError> {
    let expr = ast
        .get(root)
        .ok_or_else(|| GrammarError::UnknownRoot { name: root.to_string() })?;
    let mut ctx = Ctx { ast, builtins, compiled: HashMap::new() };
    Ok(ctx.eval(expr)?.connect())
}

struct Ctx<'a> {
    ast: &'a GrammarAst,
    builtins: &'a HashMap<String, Fst>,
    compiled: HashMap<String, Fst>,
}

impl<'a> Ctx<'a> {
    fn eval(&mut self, expr: &Expr) -> Result<Fst, GrammarError> {
        Ok(match expr {
            Expr::Literal(s) => literal(s),
            Expr::Placeholder(key) => {
                return Err(GrammarError::UnboundPlaceholder { key: key.clone() })
            }
            Expr::Var(name) => self.resolve(name)?,
            Expr::Union(parts) => {
                let fsts: Vec<Fst> =
                    parts.iter().map(|p| self.eval(p)).collect::<Result<_, _>>()?;
                union_all(&fsts.iter().collect::<Vec<_>>())
            }
            Expr::Concat(parts) => {
                let mut it = parts.iter();
                let mut acc = self.eval(it.next().expect("concat is nonempty"))?;
                for p in it {
                    acc = concat(&acc, &self.eval(p)?);
                }
                acc
            }
            Expr::Optional(inner) => optional(&self.eval(inner)?),
            Expr::Star(inner) => star(&self.eval(inner)?),
            Expr::Cross(a, b) => cross_fst(&self.eval(a)?, &self.eval(b)?),
            Expr::Optimize(inner) => rmepsilon_optimize(&self.eval(inner)?),
        })
    }

    fn resolve(&mut self, name: &str) -> Result<Fst, GrammarError> {
        if let Some(f) = self.compiled.get(name) {
            return Ok(f.clone());
        }
        if let Some(f) = self.builtins.get(name) {
            return Ok(f.clone());
        }
        let expr = self
            .ast
            .get(name)
            .ok_or_else(|| GrammarError::UnknownRoot { name: name.to_string() })?
            .clone();
        let f = self.eval(&expr)?;
        self.compiled.insert(name.to_string(), f.clone());
        Ok(f)
    }
}

/// The names the number verbalizer exports to grammars.
pub fn builtin_names() -> HashSet<String> {
    ["num_cardinal", "num_ordinal", "num_digits", "num_paired", "num_hundreds", "num_digit"]
        .into_iter()
        .map(str::to_string)
        .collect()
}

/// Build the builtin bindings from a number spec. Modes enabled in the spec
/// do not matter here; each builtin selects its own mode.
pub fn number_builtins(spec: &NumberSpec, max_digits: usize) -> HashMap<String, Fst> {
    let mut map = HashMap::new();
    map.insert(
        "num_cardinal".to_string(),
        build_number_fst(&spec.with_modes(&[ReadingMode::Cardinal]), max_digits),
    );
    map.insert(
        "num_ordinal".to_string(),
        build_number_fst(&spec.with_modes(&[ReadingMode::Ordinal]), max_digits),
    );
    map.insert(
        "num_digits".to_string(),
        build_number_fst(&spec.with_modes(&[ReadingMode::DigitByDigit]), max_digits),
    );
    map.insert(
        "num_paired".to_string(),
        build_number_fst(&spec.with_modes(&[ReadingMode::Paired]), max_digits),
    );
    map.insert(
        "num_hundreds".to_string(),
        build_number_fst(&spec.with_modes(&[ReadingMode::Hundreds]), max_digits),
    );
    map.insert(
        "num_digit".to_string(),
        build_number_fst(&spec.with_modes(&[ReadingMode::DigitByDigit]), 1),
    );
    map
}
