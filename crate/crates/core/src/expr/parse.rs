//! Text DSL for expressions.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := unary (('*'|'/') unary)*
//! unary  := '-' unary | power
//! power  := atom ['^' exponent]
//! exponent := ['-'] integer | '(' ['-'] integer ['/' integer] ')'
//! atom   := number | symbol | jet | I | call | '(' expr ')'
//! jet    := depvar '_' suffix          (u_xxz)
//! call   := name ['[' counts ']'] '(' expr (',' expr)* ')'
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Pow, Zero};

use super::{Elementary, Expr, JetVar, MultiIndex, Symbol, SymbolKind};
use crate::{Exponent, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at {}:{}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

/// Declarations the parser needs: dependent variables with their independent
/// variables, names of unknown functions, and which bare names are
/// independent variables (everything else is a parameter).
#[derive(Clone, Debug)]
pub struct ParseContext {
    deps: BTreeMap<String, (Symbol, Arc<[Symbol]>)>,
    functions: BTreeSet<String>,
    independents: BTreeSet<String>,
}

impl Default for ParseContext {
    /// `u(x, y, z, t)`, no unknown functions.
    fn default() -> Self {
        ParseContext::empty().with_dep("u", &["x", "y", "z", "t"])
    }
}

impl ParseContext {
    pub fn empty() -> Self {
        ParseContext { deps: BTreeMap::new(), functions: BTreeSet::new(), independents: BTreeSet::new() }
    }

    pub fn with_dep(mut self, dep: &str, vars: &[&str]) -> Self {
        let syms: Arc<[Symbol]> = vars.iter().map(|v| Symbol::var(v)).collect();
        for v in vars {
            self.independents.insert(v.to_string());
        }
        self.deps.insert(dep.to_string(), (Symbol::new(dep, SymbolKind::Independent), syms));
        self
    }

    pub fn with_functions(mut self, names: &[&str]) -> Self {
        self.functions.extend(names.iter().map(|s| s.to_string()));
        self
    }

    pub fn with_independents(mut self, names: &[&str]) -> Self {
        self.independents.extend(names.iter().map(|s| s.to_string()));
        self
    }

    pub fn dep(&self, name: &str) -> Option<(&Symbol, &Arc<[Symbol]>)> {
        self.deps.get(name).map(|(s, v)| (s, v))
    }

    pub fn deps(&self) -> impl Iterator<Item = (&Symbol, &Arc<[Symbol]>)> {
        self.deps.values().map(|(s, v)| (s, v))
    }

    pub fn is_function(&self, name: &str) -> bool {
        self.functions.contains(name)
    }

    pub fn symbol(&self, name: &str) -> Symbol {
        if self.independents.contains(name) {
            Symbol::var(name)
        } else {
            Symbol::param(name)
        }
    }

    /// Split a jet suffix into derivative counts, longest variable name first.
    pub fn jet(&self, dep: &str, suffix: &str) -> Option<JetVar> {
        let (d, vars) = self.dep(dep)?;
        let mut index = MultiIndex::zero(vars.len());
        let mut rest = suffix;
        while !rest.is_empty() {
            let mut best: Option<(usize, usize)> = None;
            for (i, v) in vars.iter().enumerate() {
                let n = v.name().len();
                if rest.starts_with(v.name()) && best.map_or(true, |(_, m)| n > m) {
                    best = Some((i, n));
                }
            }
            let (i, n) = best?;
            index = index.bumped(i);
            rest = &rest[n..];
        }
        Some(JetVar::new(d.clone(), vars.clone(), index))
    }
}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    parse_with(src, &ParseContext::default())
}

pub fn parse_with(src: &str, ctx: &ParseContext) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, ctx, src };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.error("unexpected trailing input", &["end of input", "operator"]));
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Jet(String, String),
    Op(char),
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    offset: usize,
}

fn position(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

fn lex_error(src: &str, offset: usize, msg: &str, expected: &[&str]) -> ParseError {
    let (line, column) = position(src, offset);
    ParseError { line, column, message: msg.into(), expected: expected.iter().map(|s| s.to_string()).collect() }
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let b = src.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == '.' && i + 1 < b.len() && b[i + 1].is_ascii_digit()) {
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            let int_part = &src[start..i];
            let mut frac_part = "";
            if i < b.len() && b[i] == b'.' {
                i += 1;
                let fs = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                frac_part = &src[fs..i];
            }
            let mut exp10: i64 = 0;
            if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                let mut j = i + 1;
                if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                    j += 1;
                }
                let ds = j;
                while j < b.len() && b[j].is_ascii_digit() {
                    j += 1;
                }
                if j > ds {
                    exp10 = src[i + 1..j].parse().map_err(|_| lex_error(src, i, "bad exponent", &["digits"]))?;
                    i = j;
                }
            }
            let digits = format!("{int_part}{frac_part}");
            let digits = if digits.is_empty() { "0".to_string() } else { digits };
            let n: BigInt = digits.parse().map_err(|_| lex_error(src, start, "bad number", &["digits"]))?;
            let scale = exp10 - frac_part.len() as i64;
            let ten = BigInt::from(10);
            let v = if scale >= 0 {
                Rational::from_integer(n * Pow::pow(&ten, scale as u64))
            } else {
                Rational::new(n, Pow::pow(&ten, (-scale) as u64))
            };
            out.push(Spanned { tok: Tok::Num(v), offset: start });
            continue;
        }
        if c.is_ascii_alphabetic() {
            while i < b.len() && b[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let name = src[start..i].to_string();
            if i < b.len() && b[i] == b'_' {
                i += 1;
                let ss = i;
                while i < b.len() && b[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                if i == ss {
                    return Err(lex_error(src, i, "empty derivative suffix", &["variable name"]));
                }
                out.push(Spanned { tok: Tok::Jet(name, src[ss..i].to_string()), offset: start });
            } else {
                out.push(Spanned { tok: Tok::Ident(name), offset: start });
            }
            continue;
        }
        if "+-*/^(),[]".contains(c) {
            out.push(Spanned { tok: Tok::Op(c), offset: start });
            i += 1;
            continue;
        }
        return Err(lex_error(src, start, &format!("unexpected character `{c}`"), &[]));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    ctx: &'a ParseContext,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: &str, expected: &[&str]) -> ParseError {
        let offset = self.toks.get(self.pos).map_or(self.src.len(), |t| t.offset);
        lex_error(self.src, offset, msg, expected)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_op(&self, c: char) -> bool {
        self.peek() == Some(&Tok::Op(c))
    }

    fn expect_op(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek_op(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error("unexpected token", &[&format!("`{c}`")]))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = Vec::new();
        let mut neg = false;
        if self.peek_op('+') {
            self.pos += 1;
        } else if self.peek_op('-') {
            self.pos += 1;
            neg = true;
        }
        loop {
            let t = self.term()?;
            terms.push(if neg { -t } else { t });
            if self.peek_op('+') {
                neg = false;
            } else if self.peek_op('-') {
                neg = true;
            } else {
                break;
            }
            self.pos += 1;
        }
        Ok(Expr::add_all(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.unary()?];
        loop {
            if self.peek_op('*') {
                self.pos += 1;
                factors.push(self.unary()?);
            } else if self.peek_op('/') {
                self.pos += 1;
                let d = self.unary()?;
                if d.is_zero() {
                    return Err(self.error("division by literal zero", &[]));
                }
                factors.push(d.recip());
            } else {
                break;
            }
        }
        Ok(Expr::mul_all(factors))
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek_op('-') {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        if self.peek_op('+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.peek_op('^') {
            return Ok(base);
        }
        self.pos += 1;
        let e = self.exponent()?;
        if base.is_zero() && e < Exponent::zero() {
            return Err(self.error("zero to a negative power", &[]));
        }
        Ok(base.pow(e))
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) if n.is_integer() => {
                self.pos += 1;
                i64::try_from(n.to_integer()).map_err(|_| self.error("exponent too large", &[]))
            }
            _ => Err(self.error("unexpected token in exponent", &["integer"])),
        }
    }

    fn exponent(&mut self) -> Result<Exponent, ParseError> {
        if self.peek_op('(') {
            self.pos += 1;
            let neg = if self.peek_op('-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let p = self.integer()?;
            let q = if self.peek_op('/') {
                self.pos += 1;
                self.integer()?
            } else {
                1
            };
            if q == 0 {
                return Err(self.error("zero exponent denominator", &[]));
            }
            self.expect_op(')')?;
            Ok(Exponent::new(if neg { -p } else { p }, q))
        } else {
            let neg = if self.peek_op('-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let p = self.integer()?;
            Ok(Exponent::from_integer(if neg { -p } else { p }))
        }
    }

    fn args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect_op('(')?;
        let mut args = vec![self.expr()?];
        while self.peek_op(',') {
            self.pos += 1;
            args.push(self.expr()?);
        }
        self.expect_op(')')?;
        Ok(args)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error("unexpected end of input", &["number", "name", "`(`"]));
        };
        match tok {
            Tok::Num(n) => {
                self.pos += 1;
                Ok(Expr::num(n))
            }
            Tok::Op('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            Tok::Jet(dep, suffix) => {
                let Some(j) = self.ctx.jet(&dep, &suffix) else {
                    let msg = if self.ctx.dep(&dep).is_none() {
                        format!("`{dep}` is not a dependent variable")
                    } else {
                        format!("cannot split derivative suffix `{suffix}`")
                    };
                    return Err(self.error(&msg, &["jet variable"]));
                };
                self.pos += 1;
                Ok(Expr::jet(j))
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if name == "I" {
                    return Ok(Expr::imag());
                }
                let is_call = self.peek_op('(') || self.peek_op('[');
                if name == "sqrt" && is_call {
                    let a = self.single_arg("sqrt")?;
                    return Ok(Expr::sqrt(a));
                }
                if let Some(f) = Elementary::from_name(&name) {
                    if is_call {
                        let a = self.single_arg(&name)?;
                        return Ok(match f {
                            Elementary::Exp => Expr::exp(a),
                            _ => Expr::elem(f, a),
                        });
                    }
                }
                if self.ctx.is_function(&name) {
                    let mut deriv = None;
                    if self.peek_op('[') {
                        self.pos += 1;
                        let mut counts = vec![self.integer()?];
                        while self.peek_op(',') {
                            self.pos += 1;
                            counts.push(self.integer()?);
                        }
                        self.expect_op(']')?;
                        deriv = Some(counts);
                    }
                    if !self.peek_op('(') {
                        return Err(self.error("unknown function used without arguments", &["`(`"]));
                    }
                    let args = self.args()?;
                    let deriv = match deriv {
                        None => MultiIndex::zero(args.len()),
                        Some(c) => {
                            if c.len() != args.len() || c.iter().any(|&k| !(0..=255).contains(&k)) {
                                self.pos -= 1;
                                return Err(self.error("derivative counts do not match arguments", &[]));
                            }
                            MultiIndex(c.into_iter().map(|k| k as u8).collect())
                        }
                    };
                    let sym = Symbol::new(&name, SymbolKind::Parameter);
                    return Ok(Expr::func_deriv(&sym, deriv, args));
                }
                if is_call && self.peek_op('(') {
                    self.pos -= 1;
                    return Err(self.error(&format!("undeclared function `{name}`"), &["declared function"]));
                }
                if let Some((d, vars)) = self.ctx.dep(&name) {
                    return Ok(Expr::jet(JetVar::base(d.clone(), vars.clone())));
                }
                Ok(Expr::sym(&self.ctx.symbol(&name)))
            }
            Tok::Op(c) => Err(self.error(&format!("unexpected `{c}`"), &["number", "name", "`(`"])),
        }
    }

    fn single_arg(&mut self, name: &str) -> Result<Expr, ParseError> {
        let mut a = self.args()?;
        if a.len() != 1 {
            return Err(self.error(&format!("`{name}` takes one argument"), &[]));
        }
        Ok(a.pop().unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jets_split_greedily() {
        let e = parse("u_xxxxz").unwrap();
        let crate::ExprKind::Jet(j) = e.kind() else { panic!() };
        assert_eq!(j.index.0, vec![4, 0, 1, 0]);
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse("0.25").unwrap(), Expr::frac(1, 4));
        assert_eq!(parse("1.5e2").unwrap(), Expr::int(150));
    }

    #[test]
    fn precedence_and_unary_minus() {
        assert_eq!(parse("-x^2").unwrap(), -Expr::var("x").powi(2));
        assert_eq!(parse("2^-1").unwrap(), Expr::frac(1, 2));
        assert_eq!(parse("x^(1/2)").unwrap(), Expr::sqrt(Expr::var("x")));
    }

    #[test]
    fn errors_carry_position() {
        let err = parse("x +\n  * y").unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
        assert!(parse("F(x)").is_err());
        assert!(parse("w_x").is_err());
        assert!(parse("x / 0").is_err());
    }
}
