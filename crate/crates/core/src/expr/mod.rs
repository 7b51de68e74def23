//! Immutable symbolic expression trees with exact rational coefficients.
//!
//! Trees are built through smart constructors that flatten nested sums and
//! products, fold numeric constants, merge like terms and sort children by a
//! fixed total order. Integer powers of sums are kept as written; expansion is
//! the job of [`crate::normal`].

mod diff;
mod eval;
mod equiv;
mod parse;
mod print;
mod subst;

use std::collections::BTreeMap;
use std::fmt;
use std::ops;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

pub use equiv::{random_equiv, EquivOptions};
pub use eval::{eval_numeric, EvalGuard, EvalOptions};
pub use parse::{parse, parse_with, ParseContext, ParseError};
pub use subst::{Binding, BindingKey, Lambda, Substitution};

use crate::{Exponent, Rational};

/// Role a symbol plays in a computation. Equality and ordering of symbols
/// only look at the name; the kind is descriptive metadata.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SymbolKind {
    Independent,
    Parameter,
    GroupParameter,
    AnsatzCoefficient,
}

#[derive(Clone)]
pub struct Symbol {
    name: Arc<str>,
    kind: SymbolKind,
}

impl Symbol {
    pub fn new(name: &str, kind: SymbolKind) -> Self {
        Symbol { name: Arc::from(name), kind }
    }

    pub fn var(name: &str) -> Self {
        Self::new(name, SymbolKind::Independent)
    }

    pub fn param(name: &str) -> Self {
        Self::new(name, SymbolKind::Parameter)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.name, &other.name) || self.name == other.name
    }
}
impl Eq for Symbol {}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.name.cmp(&other.name)
    }
}
impl std::hash::Hash for Symbol {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.name.hash(state)
    }
}
impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}
impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Derivative counts per independent variable, in the order of the owning
/// jet space (or per argument slot for unknown-function applications).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(pub Vec<u8>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut m = Self::zero(n);
        m.0[i] = 1;
        m
    }

    pub fn order(&self) -> usize {
        self.0.iter().map(|&c| c as usize).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bumped(&self, i: usize) -> Self {
        let mut m = self.clone();
        m.0[i] += 1;
        m
    }

    /// `self - other` if every count stays non-negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex(out))
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

/// A derivative coordinate `u_J` of a dependent variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JetVar {
    pub dep: Symbol,
    pub vars: Arc<[Symbol]>,
    pub index: MultiIndex,
}

impl JetVar {
    pub fn new(dep: Symbol, vars: Arc<[Symbol]>, index: MultiIndex) -> Self {
        debug_assert_eq!(vars.len(), index.len());
        JetVar { dep, vars, index }
    }

    pub fn base(dep: Symbol, vars: Arc<[Symbol]>) -> Self {
        let n = vars.len();
        JetVar::new(dep, vars, MultiIndex::zero(n))
    }

    pub fn order(&self) -> usize {
        self.index.order()
    }

    pub fn var_position(&self, v: &Symbol) -> Option<usize> {
        self.vars.iter().position(|s| s == v)
    }

    pub fn derivative(&self, i: usize) -> JetVar {
        JetVar::new(self.dep.clone(), self.vars.clone(), self.index.bumped(i))
    }

    /// Subscript string such as `xxz`.
    pub fn suffix(&self) -> String {
        let mut s = String::new();
        for (v, &c) in self.vars.iter().zip(&self.index.0) {
            for _ in 0..c {
                s.push_str(v.name());
            }
        }
        s
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.order() == 0 {
            write!(f, "{}", self.dep)
        } else {
            write!(f, "{}_{}", self.dep, self.suffix())
        }
    }
}

/// Fixed set of elementary functions understood by the engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elementary {
    Tanh,
    Sech,
    Sinh,
    Cosh,
    Exp,
}

impl Elementary {
    pub fn name(self) -> &'static str {
        match self {
            Elementary::Tanh => "tanh",
            Elementary::Sech => "sech",
            Elementary::Sinh => "sinh",
            Elementary::Cosh => "cosh",
            Elementary::Exp => "exp",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "tanh" => Elementary::Tanh,
            "sech" => Elementary::Sech,
            "sinh" => Elementary::Sinh,
            "cosh" => Elementary::Cosh,
            "exp" => Elementary::Exp,
            _ => return None,
        })
    }
}

/// Application of an unknown function, with formal derivative counts per
/// argument slot: `F[1,0](X, Y)` is the first-slot derivative of `F`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FuncApp {
    pub name: Symbol,
    pub deriv: MultiIndex,
    pub args: Vec<Expr>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExprKind {
    Num(Rational),
    Sym(Symbol),
    /// The imaginary unit, written `I`.
    Imag,
    Jet(JetVar),
    Func(FuncApp),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, Exponent),
    Elem(Elementary, Expr),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Expr(Arc<ExprKind>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub(crate) fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub(crate) fn exp_to_rational(e: Exponent) -> Rational {
    Rational::new(BigInt::from(*e.numer()), BigInt::from(*e.denom()))
}

/// Exact `q`-th root of a rational, real branch for odd `q`.
pub(crate) fn rational_root(c: &Rational, q: u32) -> Option<Rational> {
    if c.is_zero() {
        return Some(Rational::zero());
    }
    let neg = c.is_negative();
    if neg && q % 2 == 0 {
        return None;
    }
    let n = c.numer().abs();
    let d = c.denom().clone();
    let rn = n.nth_root(q);
    let rd = d.nth_root(q);
    if num_traits::pow(rn.clone(), q as usize) != n || num_traits::pow(rd.clone(), q as usize) != d {
        return None;
    }
    let r = Rational::new(rn, rd);
    Some(if neg { -r } else { r })
}

/// `c^e` for rational `c` when the result is rational.
pub(crate) fn rational_pow(c: &Rational, e: Exponent) -> Option<Rational> {
    let p = *e.numer();
    let q = *e.denom();
    if c.is_zero() {
        return if p > 0 { Some(Rational::zero()) } else { None };
    }
    let root = rational_root(c, q as u32)?;
    let mag = num_traits::pow(root, p.unsigned_abs() as usize);
    Some(if p < 0 { mag.recip() } else { mag })
}

fn split_coeff(e: &Expr) -> (Rational, Expr) {
    match e.kind() {
        ExprKind::Num(c) => (c.clone(), Expr::one()),
        ExprKind::Mul(fs) => {
            if let ExprKind::Num(c) = fs[0].kind() {
                let rest: Vec<Expr> = fs[1..].to_vec();
                let rest = if rest.len() == 1 {
                    rest.into_iter().next().unwrap()
                } else {
                    Expr::raw(ExprKind::Mul(rest))
                };
                (c.clone(), rest)
            } else {
                (Rational::one(), e.clone())
            }
        }
        _ => (Rational::one(), e.clone()),
    }
}

fn split_power(e: &Expr) -> (Expr, Exponent) {
    match e.kind() {
        ExprKind::Pow(b, p) => (b.clone(), *p),
        _ => (e.clone(), Exponent::one()),
    }
}

impl Expr {
    pub(crate) fn ptr(&self) -> *const ExprKind {
        Arc::as_ptr(&self.0)
    }

    pub(crate) fn raw(kind: ExprKind) -> Self {
        Expr(Arc::new(kind))
    }

    pub fn kind(&self) -> &ExprKind {
        &self.0
    }

    pub fn num(c: Rational) -> Self {
        Expr::raw(ExprKind::Num(c))
    }

    pub fn int(n: i64) -> Self {
        Expr::num(rat(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Expr::num(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zero() -> Self {
        Expr::int(0)
    }

    pub fn one() -> Self {
        Expr::int(1)
    }

    pub fn imag() -> Self {
        Expr::raw(ExprKind::Imag)
    }

    pub fn sym(s: &Symbol) -> Self {
        Expr::raw(ExprKind::Sym(s.clone()))
    }

    pub fn var(name: &str) -> Self {
        Expr::sym(&Symbol::var(name))
    }

    pub fn param(name: &str) -> Self {
        Expr::sym(&Symbol::param(name))
    }

    pub fn jet(j: JetVar) -> Self {
        Expr::raw(ExprKind::Jet(j))
    }

    pub fn func(name: &Symbol, args: Vec<Expr>) -> Self {
        let n = args.len();
        Expr::func_deriv(name, MultiIndex::zero(n), args)
    }

    pub fn func_deriv(name: &Symbol, deriv: MultiIndex, args: Vec<Expr>) -> Self {
        debug_assert_eq!(deriv.len(), args.len());
        Expr::raw(ExprKind::Func(FuncApp { name: name.clone(), deriv, args }))
    }

    pub fn elem(f: Elementary, arg: Expr) -> Self {
        Expr::raw(ExprKind::Elem(f, arg))
    }

    pub fn tanh(arg: Expr) -> Self {
        Expr::elem(Elementary::Tanh, arg)
    }

    pub fn sech(arg: Expr) -> Self {
        Expr::elem(Elementary::Sech, arg)
    }

    pub fn exp(arg: Expr) -> Self {
        if arg.is_zero() {
            return Expr::one();
        }
        Expr::elem(Elementary::Exp, arg)
    }

    pub fn sqrt(arg: Expr) -> Self {
        arg.pow(Exponent::new(1, 2))
    }

    pub fn as_num(&self) -> Option<&Rational> {
        match self.kind() {
            ExprKind::Num(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&Symbol> {
        match self.kind() {
            ExprKind::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_num().is_some_and(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_num().is_some_and(|c| c.is_one())
    }

    /// Sum with flattening, constant folding and like-term collection.
    pub fn add_all<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut constant = Rational::zero();
        let mut collected: BTreeMap<Expr, Rational> = BTreeMap::new();
        let mut stack: Vec<Expr> = terms.into_iter().collect();
        stack.reverse();
        while let Some(t) = stack.pop() {
            match t.kind() {
                ExprKind::Num(c) => constant += c,
                ExprKind::Add(ts) => stack.extend(ts.iter().rev().cloned()),
                _ => {
                    let (c, rest) = split_coeff(&t);
                    *collected.entry(rest).or_insert_with(Rational::zero) += c;
                }
            }
        }
        let mut out: Vec<Expr> = Vec::new();
        if !constant.is_zero() {
            out.push(Expr::num(constant));
        }
        for (rest, c) in collected {
            if c.is_zero() {
                continue;
            }
            out.push(Expr::scaled(c, rest));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => {
                out.sort();
                Expr::raw(ExprKind::Add(out))
            }
        }
    }

    fn scaled(c: Rational, rest: Expr) -> Expr {
        if c.is_one() {
            return rest;
        }
        let mut fs = vec![Expr::num(c)];
        match rest.kind() {
            ExprKind::Mul(inner) => fs.extend(inner.iter().cloned()),
            ExprKind::Num(r) if r.is_one() => return fs.pop().unwrap(),
            _ => fs.push(rest),
        }
        Expr::raw(ExprKind::Mul(fs))
    }

    /// Product with flattening, constant folding and merging of equal bases.
    pub fn mul_all<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        let mut coeff = Rational::one();
        let mut bases: BTreeMap<Expr, Exponent> = BTreeMap::new();
        let mut stack: Vec<Expr> = factors.into_iter().collect();
        stack.reverse();
        while let Some(f) = stack.pop() {
            match f.kind() {
                ExprKind::Num(c) => {
                    if c.is_zero() {
                        return Expr::zero();
                    }
                    coeff *= c;
                }
                ExprKind::Mul(fs) => stack.extend(fs.iter().rev().cloned()),
                _ => {
                    let (b, e) = split_power(&f);
                    *bases.entry(b).or_insert_with(Exponent::zero) += e;
                }
            }
        }
        let mut out: Vec<Expr> = Vec::new();
        for (b, e) in bases {
            if e.is_zero() {
                continue;
            }
            let p = b.pow(e);
            match p.kind() {
                ExprKind::Num(c) => {
                    if c.is_zero() {
                        return Expr::zero();
                    }
                    coeff *= c;
                }
                ExprKind::Mul(fs) => {
                    for f in fs {
                        match f.kind() {
                            ExprKind::Num(c) => coeff *= c,
                            _ => out.push(f.clone()),
                        }
                    }
                }
                _ => out.push(p),
            }
        }
        if out.is_empty() {
            return Expr::num(coeff);
        }
        out.sort();
        if coeff.is_one() && out.len() == 1 {
            return out.pop().unwrap();
        }
        if !coeff.is_one() {
            out.insert(0, Expr::num(coeff));
        }
        Expr::raw(ExprKind::Mul(out))
    }

    /// `self^e`. Numeric bases are folded when the result is rational, `I` is
    /// reduced modulo 4 and nested powers merge for integer outer exponents.
    pub fn pow(&self, e: Exponent) -> Expr {
        if e.is_zero() {
            return Expr::one();
        }
        if e.is_one() {
            return self.clone();
        }
        match self.kind() {
            ExprKind::Num(c) => {
                if let Some(r) = rational_pow(c, e) {
                    return Expr::num(r);
                }
                if e.is_integer() {
                    // only 0^negative lands here; keep it symbolic
                    return Expr::raw(ExprKind::Pow(self.clone(), e));
                }
                // pull out the integer part of the exponent
                let fl = e.floor();
                if !fl.is_zero() {
                    let frac = e - fl;
                    return Expr::mul_all([self.pow(fl), self.pow(frac)]);
                }
                Expr::raw(ExprKind::Pow(self.clone(), e))
            }
            ExprKind::Imag if e.is_integer() => {
                let k = e.to_integer().rem_euclid(4);
                match k {
                    0 => Expr::one(),
                    1 => Expr::imag(),
                    2 => Expr::int(-1),
                    _ => Expr::mul_all([Expr::int(-1), Expr::imag()]),
                }
            }
            ExprKind::Pow(b, p) if e.is_integer() => b.pow(*p * e),
            ExprKind::Mul(fs) if e.is_integer() => Expr::mul_all(fs.iter().map(|f| f.pow(e))),
            _ => Expr::raw(ExprKind::Pow(self.clone(), e)),
        }
    }

    pub fn powi(&self, n: i64) -> Expr {
        self.pow(Exponent::from_integer(n))
    }

    pub fn recip(&self) -> Expr {
        self.powi(-1)
    }

    /// Structural size (node count), used for guards and heuristics.
    pub fn size(&self) -> usize {
        1 + match self.kind() {
            ExprKind::Add(ts) | ExprKind::Mul(ts) => ts.iter().map(Expr::size).sum(),
            ExprKind::Pow(b, _) | ExprKind::Elem(_, b) => b.size(),
            ExprKind::Func(f) => f.args.iter().map(Expr::size).sum(),
            _ => 0,
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self.kind() {
            ExprKind::Add(ts) | ExprKind::Mul(ts) => ts.iter().collect(),
            ExprKind::Pow(b, _) | ExprKind::Elem(_, b) => vec![b],
            ExprKind::Func(f) => f.args.iter().collect(),
            _ => Vec::new(),
        }
    }

    /// Free symbols, in name order.
    pub fn free_symbols(&self) -> Vec<Symbol> {
        let mut out = std::collections::BTreeSet::new();
        self.visit(&mut |e| {
            if let ExprKind::Sym(s) = e.kind() {
                out.insert(s.clone());
            }
        });
        out.into_iter().collect()
    }

    pub fn jet_vars(&self) -> Vec<JetVar> {
        let mut out = std::collections::BTreeSet::new();
        self.visit(&mut |e| {
            if let ExprKind::Jet(j) = e.kind() {
                out.insert(j.clone());
            }
        });
        out.into_iter().collect()
    }

    pub fn has_functions(&self) -> bool {
        let mut found = false;
        self.visit(&mut |e| {
            if matches!(e.kind(), ExprKind::Func(_)) {
                found = true;
            }
        });
        found
    }

    pub fn contains_symbol(&self, s: &Symbol) -> bool {
        let mut found = false;
        self.visit(&mut |e| {
            if e.as_symbol() == Some(s) {
                found = true;
            }
        });
        found
    }

    pub fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Rebuild the tree bottom-up through the smart constructors, applying
    /// `f` to every node after its children have been rebuilt.
    pub fn map_bottom_up(&self, f: &mut dyn FnMut(Expr) -> Expr) -> Expr {
        let rebuilt = match self.kind() {
            ExprKind::Add(ts) => Expr::add_all(ts.iter().map(|t| t.map_bottom_up(f)).collect::<Vec<_>>()),
            ExprKind::Mul(ts) => Expr::mul_all(ts.iter().map(|t| t.map_bottom_up(f)).collect::<Vec<_>>()),
            ExprKind::Pow(b, e) => b.map_bottom_up(f).pow(*e),
            ExprKind::Elem(k, a) => Expr::elem(*k, a.map_bottom_up(f)),
            ExprKind::Func(app) => Expr::func_deriv(
                &app.name,
                app.deriv.clone(),
                app.args.iter().map(|a| a.map_bottom_up(f)).collect(),
            ),
            _ => self.clone(),
        };
        f(rebuilt)
    }

    /// Numeric value if the tree is a rational constant.
    pub fn to_f64(&self) -> Option<f64> {
        self.as_num().and_then(|c| c.to_f64())
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(c: Rational) -> Self {
        Expr::num(c)
    }
}

impl From<&Symbol> for Expr {
    fn from(s: &Symbol) -> Self {
        Expr::sym(s)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs.clone())
            }
        }
        impl ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs.clone())
            }
        }
        impl ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::add_all([a, b]));
binop!(Sub, sub, |a, b| Expr::add_all([a, -b]));
binop!(Mul, mul, |a, b| Expr::mul_all([a, b]));
binop!(Div, div, |a, b| Expr::mul_all([a, b.recip()]));

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul_all([Expr::int(-1), self])
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -(self.clone())
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::add_all(iter.collect::<Vec<_>>())
    }
}

impl std::iter::Product for Expr {
    fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::mul_all(iter.collect::<Vec<_>>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_flatten_and_collect() {
        let x = Expr::var("x");
        let y = Expr::var("y");
        let e = (&x + &y) + (&x * Expr::int(2)) - &y;
        assert_eq!(e, Expr::int(3) * &x);
    }

    #[test]
    fn products_merge_powers() {
        let x = Expr::var("x");
        let e = &x * &x.pow(Exponent::new(1, 2)) * x.recip();
        assert_eq!(e, x.pow(Exponent::new(1, 2)));
    }

    #[test]
    fn numeric_powers_fold() {
        assert_eq!(Expr::int(4).pow(Exponent::new(1, 2)), Expr::int(2));
        assert_eq!(Expr::int(-8).pow(Exponent::new(1, 3)), Expr::int(-2));
        assert_eq!(Expr::int(5).pow(Exponent::new(3, 2)), Expr::int(5) * Expr::int(5).pow(Exponent::new(1, 2)));
    }

    #[test]
    fn imaginary_unit_squares_to_minus_one() {
        let i = Expr::imag();
        assert_eq!(&i * &i, Expr::int(-1));
    }

    #[test]
    fn powers_of_sums_are_not_expanded() {
        let x = Expr::var("x");
        let s = &x + Expr::one();
        let e = s.powi(2);
        assert!(matches!(e.kind(), ExprKind::Pow(_, _)));
    }
}
