//! Simultaneous substitution of symbols, jet variables and unknown functions.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{Expr, ExprKind, JetVar, Symbol};
use crate::{Error, Result};

/// What a binding replaces.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BindingKey {
    Sym(Symbol),
    Jet(JetVar),
    /// Every application of the named unknown function, at any derivative.
    Func(Symbol),
}

/// `λ(params). body`, used to bind unknown functions.
#[derive(Clone, Debug)]
pub struct Lambda {
    pub params: Vec<Symbol>,
    pub body: Expr,
}

impl Lambda {
    pub fn new(params: Vec<Symbol>, body: Expr) -> Self {
        Lambda { params, body }
    }
}

#[derive(Clone, Debug)]
pub enum Binding {
    Expr(Expr),
    Func(Lambda),
}

impl Binding {
    fn value(&self) -> &Expr {
        match self {
            Binding::Expr(e) => e,
            Binding::Func(l) => &l.body,
        }
    }
}

fn keys_in(e: &Expr, bound_params: &[Symbol]) -> BTreeSet<BindingKey> {
    let mut out = BTreeSet::new();
    e.visit(&mut |n| match n.kind() {
        ExprKind::Sym(s) if !bound_params.contains(s) => {
            out.insert(BindingKey::Sym(s.clone()));
        }
        ExprKind::Jet(j) => {
            out.insert(BindingKey::Jet(j.clone()));
        }
        ExprKind::Func(app) => {
            out.insert(BindingKey::Func(app.name.clone()));
        }
        _ => {}
    });
    out
}

/// Reject binding sets with a dependency cycle of length two or more.
/// A key whose value mentions itself is fine: substitution is simultaneous.
fn check_acyclic(map: &BTreeMap<BindingKey, Binding>) -> Result<()> {
    let edges: BTreeMap<&BindingKey, Vec<BindingKey>> = map
        .iter()
        .map(|(k, b)| {
            let params: &[Symbol] = match b {
                Binding::Func(l) => &l.params,
                Binding::Expr(_) => &[],
            };
            let deps = keys_in(b.value(), params).into_iter().filter(|d| d != k && map.contains_key(d)).collect();
            (k, deps)
        })
        .collect();
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Fresh,
        Open,
        Done,
    }
    let mut mark: BTreeMap<&BindingKey, Mark> = edges.keys().map(|k| (*k, Mark::Fresh)).collect();
    fn dfs<'a>(
        k: &'a BindingKey,
        edges: &'a BTreeMap<&'a BindingKey, Vec<BindingKey>>,
        mark: &mut BTreeMap<&'a BindingKey, Mark>,
    ) -> Result<()> {
        mark.insert(k, Mark::Open);
        for d in &edges[k] {
            let (dk, _) = edges.get_key_value(d).unwrap();
            match mark[*dk] {
                Mark::Open => return Err(Error::CyclicBinding(key_name(d))),
                Mark::Fresh => dfs(dk, edges, mark)?,
                Mark::Done => {}
            }
        }
        mark.insert(k, Mark::Done);
        Ok(())
    }
    let keys: Vec<&BindingKey> = edges.keys().copied().collect();
    for k in keys {
        if mark[k] == Mark::Fresh {
            dfs(k, &edges, &mut mark)?;
        }
    }
    Ok(())
}

fn key_name(k: &BindingKey) -> String {
    match k {
        BindingKey::Sym(s) | BindingKey::Func(s) => s.name().to_string(),
        BindingKey::Jet(j) => j.to_string(),
    }
}

/// A set of bindings applied simultaneously.
#[derive(Clone, Debug, Default)]
pub struct Substitution {
    map: BTreeMap<BindingKey, Binding>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn sym(mut self, s: &Symbol, e: Expr) -> Self {
        self.map.insert(BindingKey::Sym(s.clone()), Binding::Expr(e));
        self
    }

    pub fn jet(mut self, j: &JetVar, e: Expr) -> Self {
        self.map.insert(BindingKey::Jet(j.clone()), Binding::Expr(e));
        self
    }

    pub fn func(mut self, name: &Symbol, params: Vec<Symbol>, body: Expr) -> Self {
        self.map.insert(BindingKey::Func(name.clone()), Binding::Func(Lambda::new(params, body)));
        self
    }

    pub fn insert(&mut self, k: BindingKey, b: Binding) {
        self.map.insert(k, b);
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, e: &Expr) -> Result<Expr> {
        check_acyclic(&self.map)?;
        let mut memo = HashMap::new();
        Ok(self.go(e, &mut memo))
    }

    fn go(&self, e: &Expr, memo: &mut HashMap<Expr, Expr>) -> Expr {
        if let Some(r) = memo.get(e) {
            return r.clone();
        }
        let r = match e.kind() {
            ExprKind::Sym(s) => match self.map.get(&BindingKey::Sym(s.clone())) {
                Some(Binding::Expr(v)) => v.clone(),
                _ => e.clone(),
            },
            ExprKind::Jet(j) => match self.map.get(&BindingKey::Jet(j.clone())) {
                Some(Binding::Expr(v)) => v.clone(),
                _ => e.clone(),
            },
            ExprKind::Num(_) | ExprKind::Imag => e.clone(),
            ExprKind::Add(ts) => Expr::add_all(ts.iter().map(|t| self.go(t, memo)).collect::<Vec<_>>()),
            ExprKind::Mul(ts) => Expr::mul_all(ts.iter().map(|t| self.go(t, memo)).collect::<Vec<_>>()),
            ExprKind::Pow(b, p) => self.go(b, memo).pow(*p),
            ExprKind::Elem(k, a) => Expr::elem(*k, self.go(a, memo)),
            ExprKind::Func(app) => {
                let args: Vec<Expr> = app.args.iter().map(|a| self.go(a, memo)).collect();
                match self.map.get(&BindingKey::Func(app.name.clone())) {
                    Some(Binding::Func(l)) if l.params.len() == args.len() => {
                        let mut body = l.body.clone();
                        for (i, &c) in app.deriv.0.iter().enumerate() {
                            body = body.differentiate_n(&l.params[i], c as usize);
                        }
                        let mut inner = Substitution::new();
                        for (p, a) in l.params.iter().zip(args) {
                            inner = inner.sym(p, a);
                        }
                        inner.go(&body, &mut HashMap::new())
                    }
                    _ => Expr::func_deriv(&app.name, app.deriv.clone(), args),
                }
            }
        };
        memo.insert(e.clone(), r.clone());
        r
    }
}

impl Expr {
    /// Replace symbols simultaneously.
    pub fn subs(&self, pairs: &[(Symbol, Expr)]) -> Result<Expr> {
        let mut s = Substitution::new();
        for (k, v) in pairs {
            s = s.sym(k, v.clone());
        }
        s.apply(self)
    }

    pub fn substitute(&self, s: &Substitution) -> Result<Expr> {
        s.apply(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, parse_with, ParseContext};

    #[test]
    fn simultaneous_swap_is_not_a_cycle_of_one() {
        let x = Symbol::var("x");
        let e = parse("x^2 + 1").unwrap().subs(&[(x.clone(), parse("x + 1").unwrap())]).unwrap();
        assert_eq!(e, parse("(x + 1)^2 + 1").unwrap());
    }

    #[test]
    fn two_cycles_are_rejected() {
        let (x, y) = (Symbol::var("x"), Symbol::var("y"));
        let r = parse("x").unwrap().subs(&[(x, Expr::var("y")), (y, Expr::var("x"))]);
        assert!(matches!(r, Err(Error::CyclicBinding(_))));
    }

    #[test]
    fn function_binding_follows_formal_derivatives() {
        let ctx = ParseContext::default().with_functions(&["f"]);
        let e = parse_with("f[2](x*y)", &ctx).unwrap();
        let w = Symbol::param("w");
        let s = Substitution::new().func(&Symbol::param("f"), vec![w.clone()], Expr::tanh(Expr::sym(&w)));
        let got = e.substitute(&s).unwrap();
        let want = parse("-2*sech(x*y)^2*tanh(x*y)").unwrap();
        assert!(crate::normalize(&(got - want)).unwrap().is_zero());
    }
}
