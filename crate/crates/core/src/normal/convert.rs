use std::collections::HashMap;

use num_traits::One;

use super::{exp_nf, sech_nf, tanh_nf, Atom, NormalForm};
use crate::expr::{Elementary, Expr, ExprKind};
use crate::{Exponent, Rational, Result};

/// Expand an expression into its normal form.
pub fn normalize(e: &Expr) -> Result<NormalForm> {
    let mut memo = HashMap::new();
    go(e, &mut memo)
}

fn go(e: &Expr, memo: &mut HashMap<*const ExprKind, NormalForm>) -> Result<NormalForm> {
    let key = e.ptr();
    if let Some(n) = memo.get(&key) {
        return Ok(n.clone());
    }
    let n = match e.kind() {
        ExprKind::Num(c) => NormalForm::constant(c.clone()),
        ExprKind::Sym(s) => NormalForm::sym(s),
        ExprKind::Imag => NormalForm::atom(Atom::Imag),
        ExprKind::Jet(j) => NormalForm::jet(j),
        ExprKind::Func(app) => {
            let args = app.args.iter().map(|a| go(a, memo)).collect::<Result<Vec<_>>>()?;
            NormalForm::atom(Atom::func(app.name.clone(), app.deriv.clone(), args))
        }
        ExprKind::Add(ts) => {
            let mut acc = NormalForm::zero();
            for t in ts {
                acc = acc + go(t, memo)?;
            }
            acc.check()?
        }
        ExprKind::Mul(ts) => {
            let mut acc = NormalForm::one();
            for t in ts {
                acc = acc.mul(&go(t, memo)?)?;
            }
            acc
        }
        ExprKind::Pow(b, p) => go(b, memo)?.pow(*p)?,
        ExprKind::Elem(k, a) => {
            let a = go(a, memo)?;
            let half = Rational::new(1.into(), 2.into());
            match k {
                Elementary::Tanh => tanh_nf(&a),
                Elementary::Sech => sech_nf(&a),
                Elementary::Exp => exp_nf(&a)?,
                Elementary::Sinh => (exp_nf(&a)? - exp_nf(&-&a)?).scale(&half),
                Elementary::Cosh => (exp_nf(&a)? + exp_nf(&-&a)?).scale(&half),
            }
        }
    };
    memo.insert(key, n.clone());
    Ok(n)
}

pub(super) fn atom_expr(a: &Atom) -> Expr {
    match a {
        Atom::Sym(s) => Expr::sym(s),
        Atom::Imag => Expr::imag(),
        Atom::Jet(j) => Expr::jet(j.clone()),
        Atom::Func(f) => Expr::func_deriv(&f.name, f.deriv.clone(), f.args.iter().map(|x| x.to_expr()).collect()),
        Atom::Tanh(t) => Expr::tanh(t.to_expr()),
        Atom::Sech(t) => Expr::sech(t.to_expr()),
        Atom::Exp(m) => Expr::exp(m.to_expr()),
        Atom::Pow(b) => b.to_expr(),
    }
}

pub(super) fn atom_power_expr(a: &Atom, e: Exponent) -> Expr {
    match a {
        Atom::Exp(m) => Expr::exp(Expr::num(crate::expr::exp_to_rational(e)) * m.to_expr()),
        _ if e.is_one() => atom_expr(a),
        _ => atom_expr(a).pow(e),
    }
}
