use num_traits::One;

use super::{Elementary, Expr, ExprKind, Symbol};
use crate::Exponent;

impl Expr {
    /// Exact partial derivative with respect to an explicit symbol.
    ///
    /// Jet variables are constants here; they only move under total
    /// derivatives (see [`crate::jet::total_derivative`]). Unknown-function
    /// applications pick up formal slot derivatives through the chain rule.
    pub fn differentiate(&self, s: &Symbol) -> Expr {
        match self.kind() {
            ExprKind::Num(_) | ExprKind::Imag | ExprKind::Jet(_) => Expr::zero(),
            ExprKind::Sym(t) => {
                if t == s {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            ExprKind::Func(app) => {
                let mut terms = Vec::new();
                for (k, a) in app.args.iter().enumerate() {
                    let da = a.differentiate(s);
                    if da.is_zero() {
                        continue;
                    }
                    let f = Expr::func_deriv(&app.name, app.deriv.bumped(k), app.args.clone());
                    terms.push(f * da);
                }
                Expr::add_all(terms)
            }
            ExprKind::Add(ts) => Expr::add_all(ts.iter().map(|t| t.differentiate(s)).collect::<Vec<_>>()),
            ExprKind::Mul(fs) => {
                let mut terms = Vec::new();
                for i in 0..fs.len() {
                    let d = fs[i].differentiate(s);
                    if d.is_zero() {
                        continue;
                    }
                    let mut parts: Vec<Expr> = Vec::with_capacity(fs.len());
                    for (j, f) in fs.iter().enumerate() {
                        parts.push(if i == j { d.clone() } else { f.clone() });
                    }
                    terms.push(Expr::mul_all(parts));
                }
                Expr::add_all(terms)
            }
            ExprKind::Pow(b, e) => {
                let db = b.differentiate(s);
                if db.is_zero() {
                    return Expr::zero();
                }
                let c = Expr::num(super::exp_to_rational(*e));
                Expr::mul_all([c, b.pow(*e - Exponent::one()), db])
            }
            ExprKind::Elem(f, a) => {
                let da = a.differentiate(s);
                if da.is_zero() {
                    return Expr::zero();
                }
                let outer = match f {
                    Elementary::Tanh => Expr::sech(a.clone()).powi(2),
                    Elementary::Sech => -(Expr::sech(a.clone()) * Expr::tanh(a.clone())),
                    Elementary::Sinh => Expr::elem(Elementary::Cosh, a.clone()),
                    Elementary::Cosh => Expr::elem(Elementary::Sinh, a.clone()),
                    Elementary::Exp => self.clone(),
                };
                outer * da
            }
        }
    }

    /// Repeated partial derivative `∂^n / ∂s^n`.
    pub fn differentiate_n(&self, s: &Symbol, n: usize) -> Expr {
        let mut e = self.clone();
        for _ in 0..n {
            e = e.differentiate(s);
        }
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::normal::normalize;

    fn same(a: &Expr, b: &Expr) -> bool {
        normalize(&(a - b)).unwrap().is_zero()
    }

    #[test]
    fn tanh_derivative_is_sech_squared() {
        let x = Symbol::var("x");
        let d = parse("tanh(x)").unwrap().differentiate(&x);
        assert_eq!(d, parse("sech(x)^2").unwrap());
    }

    #[test]
    fn quotient_rule() {
        let t = Symbol::var("t");
        let d = parse("x*y/(6*t)").unwrap().differentiate(&t);
        assert!(same(&d, &parse("-x*y/(6*t^2)").unwrap()));
    }

    #[test]
    fn formal_slot_derivative() {
        let ctx = crate::expr::ParseContext::default().with_functions(&["F"]);
        let e = crate::expr::parse_with("F(X, Y)", &ctx).unwrap();
        let d = e.differentiate(&Symbol::var("X"));
        assert_eq!(d, crate::expr::parse_with("F[1,0](X, Y)", &ctx).unwrap());
    }

    #[test]
    fn jets_are_constant_under_partial_derivative() {
        let x = Symbol::var("x");
        assert!(parse("u_x^2 + u_xxy").unwrap().differentiate(&x).is_zero());
    }
}
