use std::fmt;

use num_traits::{One, Signed};

use super::{split_coeff, Expr, ExprKind};
use crate::{Exponent, Rational};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Sum,
    Product,
    Power,
    Atom,
}

fn prec(e: &Expr) -> Prec {
    match e.kind() {
        ExprKind::Add(_) => Prec::Sum,
        ExprKind::Num(c) if c.is_negative() => Prec::Sum,
        ExprKind::Num(c) if !c.is_integer() => Prec::Product,
        ExprKind::Mul(_) => {
            if is_negative(e) {
                Prec::Sum
            } else {
                Prec::Product
            }
        }
        ExprKind::Pow(_, p) if *p == Exponent::new(1, 2) => Prec::Atom,
        ExprKind::Pow(_, p) if *p < Exponent::from_integer(0) => Prec::Product,
        ExprKind::Pow(..) => Prec::Power,
        _ => Prec::Atom,
    }
}

fn is_negative(e: &Expr) -> bool {
    split_coeff(e).0.is_negative()
}

fn write_exponent(f: &mut fmt::Formatter<'_>, e: Exponent) -> fmt::Result {
    if e.is_integer() && *e.numer() > 0 {
        write!(f, "^{}", e.numer())
    } else if e.is_integer() {
        write!(f, "^({})", e.numer())
    } else {
        write!(f, "^({}/{})", e.numer(), e.denom())
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, min: Prec) -> fmt::Result {
    if prec(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn write_power(f: &mut fmt::Formatter<'_>, b: &Expr, e: Exponent) -> fmt::Result {
    if e == Exponent::new(1, 2) {
        return write!(f, "sqrt({b})");
    }
    write_wrapped(f, b, Prec::Atom)?;
    write_exponent(f, e)
}

/// Print a product with a positive leading coefficient as `num/den`.
fn write_product(f: &mut fmt::Formatter<'_>, coeff: &Rational, factors: &[Expr]) -> fmt::Result {
    let mut num: Vec<(Expr, Exponent)> = Vec::new();
    let mut den: Vec<(Expr, Exponent)> = Vec::new();
    for x in factors {
        match x.kind() {
            ExprKind::Pow(b, e) if *e < Exponent::from_integer(0) => den.push((b.clone(), -*e)),
            ExprKind::Pow(b, e) => num.push((b.clone(), *e)),
            _ => num.push((x.clone(), Exponent::one())),
        }
    }
    let cn = coeff.numer();
    let cd = coeff.denom();
    let mut first = true;
    if !cn.is_one() || num.is_empty() {
        write!(f, "{cn}")?;
        first = false;
    }
    for (b, e) in &num {
        if !first {
            write!(f, "*")?;
        }
        first = false;
        if e.is_one() {
            write_wrapped(f, b, Prec::Power)?;
        } else {
            write_power(f, b, *e)?;
        }
    }
    let n_den = den.len() + usize::from(!cd.is_one());
    if n_den == 0 {
        return Ok(());
    }
    write!(f, "/")?;
    if n_den > 1 {
        write!(f, "(")?;
    }
    let mut first = true;
    if !cd.is_one() {
        write!(f, "{cd}")?;
        first = false;
    }
    for (b, e) in &den {
        if !first {
            write!(f, "*")?;
        }
        first = false;
        if e.is_one() {
            write_wrapped(f, b, Prec::Atom)?;
        } else {
            write_power(f, b, *e)?;
        }
    }
    if n_den > 1 {
        write!(f, ")")?;
    }
    Ok(())
}

fn write_term(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    let (c, rest) = split_coeff(e);
    let c = c.abs();
    match rest.kind() {
        ExprKind::Mul(fs) => write_product(f, &c, fs),
        _ if rest.is_one() => write_product(f, &c, &[]),
        _ => write_product(f, &c, std::slice::from_ref(&rest)),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            ExprKind::Num(c) => {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                write_product(f, &c.abs(), &[])
            }
            ExprKind::Sym(s) => write!(f, "{s}"),
            ExprKind::Imag => write!(f, "I"),
            ExprKind::Jet(j) => write!(f, "{j}"),
            ExprKind::Func(app) => {
                write!(f, "{}", app.name)?;
                if app.deriv.order() > 0 {
                    let counts: Vec<String> = app.deriv.0.iter().map(|c| c.to_string()).collect();
                    write!(f, "[{}]", counts.join(","))?;
                }
                let args: Vec<String> = app.args.iter().map(|a| a.to_string()).collect();
                write!(f, "({})", args.join(", "))
            }
            ExprKind::Elem(k, a) => write!(f, "{}({a})", k.name()),
            ExprKind::Add(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    let neg = is_negative(t);
                    match (i, neg) {
                        (0, true) => write!(f, "-")?,
                        (0, false) => {}
                        (_, true) => write!(f, " - ")?,
                        (_, false) => write!(f, " + ")?,
                    }
                    write_term(f, t)?;
                }
                Ok(())
            }
            ExprKind::Mul(_) | ExprKind::Pow(..) => {
                if is_negative(self) {
                    write!(f, "-")?;
                }
                write_term(f, self)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::parse;

    fn round(s: &str) -> String {
        parse(s).unwrap().to_string()
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(round("x*y/(6*t)"), "x*y/(6*t)");
        assert_eq!(round("-u/4"), "-u/4");
        assert_eq!(round("3/4*x"), "3*x/4");
        assert_eq!(round("(z/y)^(1/2)"), "sqrt(z/y)");
        assert_eq!(round("x^(-1/2)"), "1/sqrt(x)");
        assert_eq!(round("(x+1)^2"), "(1 + x)^2");
        assert_eq!(round("a - b"), "a - b");
    }

    #[test]
    fn round_trips() {
        for s in [
            "u_t + 6*u_x*u_y + u_xxy + u_xxxxz + 60*u_x^2*u_z + 10*u_xxx*u_z + 20*u_x*u_xxz",
            "2*k^2/(a*k + 2*x)",
            "-tanh(x - 2*t)^2 + I*exp(-x/3)",
            "(-2)^(1/3)*x^(2/3)",
            "x*(y + b)/(6*t) - sech(z)^2/5",
        ] {
            let e = parse(s).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{s} -> {e}");
        }
    }
}
