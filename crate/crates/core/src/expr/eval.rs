//! Numeric evaluation of closed trees over any [`Scalar`].

use std::collections::BTreeMap;

use super::{Elementary, Expr, ExprKind, Symbol};
use crate::{Error, Result, Scalar};

/// Near-singularity limits. A point that trips one of them is reported as
/// [`Error::Pole`] so samplers can reject it.
#[derive(Clone, Copy, Debug)]
pub struct EvalGuard {
    /// Smallest admissible magnitude of a base raised to a negative power.
    pub min_denominator: f64,
    /// Largest admissible magnitude of a hyperbolic or exponential argument.
    pub max_hyperbolic_arg: f64,
}

impl Default for EvalGuard {
    fn default() -> Self {
        EvalGuard { min_denominator: 1e-3, max_hyperbolic_arg: 30.0 }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EvalOptions {
    pub guard: Option<EvalGuard>,
}

impl EvalOptions {
    pub fn guarded() -> Self {
        EvalOptions { guard: Some(EvalGuard::default()) }
    }
}

/// Evaluate `e` at the point `env`. Jets and unknown functions are errors.
pub fn eval_numeric<S: Scalar>(e: &Expr, env: &BTreeMap<Symbol, S>, opts: &EvalOptions) -> Result<S> {
    let mut memo: std::collections::HashMap<Expr, S> = std::collections::HashMap::new();
    go(e, env, opts, &mut memo)
}

fn go<S: Scalar>(
    e: &Expr,
    env: &BTreeMap<Symbol, S>,
    opts: &EvalOptions,
    memo: &mut std::collections::HashMap<Expr, S>,
) -> Result<S> {
    if let Some(v) = memo.get(e) {
        return Ok(*v);
    }
    let v = match e.kind() {
        ExprKind::Num(c) => S::from_rational(c),
        ExprKind::Sym(s) => *env.get(s).ok_or_else(|| Error::UnboundSymbol(s.name().to_string()))?,
        ExprKind::Imag => {
            S::imag_unit().ok_or_else(|| Error::NotNumeric(format!("I in {} evaluation", S::NAME)))?
        }
        ExprKind::Jet(j) => return Err(Error::NotNumeric(format!("jet variable {j}"))),
        ExprKind::Func(app) => return Err(Error::NotNumeric(format!("unknown function {}", app.name))),
        ExprKind::Add(ts) => {
            let mut acc = S::zero();
            for t in ts {
                acc = acc + go(t, env, opts, memo)?;
            }
            acc
        }
        ExprKind::Mul(ts) => {
            let mut acc = S::one();
            for t in ts {
                acc = acc * go(t, env, opts, memo)?;
            }
            acc
        }
        ExprKind::Pow(b, p) => {
            let bv = go(b, env, opts, memo)?;
            if *p.numer() < 0 {
                if bv.is_zero() {
                    return Err(Error::DivisionByZero(b.to_string()));
                }
                if let Some(g) = opts.guard {
                    if bv.magnitude() < g.min_denominator {
                        return Err(Error::Pole(b.to_string()));
                    }
                }
            }
            bv.pow_rational(*p).map_err(Error::Domain)?
        }
        ExprKind::Elem(k, a) => {
            let av = go(a, env, opts, memo)?;
            if let Some(g) = opts.guard {
                if av.magnitude() > g.max_hyperbolic_arg {
                    return Err(Error::Pole(format!("{}({a})", k.name())));
                }
            }
            match k {
                Elementary::Tanh => av.tanh(),
                Elementary::Sech => av.sech(),
                Elementary::Sinh => av.sinh(),
                Elementary::Cosh => av.cosh(),
                Elementary::Exp => av.exp(),
            }
        }
    };
    if !v.is_finite() {
        return Err(Error::Domain(format!("non-finite value of {e}")));
    }
    memo.insert(e.clone(), v);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::{Complex64, Dd};

    fn env<S: Scalar>(pairs: &[(&str, f64)]) -> BTreeMap<Symbol, S> {
        pairs.iter().map(|(n, v)| (Symbol::var(n), S::from_f64(*v))).collect()
    }

    #[test]
    fn evaluates_in_every_precision() {
        let e = parse("x*y/(6*t) + tanh(x)^2").unwrap();
        let pt = [("x", 0.5), ("y", 1.5), ("t", 2.0)];
        let want = 0.5 * 1.5 / 12.0 + 0.5f64.tanh().powi(2);
        let a: f64 = eval_numeric(&e, &env(&pt), &EvalOptions::default()).unwrap();
        let b: f32 = eval_numeric(&e, &env(&pt), &EvalOptions::default()).unwrap();
        let c: Dd = eval_numeric(&e, &env(&pt), &EvalOptions::default()).unwrap();
        assert!((a - want).abs() < 1e-15);
        assert!((b as f64 - want).abs() < 1e-6);
        assert!((c.to_f64() - want).abs() < 1e-15);
    }

    #[test]
    fn imaginary_unit_needs_complex() {
        let e = parse("I^2 + 1").unwrap();
        assert!(e.is_zero());
        let e = parse("I*x").unwrap();
        assert!(eval_numeric::<f64>(&e, &env(&[("x", 1.0)]), &EvalOptions::default()).is_err());
        let z: Complex64 = eval_numeric(&e, &env(&[("x", 2.0)]), &EvalOptions::default()).unwrap();
        assert_eq!(z, Complex64::new(0.0, 2.0));
    }

    #[test]
    fn guard_rejects_near_poles() {
        let e = parse("1/(x - 1)").unwrap();
        let p = env::<f64>(&[("x", 1.0 + 1e-4)]);
        assert!(eval_numeric(&e, &p, &EvalOptions::default()).is_ok());
        assert!(matches!(eval_numeric(&e, &p, &EvalOptions::guarded()), Err(Error::Pole(_))));
        let e = parse("sqrt(x)").unwrap();
        assert!(matches!(eval_numeric(&e, &env::<f64>(&[("x", -1.0)]), &EvalOptions::default()), Err(Error::Domain(_))));
    }
}
