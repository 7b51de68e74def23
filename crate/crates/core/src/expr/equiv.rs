//! Randomised numeric equivalence of closed expressions.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{eval_numeric, EvalOptions, Expr, Symbol};
use crate::{Complex64, Error, Result};

#[derive(Clone, Debug)]
pub struct EquivOptions {
    pub trials: usize,
    /// Relative tolerance `|a - b| <= tol * (1 + max(|a|, |b|))`.
    pub tol: f64,
    pub seed: u64,
    /// Default sampling interval for every free symbol.
    pub range: (f64, f64),
    /// Per-symbol overrides of `range`.
    pub ranges: BTreeMap<Symbol, (f64, f64)>,
}

impl Default for EquivOptions {
    fn default() -> Self {
        EquivOptions { trials: 16, tol: 1e-9, seed: 0, range: (0.5, 1.5), ranges: BTreeMap::new() }
    }
}

/// `true` when `a` and `b` agree at every non-singular random point.
/// Evaluation is complex so expressions with `I` are accepted.
pub fn random_equiv(a: &Expr, b: &Expr, opts: &EquivOptions) -> Result<bool> {
    let mut syms = a.free_symbols();
    syms.extend(b.free_symbols());
    syms.sort();
    syms.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let eopts = EvalOptions::guarded();
    let mut good = 0;
    for _ in 0..opts.trials * 4 {
        if good == opts.trials {
            break;
        }
        let env: BTreeMap<Symbol, Complex64> = syms
            .iter()
            .map(|s| {
                let (lo, hi) = opts.ranges.get(s).copied().unwrap_or(opts.range);
                (s.clone(), Complex64::new(rng.gen_range(lo..hi), 0.0))
            })
            .collect();
        let (va, vb) = match (eval_numeric(a, &env, &eopts), eval_numeric(b, &env, &eopts)) {
            (Ok(x), Ok(y)) => (x, y),
            (Err(e @ (Error::UnboundSymbol(_) | Error::NotNumeric(_))), _)
            | (_, Err(e @ (Error::UnboundSymbol(_) | Error::NotNumeric(_)))) => return Err(e),
            _ => continue,
        };
        good += 1;
        if (va - vb).norm() > opts.tol * (1.0 + va.norm().max(vb.norm())) {
            return Ok(false);
        }
    }
    if good == 0 {
        return Err(Error::AllSingular(opts.trials * 4));
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn hyperbolic_identity_holds_numerically() {
        let a = parse("tanh(x)^2 + sech(x)^2").unwrap();
        assert!(random_equiv(&a, &Expr::one(), &EquivOptions::default()).unwrap());
        let b = parse("tanh(x)^2").unwrap();
        assert!(!random_equiv(&a, &b, &EquivOptions::default()).unwrap());
    }
}
