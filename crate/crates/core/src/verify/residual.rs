//! Residuals of candidate solutions, decided symbolically and sampled
//! numerically.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::expr::{eval_numeric, EvalOptions, Expr, ExprKind, JetVar, MultiIndex, Substitution, Symbol};
use crate::jet::Pde;
use crate::normal::{normalize, Atom, NormalForm};
use crate::expr::parse;
use crate::{Complex64, Dd, Error, Rational, Result, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Double,
    #[serde(rename = "dd")]
    DoubleDouble,
    Complex,
}

impl std::str::FromStr for Precision {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "double" => Ok(Precision::Double),
            "dd" | "double-double" => Ok(Precision::DoubleDouble),
            "complex" => Ok(Precision::Complex),
            _ => Err(Error::Invalid(format!("unknown precision `{s}` (double, dd, complex)"))),
        }
    }
}

impl std::fmt::Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Precision::Double => "double",
            Precision::DoubleDouble => "dd",
            Precision::Complex => "complex",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolicVerdict {
    Zero,
    Nonzero,
    Undecided,
}

/// Where and how densely to sample.
#[derive(Clone, Debug)]
pub struct Sampling {
    pub points: usize,
    pub seed: u64,
    pub tol: f64,
    pub precision: Precision,
    pub default_range: (f64, f64),
    pub ranges: BTreeMap<Symbol, (f64, f64)>,
    pub fixed: BTreeMap<Symbol, f64>,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            points: 100,
            seed: 0,
            tol: 1e-9,
            precision: Precision::Double,
            default_range: (0.5, 1.5),
            ranges: BTreeMap::new(),
            fixed: BTreeMap::new(),
        }
    }
}

impl Sampling {
    /// Seeded points over `syms`; fixed values override ranges.
    pub fn draw(&self, syms: &[Symbol], salt: u64, count: usize) -> Vec<BTreeMap<Symbol, f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ salt);
        (0..count)
            .map(|_| {
                syms.iter()
                    .map(|s| {
                        let v = match self.fixed.get(s) {
                            Some(v) => *v,
                            None => {
                                let (lo, hi) = self.ranges.get(s).copied().unwrap_or(self.default_range);
                                rng.gen_range(lo..hi)
                            }
                        };
                        (s.clone(), v)
                    })
                    .collect()
            })
            .collect()
    }
}

/// Stable 64-bit FNV-1a, used to give each catalog entry its own stream.
pub fn salt(name: &str) -> u64 {
    name.bytes().fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub symbolic: SymbolicVerdict,
    /// Largest relative residual `|Σ tᵢ| / Σ |tᵢ|` over the terms of the
    /// equation; `None` when nothing could be sampled.
    pub numeric_max: Option<f64>,
    pub samples: usize,
    pub rejected: usize,
    pub precision: Precision,
    /// Symbolic residual after clearing denominators, when nonzero.
    #[serde(skip)]
    pub residual: Option<NormalForm>,
}

impl ResidualReport {
    pub fn numeric_pass(&self, tol: f64) -> bool {
        self.numeric_max.map_or(false, |m| m <= tol)
    }
}

/// `Δ[f]` as a normal form with denominators cleared.
pub fn symbolic_residual(pde: &Pde, f: &NormalForm) -> Result<NormalForm> {
    let mut cache: BTreeMap<MultiIndex, NormalForm> = BTreeMap::new();
    cache.insert(MultiIndex::zero(pde.vars.len()), f.clone());
    let jets: BTreeSet<JetVar> = pde.delta_nf.atoms().into_iter().filter_map(|a| a.as_jet().cloned()).collect();
    let mut values: BTreeMap<JetVar, NormalForm> = BTreeMap::new();
    for j in jets {
        let d = super::reduction::nf_derivative(&mut cache, &j.index, &pde.vars)?;
        values.insert(j, d);
    }
    let r = pde.delta_nf.substitute_atoms(&|a| match a {
        Atom::Jet(j) => values.get(j).cloned(),
        _ => None,
    })?;
    r.numerator()
}

fn tree_derivative(cache: &mut BTreeMap<MultiIndex, Expr>, idx: &MultiIndex, vars: &[Symbol]) -> Expr {
    if let Some(v) = cache.get(idx) {
        return v.clone();
    }
    let i = (0..idx.len()).rev().find(|&i| idx.0[i] > 0).unwrap();
    let mut lower = idx.clone();
    lower.0[i] -= 1;
    let d = tree_derivative(cache, &lower, vars).differentiate(&vars[i]);
    cache.insert(idx.clone(), d.clone());
    d
}

/// Unknown functions in a tree, with their arities.
pub fn unknown_functions(e: &Expr) -> BTreeMap<Symbol, usize> {
    let mut out = BTreeMap::new();
    e.visit(&mut |n| {
        if let ExprKind::Func(app) = n.kind() {
            out.insert(app.name.clone(), app.args.len());
        }
    });
    out
}

/// Replace each unknown function by a fixed smooth test function
/// `tanh(Σ aₖ/(k+2)) + (Π aₖ)/5` so that formal solutions can be sampled.
pub fn instantiate_unknowns(e: &Expr) -> Result<Expr> {
    let funcs = unknown_functions(e);
    if funcs.is_empty() {
        return Ok(e.clone());
    }
    let mut sub = Substitution::new();
    for (name, arity) in funcs {
        let params: Vec<Symbol> = (0..arity).map(|k| Symbol::param(&format!("_a{k}"))).collect();
        let lin = Expr::add_all(params.iter().enumerate().map(|(k, p)| Expr::sym(p) * Expr::frac(1, k as i64 + 2)));
        let prod = Expr::mul_all(params.iter().map(Expr::sym).chain([Expr::frac(1, 5)]));
        sub = sub.func(&name, params, Expr::tanh(lin) + prod);
    }
    sub.apply(e)
}

/// Derivative trees of a candidate, one per jet the equation uses.
pub(crate) struct NumericJets {
    derivs: Vec<(JetVar, Expr)>,
}

impl NumericJets {
    /// `f` must be free of unknown functions.
    pub(crate) fn new(pde: &Pde, f: &Expr) -> Self {
        let mut cache: BTreeMap<MultiIndex, Expr> = BTreeMap::new();
        cache.insert(MultiIndex::zero(pde.vars.len()), f.clone());
        let jets: BTreeSet<JetVar> =
            pde.delta_nf.atoms().into_iter().filter_map(|a| a.as_jet().cloned()).collect();
        let derivs = jets.into_iter().map(|j| (j.clone(), tree_derivative(&mut cache, &j.index, &pde.vars))).collect();
        NumericJets { derivs }
    }

    /// The equation's terms at a point.
    pub(crate) fn terms<S: Scalar>(&self, pde: &Pde, env: &BTreeMap<Symbol, S>) -> Result<Vec<S>> {
        let opts = EvalOptions::guarded();
        let jets: BTreeMap<&JetVar, S> =
            self.derivs.iter().map(|(j, d)| Ok((j, eval_numeric(d, env, &opts)?))).collect::<Result<_>>()?;
        let mut out = Vec::with_capacity(pde.delta_nf.len());
        for (m, c) in pde.delta_nf.terms() {
            let (jet_part, rest) = m.split(&|a| matches!(a, Atom::Jet(_)));
            let mut v = S::from_rational(c);
            if !rest.is_one() {
                v = v * eval_numeric(&rest.to_expr(), env, &opts)?;
            }
            for (a, e) in jet_part.factors() {
                let j = a.as_jet().expect("jet factor");
                let base = *jets.get(j).ok_or_else(|| Error::NotNumeric(j.to_string()))?;
                v = v * base.pow_rational(*e).map_err(Error::Domain)?;
            }
            out.push(v);
        }
        if out.iter().all(|t| t.is_finite()) {
            Ok(out)
        } else {
            Err(Error::Pole("non-finite term".into()))
        }
    }
}

/// `(|Σ tᵢ|, Σ |tᵢ|)`.
pub(crate) fn sum_and_scale<S: Scalar>(ts: &[S]) -> (S, f64) {
    (ts.iter().fold(S::zero(), |a, b| a + *b), ts.iter().map(|t| t.magnitude()).sum())
}

pub(crate) fn is_singular(e: &Error) -> bool {
    matches!(e, Error::Pole(_) | Error::Domain(_) | Error::DivisionByZero(_))
}

/// Relative residual `|Σ tᵢ| / Σ |tᵢ|` at each accepted point. Returns the
/// residuals and the number of rejected points.
pub fn numeric_residuals<S: Scalar>(
    pde: &Pde,
    f: &Expr,
    points: &[BTreeMap<Symbol, f64>],
    wanted: usize,
) -> Result<(Vec<f64>, usize)> {
    let jets = NumericJets::new(pde, &instantiate_unknowns(f)?);
    let mut out = Vec::new();
    let mut rejected = 0;
    for p in points {
        if out.len() == wanted {
            break;
        }
        let env: BTreeMap<Symbol, S> = p.iter().map(|(k, v)| (k.clone(), S::from_f64(*v))).collect();
        match jets.terms(pde, &env) {
            Ok(ts) => {
                let (sum, scale) = sum_and_scale(&ts);
                out.push(if scale == 0.0 { 0.0 } else { sum.magnitude() / scale });
            }
            Err(e) if is_singular(&e) => rejected += 1,
            Err(e) => return Err(e),
        }
    }
    Ok((out, rejected))
}

/// Symbols the residual needs values for: free symbols of `f` plus any
/// explicit coordinates of the equation.
pub fn sample_symbols(pde: &Pde, f: &Expr) -> Vec<Symbol> {
    let mut s: BTreeSet<Symbol> = f.free_symbols().into_iter().collect();
    for (m, _) in pde.delta_nf.terms() {
        for (a, _) in m.factors() {
            if let Atom::Sym(x) = a {
                s.insert(x.clone());
            }
        }
    }
    s.into_iter().filter(|x| !x.name().starts_with("_a")).collect()
}

fn contains_imag(e: &Expr) -> bool {
    let mut found = false;
    e.visit(&mut |n| found |= matches!(n.kind(), ExprKind::Imag));
    found
}

/// Residual of `u = f` in `pde`: symbolic verdict plus seeded sampling.
/// Expressions containing `I` are sampled in complex mode.
pub fn residual(pde: &Pde, f: &Expr, sampling: &Sampling, name: &str) -> Result<ResidualReport> {
    let nf = normalize(f)?;
    let (symbolic, residual) = match symbolic_residual(pde, &nf) {
        Ok(r) if r.is_zero() => (SymbolicVerdict::Zero, None),
        Ok(r) => (SymbolicVerdict::Nonzero, Some(r)),
        Err(Error::ResourceLimit { .. }) => (SymbolicVerdict::Undecided, None),
        Err(e) => return Err(e),
    };
    let precision = if contains_imag(f) { Precision::Complex } else { sampling.precision };
    let syms = sample_symbols(pde, f);
    let points = sampling.draw(&syms, salt(name), sampling.points * 4);
    let (res, rejected) = match precision {
        Precision::Double => numeric_residuals::<f64>(pde, f, &points, sampling.points)?,
        Precision::DoubleDouble => numeric_residuals::<Dd>(pde, f, &points, sampling.points)?,
        Precision::Complex => numeric_residuals::<Complex64>(pde, f, &points, sampling.points)?,
    };
    Ok(ResidualReport {
        symbolic,
        numeric_max: res.iter().copied().fold(None, |m, r| Some(m.map_or(r, |m: f64| m.max(r)))),
        samples: res.len(),
        rejected,
        precision,
        residual,
    })
}

/// [`residual`] for a claim `R(w)` of an ordinary differential equation.
pub fn ode_residual(ode: &Pde, claim: &Expr, sampling: &Sampling, name: &str) -> Result<ResidualReport> {
    if ode.vars.len() != 1 {
        return Err(Error::Invalid(format!("ode_residual needs one independent variable, got {}", ode.vars.len())));
    }
    residual(ode, claim, sampling, name)
}

/// Pseudo-remainder of `p` by `c`, both viewed as polynomials in `var`.
/// Zero means `c = 0` forces `p = 0` (where the leading coefficient of `c`
/// does not vanish).
pub fn pseudo_remainder(p: &NormalForm, c: &NormalForm, var: &Symbol) -> Result<NormalForm> {
    let coeffs = |f: &NormalForm| -> Result<BTreeMap<i64, NormalForm>> {
        let mut out: BTreeMap<i64, NormalForm> = BTreeMap::new();
        for (m, k) in f.terms() {
            let e = m.exponent_of(&Atom::Sym(var.clone()));
            if !e.is_integer() || e < crate::Exponent::zero() {
                return Err(Error::Invalid(format!("{} is not polynomial in {}", f, var.name())));
            }
            let rest = m.without(&Atom::Sym(var.clone()));
            out.entry(*e.numer()).or_insert_with(NormalForm::zero).add_assign_scaled(&NormalForm::from_monomial(rest), k);
        }
        out.retain(|_, v| !v.is_zero());
        Ok(out)
    };
    let cc = coeffs(c)?;
    let Some((&dc, lc)) = cc.iter().next_back() else {
        return Err(Error::DivisionByZero("pseudo-remainder by zero".into()));
    };
    let lc = lc.clone();
    let x = NormalForm::sym(var);
    let mut r = p.clone();
    for _ in 0..64 {
        let rc = coeffs(&r)?;
        let Some((&dr, lr)) = rc.iter().next_back() else {
            return Ok(r);
        };
        if dr < dc {
            return Ok(r);
        }
        let shift = x.pow(crate::Exponent::from_integer(dr - dc))?;
        r = r.mul(&lc)? - lr.mul(&shift)?.mul(c)?;
    }
    Err(Error::ResourceLimit { limit: 64 })
}

/// Exact rational value of a numeric string such as `1.9872` or `-3/4`.
pub fn parse_number(s: &str) -> Result<f64> {
    let e = parse(s)?;
    let nf = normalize(&e)?;
    let c: Rational = nf.constant_value().filter(|_| nf.is_constant()).ok_or_else(|| Error::Invalid(format!("`{s}` is not a number")))?;
    use num_traits::ToPrimitive;
    c.to_f64().ok_or_else(|| Error::Invalid(format!("`{s}` is out of range")))
}
