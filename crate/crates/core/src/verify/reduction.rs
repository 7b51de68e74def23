//! Similarity reductions: substituting an ansatz into an equation and
//! checking that the result is a multiple of a claimed reduced equation.

use std::collections::BTreeMap;

use serde::Serialize;

use super::residual::{instantiate_unknowns, is_singular, salt, sum_and_scale, NumericJets, Sampling};
use crate::expr::{eval_numeric, parse_with, EvalOptions, Expr, ExprKind, MultiIndex, ParseContext, Substitution};
use crate::jet::Pde;
use crate::normal::{normalize, Atom, Monomial, NormalForm};
use crate::{Error, Result, Symbol};

/// `base` with `unknown_of_base = ansatz`, where the ansatz is written in
/// terms of an unknown function of the new variables.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub base: Pde,
    pub function: Symbol,
    /// New variables with their definitions over the base variables.
    pub defs: Vec<(Symbol, Expr)>,
    /// The ansatz with definitions substituted into the function's arguments.
    pub ansatz: Expr,
    pub claim: Pde,
    /// Expected `Δ_base[ansatz] / claim`, over new and base variables.
    pub multiplier: Option<Expr>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionReport {
    /// The similarity variables have a nonvanishing Jacobian minor at a
    /// sampled point.
    pub independent: bool,
    pub proportional: bool,
    /// `Δ_base[ansatz] / claim` over the base variables.
    pub multiplier: Option<String>,
    /// Whether the computed multiplier equals the expected one.
    pub multiplier_matches: Option<bool>,
    /// Largest `|Δ − m·C| / (Σ|Δᵢ| + |m| Σ|Cᵢ|)` with the function replaced by
    /// a fixed test function.
    pub numeric_max: Option<f64>,
    pub samples: usize,
    pub rejected: usize,
}

impl ReductionReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.independent && self.proportional && self.multiplier_matches != Some(false) && self.numeric_max.map_or(false, |m| m <= tol)
    }
}

/// Split `X = ...; Y = ...` into name/definition pairs.
pub fn parse_defs(text: &str, ctx: &ParseContext) -> Result<Vec<(Symbol, Expr)>> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|d| {
            let (name, rhs) =
                d.split_once('=').ok_or_else(|| Error::Invalid(format!("variable definition `{d}` needs `=`")))?;
            Ok((Symbol::var(name.trim()), parse_with(rhs.trim(), ctx)?))
        })
        .collect()
}

impl Reduction {
    /// `defs` are over the base variables; `ansatz` names `function` with the
    /// new variables as its arguments, in order; `claim` is an equation for
    /// `function` over the new variables; `multiplier` may use both.
    pub fn new(base: Pde, function: &str, defs: &str, ansatz: &str, claim: &str, multiplier: Option<&str>) -> Result<Self> {
        let base_vars: Vec<&str> = base.vars.iter().map(Symbol::name).collect();
        let ctx = ParseContext::empty().with_dep(base.dep.name(), &base_vars).with_functions(&[function]);
        let defs = parse_defs(defs, &ctx)?;
        let new_vars: Vec<&str> = defs.iter().map(|(s, _)| s.name()).collect();
        let mut to_base = Substitution::new();
        for (s, d) in &defs {
            to_base = to_base.sym(s, d.clone());
        }
        let raw = parse_with(ansatz, &ctx)?;
        let mut args_ok = true;
        raw.visit(&mut |n| {
            if let ExprKind::Func(app) = n.kind() {
                let names: Vec<Option<&str>> = app.args.iter().map(|a| a.as_symbol().map(Symbol::name)).collect();
                args_ok &= app.name.name() == function && names == new_vars.iter().map(|v| Some(*v)).collect::<Vec<_>>();
            }
        });
        if !args_ok {
            return Err(Error::Invalid(format!(
                "ansatz must apply `{function}` to ({}) exactly",
                new_vars.join(", ")
            )));
        }
        let ansatz = to_base.apply(&raw)?;
        let claim = Pde::new(&new_vars, function, claim)?;
        let multiplier = match multiplier {
            Some(m) => Some(parse_with(m, &ctx.clone().with_independents(&new_vars))?),
            None => None,
        };
        Ok(Reduction { base, function: Symbol::var(function), defs, ansatz, claim, multiplier })
    }

    fn def_nfs(&self) -> Result<Vec<NormalForm>> {
        self.defs.iter().map(|(_, d)| normalize(d)).collect()
    }

    /// Express a quantity over the new variables in the base variables.
    fn to_base(&self, e: &NormalForm) -> Result<NormalForm> {
        let defs = self.def_nfs()?;
        let pairs: Vec<(Symbol, NormalForm)> =
            self.defs.iter().zip(defs).map(|((s, _), d)| (s.clone(), d)).collect();
        e.subs_syms(&pairs)
    }

    /// The base-variable solution obtained by putting `solution`, a closed form
    /// over the new variables, into the ansatz.
    pub fn lift(&self, solution: &Expr) -> Result<Expr> {
        let params = self.defs.iter().map(|(s, _)| s.clone()).collect();
        Substitution::new().func(&self.function, params, solution.clone()).apply(&self.ansatz)
    }

    /// `Δ_base[ansatz]` with the function's derivatives as function atoms.
    pub fn substituted(&self) -> Result<NormalForm> {
        let u = normalize(&self.ansatz)?;
        let mut cache: BTreeMap<MultiIndex, NormalForm> = BTreeMap::new();
        cache.insert(MultiIndex::zero(self.base.vars.len()), u);
        let mut values = BTreeMap::new();
        for a in self.base.delta_nf.atoms() {
            if let Atom::Jet(j) = a {
                let d = nf_derivative(&mut cache, &j.index, &self.base.vars)?;
                values.insert(j, d);
            }
        }
        self.base.delta_nf.substitute_atoms(&|a| match a {
            Atom::Jet(j) => values.get(j).cloned(),
            _ => None,
        })
    }

    /// The claim over the base variables, jets becoming function atoms.
    pub fn claim_in_base(&self) -> Result<NormalForm> {
        let defs = self.def_nfs()?;
        let names: BTreeMap<&Symbol, &NormalForm> = self.defs.iter().map(|(s, _)| s).zip(&defs).collect();
        let f = self.function.clone();
        self.claim.delta_nf.substitute_atoms(&|a| match a {
            Atom::Jet(j) => Some(NormalForm::atom(Atom::func(f.clone(), j.index.clone(), defs.clone()))),
            Atom::Sym(s) => names.get(s).map(|v| (*v).clone()),
            _ => None,
        })
    }

    /// Exact check. Returns whether `Δ_base[ansatz]` is a multiple of the
    /// claim, the multiplier, and whether it equals the expected one.
    pub fn check_symbolic(&self) -> Result<(bool, Option<NormalForm>, Option<bool>)> {
        let r = self.substituted()?;
        let c = self.claim_in_base()?;
        let name = self.function.clone();
        let is_f = move |a: &Atom| a.as_func().map_or(false, |fa| fa.name == name);
        let cc_map = c.collect(&is_f);
        let key: Option<&Monomial> = cc_map
            .keys()
            .max_by_key(|m| (m.factors().iter().map(|(a, _)| a.as_func().map_or(0, |f| f.deriv.order())).sum::<usize>(), (*m).clone()));
        let Some(key) = key else {
            return Err(Error::Invalid("claimed equation does not involve the unknown function".into()));
        };
        let cc = cc_map[key].clone();
        let cr = r.collect(&is_f).remove(key).unwrap_or_else(NormalForm::zero);
        let diff = r.mul(&cc)? - cr.mul(&c)?;
        let proportional = diff.is_identically_zero()? && !cr.is_zero();
        if !proportional {
            return Ok((false, None, None));
        }
        let m = cr.mul(&cc.pow(crate::Exponent::from_integer(-1))?)?;
        let matches = match &self.multiplier {
            Some(e) => {
                let e = self.to_base(&normalize(e)?)?;
                Some((cr - e.mul(&cc)?).is_identically_zero()?)
            }
            None => None,
        };
        Ok((true, Some(m), matches))
    }

    /// Sampled check with the function replaced by a test function. Uses the
    /// expected multiplier when there is one, else `symbolic`.
    pub fn check_numeric(
        &self,
        symbolic: Option<&NormalForm>,
        sampling: &Sampling,
        name: &str,
    ) -> Result<(Option<f64>, usize, usize)> {
        let base_f = instantiate_unknowns(&self.ansatz)?;
        let new_vars: Vec<Symbol> = self.defs.iter().map(|(s, _)| s.clone()).collect();
        let claim_f = instantiate_unknowns(&Expr::func(&self.function, new_vars.iter().map(Expr::sym).collect()))?;
        let base_jets = NumericJets::new(&self.base, &base_f);
        let claim_jets = NumericJets::new(&self.claim, &claim_f);
        let mut syms: Vec<Symbol> = base_f.free_symbols();
        for e in self.defs.iter().map(|(_, d)| d).chain(self.multiplier.iter()) {
            syms.extend(e.free_symbols());
        }
        syms.extend(self.claim.delta.free_symbols());
        syms.extend(self.base.delta.free_symbols());
        syms.extend(self.base.vars.iter().cloned());
        syms.retain(|s| !new_vars.contains(s) && !s.name().starts_with("_a"));
        syms.sort();
        syms.dedup();
        let m_base = symbolic.map(NormalForm::to_expr);
        let opts = EvalOptions::guarded();
        let mut worst: Option<f64> = None;
        let (mut samples, mut rejected) = (0, 0);
        for p in sampling.draw(&syms, salt(name), sampling.points * 4) {
            if samples == sampling.points {
                break;
            }
            let mut env: BTreeMap<Symbol, f64> = p;
            let step = (|| -> Result<f64> {
                for (s, d) in &self.defs {
                    let v = eval_numeric(d, &env, &opts)?;
                    env.insert(s.clone(), v);
                }
                let (sd, ad) = sum_and_scale(&base_jets.terms(&self.base, &env)?);
                let (sc, ac) = sum_and_scale(&claim_jets.terms(&self.claim, &env)?);
                let m = match (&self.multiplier, &m_base) {
                    (Some(e), _) | (None, Some(e)) => eval_numeric(e, &env, &opts)?,
                    (None, None) => 1.0,
                };
                let scale = ad + m.abs() * ac;
                Ok(if scale == 0.0 { 0.0 } else { (sd - m * sc).abs() / scale })
            })();
            match step {
                Ok(r) => {
                    samples += 1;
                    worst = Some(worst.map_or(r, |w| w.max(r)));
                }
                Err(e) if is_singular(&e) => rejected += 1,
                Err(e) => return Err(e),
            }
        }
        Ok((worst, samples, rejected))
    }

    /// Whether the Jacobian of the definitions has full rank at some sampled
    /// point.
    pub fn variables_independent(&self, sampling: &Sampling, name: &str) -> Result<bool> {
        let jac: Vec<Vec<Expr>> =
            self.defs.iter().map(|(_, d)| self.base.vars.iter().map(|v| d.differentiate(v)).collect()).collect();
        let mut syms: Vec<Symbol> = self.defs.iter().flat_map(|(_, d)| d.free_symbols()).collect();
        syms.sort();
        syms.dedup();
        let opts = EvalOptions::guarded();
        for p in sampling.draw(&syms, salt(name) ^ 0x1ac0, 8) {
            let m: Result<Vec<Vec<f64>>> =
                jac.iter().map(|row| row.iter().map(|e| eval_numeric(e, &p, &opts)).collect()).collect();
            match m {
                Ok(m) => {
                    if numeric_rank(m) == self.defs.len() {
                        return Ok(true);
                    }
                }
                Err(e) if is_singular(&e) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(false)
    }

    pub fn check(&self, sampling: &Sampling, name: &str) -> Result<ReductionReport> {
        let independent = self.variables_independent(sampling, name)?;
        let (proportional, m, matches) = self.check_symbolic()?;
        let (numeric_max, samples, rejected) = self.check_numeric(m.as_ref(), sampling, name)?;
        Ok(ReductionReport {
            independent,
            proportional,
            multiplier: m.map(|m| m.to_string()),
            multiplier_matches: matches,
            numeric_max,
            samples,
            rejected,
        })
    }
}

pub(crate) fn nf_derivative(
    cache: &mut BTreeMap<MultiIndex, NormalForm>,
    idx: &MultiIndex,
    vars: &[Symbol],
) -> Result<NormalForm> {
    if let Some(v) = cache.get(idx) {
        return Ok(v.clone());
    }
    let i = (0..idx.len()).rev().find(|&i| idx.0[i] > 0).expect("nonzero index");
    let mut lower = idx.clone();
    lower.0[i] -= 1;
    let prev = nf_derivative(cache, &lower, vars)?;
    let d = prev.diff_sym(&vars[i])?;
    cache.insert(idx.clone(), d.clone());
    Ok(d)
}

/// Rank by Gaussian elimination with partial pivoting.
fn numeric_rank(mut m: Vec<Vec<f64>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    let eps = 1e-9 * scale.max(1e-300);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())) else {
            break;
        };
        if m[p][c].abs() <= eps {
            continue;
        }
        m.swap(rank, p);
        for i in rank + 1..m.len() {
            let f = m[i][c] / m[rank][c];
            for k in c..cols {
                m[i][k] -= f * m[rank][k];
            }
        }
        rank += 1;
    }
    rank
}
