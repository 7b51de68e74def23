//! Jet-space bookkeeping: total derivatives, prolongation and the
//! symmetry condition of a scalar PDE.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::Zero;

use crate::expr::{parse_with, Expr, JetVar, MultiIndex, ParseContext, Symbol, SymbolKind};
use crate::normal::{normalize, Atom, NormalForm};
use crate::{Error, Rational, Result};

/// A scalar PDE `Δ = 0` in one dependent variable.
#[derive(Clone, Debug)]
pub struct Pde {
    pub vars: Arc<[Symbol]>,
    pub dep: Symbol,
    pub delta: Expr,
    pub delta_nf: NormalForm,
    pub order: usize,
}

impl Pde {
    pub fn new(vars: &[&str], dep: &str, delta: &str) -> Result<Pde> {
        let ctx = ParseContext::empty().with_dep(dep, vars);
        let delta = parse_with(delta, &ctx)?;
        Pde::from_expr(vars, dep, delta)
    }

    pub fn from_expr(vars: &[&str], dep: &str, delta: Expr) -> Result<Pde> {
        if delta.has_functions() {
            return Err(Error::Invalid("PDE contains unknown functions".into()));
        }
        let delta_nf = normalize(&delta)?;
        let order = delta.jet_vars().iter().map(JetVar::order).max().unwrap_or(0);
        Ok(Pde {
            vars: vars.iter().map(|v| Symbol::var(v)).collect(),
            dep: Symbol::new(dep, SymbolKind::Independent),
            delta,
            delta_nf,
            order,
        })
    }

    /// Read the `vars` / `dep` / `eq` text format.
    pub fn from_text(text: &str) -> Result<Pde> {
        let mut vars: Option<Vec<String>> = None;
        let mut dep: Option<String> = None;
        let mut eq = String::new();
        let mut in_eq = false;
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            match key {
                "vars" => {
                    vars = Some(rest.split_whitespace().map(str::to_string).collect());
                    in_eq = false;
                }
                "dep" => {
                    dep = Some(rest.trim().to_string());
                    in_eq = false;
                }
                "eq" => {
                    eq = rest.to_string();
                    in_eq = true;
                }
                _ if in_eq => {
                    eq.push(' ');
                    eq.push_str(line);
                }
                _ => return Err(Error::Invalid(format!("unknown PDE file section `{key}`"))),
            }
        }
        let vars = vars.ok_or_else(|| Error::Invalid("PDE file lacks a `vars` line".into()))?;
        let dep = dep.ok_or_else(|| Error::Invalid("PDE file lacks a `dep` line".into()))?;
        if eq.trim().is_empty() {
            return Err(Error::Invalid("PDE file lacks an `eq` line".into()));
        }
        let v: Vec<&str> = vars.iter().map(String::as_str).collect();
        Pde::new(&v, &dep, &eq)
    }

    pub fn parse_context(&self) -> ParseContext {
        let v: Vec<&str> = self.vars.iter().map(Symbol::name).collect();
        ParseContext::empty().with_dep(self.dep.name(), &v)
    }

    pub fn jet(&self, index: MultiIndex) -> JetVar {
        JetVar::new(self.dep.clone(), self.vars.clone(), index)
    }

    pub fn base(&self) -> JetVar {
        JetVar::base(self.dep.clone(), self.vars.clone())
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name() == name)
    }

    /// Coordinates `(x¹..xⁿ, u)` of the base space, all as plain symbols.
    /// Variable whose first derivative appears in `Δ` only as a bare term
    /// `c·u_v`, preferring the last one; `Δ = 0` is solved for it on shell.
    pub fn lead_var(&self) -> Option<&Symbol> {
        (0..self.vars.len())
            .rev()
            .find(|&i| {
                let mut idx = MultiIndex::zero(self.vars.len());
                idx.0[i] = 1;
                let a = Atom::Jet(self.jet(idx));
                let mut found = false;
                for (m, _) in self.delta_nf.terms() {
                    let e = m.exponent_of(&a);
                    if e.is_zero() {
                        continue;
                    }
                    if e != crate::Exponent::from_integer(1) || !m.without(&a).is_one() {
                        return false;
                    }
                    found = true;
                }
                found
            })
            .map(|i| &self.vars[i])
    }

    pub fn coordinates(&self) -> Vec<Symbol> {
        let mut c: Vec<Symbol> = self.vars.to_vec();
        c.push(Symbol::var(self.dep.name()));
        c
    }
}

/// Total derivative operators `D_i` over a fixed list of independent
/// variables, with memoised derivatives of composite atoms.
pub struct TotalDerivative {
    vars: Arc<[Symbol]>,
    memo: Vec<HashMap<Atom, NormalForm>>,
}

impl TotalDerivative {
    pub fn new(vars: Arc<[Symbol]>) -> Self {
        let n = vars.len();
        TotalDerivative { vars, memo: vec![HashMap::new(); n] }
    }

    pub fn apply(&mut self, f: &NormalForm, i: usize) -> Result<NormalForm> {
        let v = self.vars[i].clone();
        let leaf = move |a: &Atom| match a {
            Atom::Sym(s) if *s == v => Some(NormalForm::one()),
            Atom::Jet(j) => j.var_position(&v).map(|p| NormalForm::jet(&j.derivative(p))),
            _ => None,
        };
        f.derive_memo(&leaf, &mut self.memo[i])
    }

    pub fn apply_multi(&mut self, f: &NormalForm, index: &MultiIndex) -> Result<NormalForm> {
        let mut out = f.clone();
        for (i, &c) in index.0.iter().enumerate() {
            for _ in 0..c {
                out = self.apply(&out, i)?;
            }
        }
        Ok(out)
    }
}

/// `D_i e` for a single direction, without persistent memo.
pub fn total_derivative(e: &NormalForm, var: &Symbol, vars: &Arc<[Symbol]>) -> Result<NormalForm> {
    let i = vars.iter().position(|v| v == var).ok_or_else(|| Error::Invalid(format!("{var} is not independent")))?;
    TotalDerivative::new(vars.clone()).apply(e, i)
}

/// Point vector field `Σ ξ^i ∂_{x^i} + η ∂_u` with coefficients written over
/// the base coordinates as plain symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub xi: Vec<NormalForm>,
    pub eta: NormalForm,
}

impl VectorField {
    pub fn new(xi: Vec<NormalForm>, eta: NormalForm) -> Self {
        VectorField { xi, eta }
    }

    /// Parse `(c1, ..., cn, c_u)`.
    pub fn parse(text: &str, pde: &Pde) -> Result<VectorField> {
        let t = text.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| Error::Invalid(format!("vector field `{t}` is not a parenthesised tuple")))?;
        let ctx = ParseContext::empty().with_independents(&pde.coordinates().iter().map(Symbol::name).collect::<Vec<_>>());
        let parts = split_top_level(inner);
        if parts.len() != pde.vars.len() + 1 {
            return Err(Error::Invalid(format!("vector field needs {} components", pde.vars.len() + 1)));
        }
        let mut comps = parts
            .iter()
            .map(|p| parse_with(p, &ctx).map_err(Error::from).and_then(|e| normalize(&e)))
            .collect::<Result<Vec<_>>>()?;
        let eta = comps.pop().unwrap();
        Ok(VectorField { xi: comps, eta })
    }

    pub fn components(&self) -> Vec<NormalForm> {
        let mut c = self.xi.clone();
        c.push(self.eta.clone());
        c
    }

    pub fn from_components(mut c: Vec<NormalForm>) -> Self {
        let eta = c.pop().unwrap_or_default();
        VectorField { xi: c, eta }
    }

    pub fn is_zero(&self) -> bool {
        self.xi.iter().all(NormalForm::is_zero) && self.eta.is_zero()
    }

    pub fn scale(&self, c: &Rational) -> VectorField {
        VectorField { xi: self.xi.iter().map(|x| x.scale(c)).collect(), eta: self.eta.scale(c) }
    }

    /// Tuple display `(x/4, y/2, 0, t, -u/4)`.
    pub fn display(&self) -> String {
        let parts: Vec<String> = self.components().iter().map(|c| c.to_string()).collect();
        format!("({})", parts.join(", "))
    }

    /// Coefficients with the dependent variable lifted to its jet.
    fn on_jet(&self, pde: &Pde) -> Result<(Vec<NormalForm>, NormalForm)> {
        let u = Symbol::var(pde.dep.name());
        let uj = NormalForm::jet(&pde.base());
        let lift = |f: &NormalForm| f.subs_syms(&[(u.clone(), uj.clone())]);
        Ok((self.xi.iter().map(lift).collect::<Result<_>>()?, lift(&self.eta)?))
    }
}

pub(crate) fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

/// Generic point field whose coefficients are the unknown functions
/// `xi1..xin(x, .., u)` and `eta(x, .., u)`.
pub fn generic_field(pde: &Pde) -> VectorField {
    let mut args: Vec<NormalForm> = pde.vars.iter().map(NormalForm::sym).collect();
    args.push(NormalForm::sym(&Symbol::var(pde.dep.name())));
    let f = |name: &str| {
        NormalForm::atom(Atom::func(Symbol::param(name), MultiIndex::zero(args.len()), args.clone()))
    };
    let xi = (1..=pde.vars.len()).map(|i| f(&format!("xi{i}"))).collect();
    VectorField { xi, eta: f("eta") }
}

/// Prolongation of a vector field, with coefficients `η^J` memoised by
/// multi-index.
pub struct Prolongation<'a> {
    pde: &'a Pde,
    xi: Vec<NormalForm>,
    td: TotalDerivative,
    dxi: HashMap<(usize, usize), NormalForm>,
    coeffs: BTreeMap<MultiIndex, NormalForm>,
}

impl<'a> Prolongation<'a> {
    pub fn new(v: &VectorField, pde: &'a Pde) -> Result<Self> {
        let (xi, eta) = v.on_jet(pde)?;
        let mut coeffs = BTreeMap::new();
        coeffs.insert(MultiIndex::zero(pde.vars.len()), eta);
        Ok(Prolongation { pde, xi, td: TotalDerivative::new(pde.vars.clone()), dxi: HashMap::new(), coeffs })
    }

    fn d_xi(&mut self, i: usize, k: usize) -> Result<NormalForm> {
        if let Some(v) = self.dxi.get(&(i, k)) {
            return Ok(v.clone());
        }
        let d = self.td.apply(&self.xi[k].clone(), i)?;
        self.dxi.insert((i, k), d.clone());
        Ok(d)
    }

    /// `η^J`, built by `η^{J+e_i} = D_i η^J − Σ_k u_{J+e_k} D_i ξ^k` where
    /// `i` is the last direction with a nonzero count in `J`.
    pub fn coefficient(&mut self, j: &MultiIndex) -> Result<NormalForm> {
        if let Some(c) = self.coeffs.get(j) {
            return Ok(c.clone());
        }
        let i = (0..j.len()).rev().find(|&i| j.0[i] > 0).expect("zero index is seeded");
        let mut prev_idx = j.clone();
        prev_idx.0[i] -= 1;
        let prev = self.coefficient(&prev_idx)?;
        let mut out = self.td.apply(&prev, i)?;
        for k in 0..self.xi.len() {
            let dk = self.d_xi(i, k)?;
            if dk.is_zero() {
                continue;
            }
            let ujk = NormalForm::jet(&self.pde.jet(prev_idx.bumped(k)));
            out = out - ujk.mul(&dk)?;
        }
        self.coeffs.insert(j.clone(), out.clone());
        Ok(out)
    }

    pub fn xi(&self) -> &[NormalForm] {
        &self.xi
    }
}

/// `pr V(Δ)`, the prolonged field applied to the PDE.
pub fn symmetry_condition(v: &VectorField, pde: &Pde) -> Result<NormalForm> {
    let mut pr = Prolongation::new(v, pde)?;
    let delta = &pde.delta_nf;
    let mut out = NormalForm::zero();
    for (k, var) in pde.vars.iter().enumerate() {
        let d = delta.diff_sym(var)?;
        if !d.is_zero() {
            out = out + pr.xi()[k].mul(&d)?;
        }
    }
    let jets: Vec<JetVar> = delta.atoms().into_iter().filter_map(|a| a.as_jet().cloned()).collect();
    for j in jets {
        let target = Atom::Jet(j.clone());
        let d = delta.derive(&|a| if *a == target { Some(NormalForm::one()) } else { None })?;
        let c = pr.coefficient(&j.index)?;
        out = out + c.mul(&d)?;
    }
    Ok(out)
}

/// Substitute `Δ = 0`, solved for the jet `lead`, together with all its
/// total-derivative consequences.
pub struct OnShell<'a> {
    pde: &'a Pde,
    lead_dir: usize,
    solved: NormalForm,
    td: TotalDerivative,
    cache: BTreeMap<MultiIndex, NormalForm>,
}

impl<'a> OnShell<'a> {
    /// `lead_var` names the direction of the leading derivative (`t` for an
    /// evolution equation in `t`).
    pub fn new(pde: &'a Pde, lead_var: &str) -> Result<Self> {
        let lead_dir = pde.var_index(lead_var).ok_or_else(|| Error::Invalid(format!("no variable {lead_var}")))?;
        let lead = pde.jet(MultiIndex::unit(pde.vars.len(), lead_dir));
        let target = Atom::Jet(lead.clone());
        let coeff = pde.delta_nf.derive(&|a| if *a == target { Some(NormalForm::one()) } else { None })?;
        let c = coeff.constant_value().filter(|c| !c.is_zero());
        let Some(c) = c else {
            return Err(Error::NotLinear(lead.to_string()));
        };
        let rest = &pde.delta_nf - &NormalForm::jet(&lead).scale(&c);
        let others_mention_lead = rest.any_atom(&|a| matches!(a, Atom::Jet(j) if j.index.0[lead_dir] > 0));
        if others_mention_lead {
            return Err(Error::NotLinear(lead.to_string()));
        }
        let solved = rest.scale(&(-c.recip()));
        Ok(OnShell { pde, lead_dir, solved, td: TotalDerivative::new(pde.vars.clone()), cache: BTreeMap::new() })
    }

    fn replacement(&mut self, index: &MultiIndex) -> Result<NormalForm> {
        let mut rest = index.clone();
        rest.0[self.lead_dir] -= 1;
        if let Some(v) = self.cache.get(&rest) {
            return Ok(v.clone());
        }
        let v = if rest.order() == 0 {
            self.solved.clone()
        } else {
            let i = (0..rest.len()).rev().find(|&i| rest.0[i] > 0).unwrap();
            let mut lower = index.clone();
            lower.0[i] -= 1;
            let prev = self.replacement(&lower)?;
            self.td.apply(&prev, i)?
        };
        self.cache.insert(rest, v.clone());
        Ok(v)
    }

    pub fn apply(&mut self, e: &NormalForm) -> Result<NormalForm> {
        let dir = self.lead_dir;
        let mut needed: Vec<MultiIndex> = Vec::new();
        for a in e.atoms() {
            if let Atom::Jet(j) = a {
                if j.dep == self.pde.dep && j.index.0[dir] > 0 {
                    needed.push(j.index.clone());
                }
            }
        }
        let mut map: BTreeMap<MultiIndex, NormalForm> = BTreeMap::new();
        for idx in needed {
            let r = self.replacement(&idx)?;
            map.insert(idx, r);
        }
        let dep = self.pde.dep.clone();
        e.substitute_atoms(&|a| match a {
            Atom::Jet(j) if j.dep == dep => map.get(&j.index).cloned(),
            _ => None,
        })
    }
}

/// `pr V(Δ)` restricted to `Δ = 0`, eliminating the `lead_var` derivative.
pub fn on_shell_condition(v: &VectorField, pde: &Pde, lead_var: &str) -> Result<NormalForm> {
    let cond = symmetry_condition(v, pde)?;
    OnShell::new(pde, lead_var)?.apply(&cond)
}

/// Whether `v` is a point symmetry of `pde`.
pub fn is_symmetry(v: &VectorField, pde: &Pde, lead_var: &str) -> Result<bool> {
    on_shell_condition(v, pde, lead_var)?.is_identically_zero()
}

/// Rational helper for tests and callers.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

#[cfg(test)]
pub(crate) mod tests;
