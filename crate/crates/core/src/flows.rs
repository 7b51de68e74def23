//! One-parameter groups generated by point vector fields, and the action
//! of those groups on solutions.

use std::fmt;

use crate::expr::{parse_with, Expr, ParseContext, Symbol, SymbolKind};
use crate::jet::{split_top_level, VectorField};
use crate::liealg::apply_field;
use crate::normal::{exp_nf, normalize, Atom, NormalForm};
use crate::{Error, Rational, Result};

/// Maximum number of field applications tried before a Lie series is
/// declared non-terminating.
pub const MAX_SERIES: usize = 6;

/// Closed-form transformation `(x, .., u) ↦ (x̃, .., ũ)` depending on a
/// group parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    pub coords: Vec<Symbol>,
    pub eps: Symbol,
    pub maps: Vec<NormalForm>,
}

pub fn epsilon() -> Symbol {
    Symbol::new("eps", SymbolKind::GroupParameter)
}

/// Flow of `v` as a closed form. Each coordinate's Lie series must either
/// terminate within [`MAX_SERIES`] terms or be a pure scaling
/// `v(c) = λ c`.
pub fn exponentiate(v: &VectorField, coords: &[Symbol]) -> Result<GroupElement> {
    let eps = epsilon();
    let e = NormalForm::sym(&eps);
    let mut maps = Vec::with_capacity(coords.len());
    for c in coords {
        let cn = NormalForm::sym(c);
        let first = apply_field(v, &cn, coords)?;
        let mut series = cn.clone();
        let mut term = cn.clone();
        let mut power = NormalForm::one();
        let mut done = false;
        for n in 1..=MAX_SERIES {
            term = apply_field(v, &term, coords)?;
            if term.is_zero() {
                done = true;
                break;
            }
            power = power.mul(&e)?;
            let fact: Rational = (1..=n as i64).map(|k| Rational::from_integer(k.into())).product();
            series = series + term.mul(&power)?.scale(&fact.recip());
        }
        if done {
            maps.push(series);
            continue;
        }
        let lambda = ratio(&first, &cn)
            .ok_or_else(|| Error::NonClosedForm(format!("flow of {} in {}", v.display(), c.name())))?;
        maps.push(cn.mul(&exp_nf(&e.scale(&lambda))?)?);
    }
    Ok(GroupElement { coords: coords.to_vec(), eps, maps })
}

/// Constant `λ` with `a = λ b`, if any.
fn ratio(a: &NormalForm, b: &NormalForm) -> Option<Rational> {
    let (m, c) = b.terms().next()?;
    let lambda = a.coefficient(m) / c;
    (a == &b.scale(&lambda)).then_some(lambda)
}

impl GroupElement {
    pub fn n(&self) -> usize {
        self.coords.len()
    }

    /// The maps with the parameter replaced by `value`.
    pub fn at(&self, value: &NormalForm) -> Result<GroupElement> {
        let maps = self.maps.iter().map(|m| m.subs_syms(&[(self.eps.clone(), value.clone())])).collect::<Result<_>>()?;
        Ok(GroupElement { coords: self.coords.clone(), eps: self.eps.clone(), maps })
    }

    /// Reparametrize `ε ↦ c ε`.
    pub fn rescaled(&self, c: &Rational) -> Result<GroupElement> {
        let e = NormalForm::sym(&self.eps).scale(c);
        let mut g = self.at(&e)?;
        g.eps = self.eps.clone();
        Ok(g)
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &GroupElement) -> Result<Vec<NormalForm>> {
        let pairs: Vec<(Symbol, NormalForm)> = self.coords.iter().cloned().zip(other.maps.iter().cloned()).collect();
        self.maps.iter().map(|m| m.subs_syms(&pairs)).collect()
    }

    pub fn is_identity_at_zero(&self) -> Result<bool> {
        let g = self.at(&NormalForm::zero())?;
        Ok(g.maps.iter().zip(&self.coords).all(|(m, c)| *m == NormalForm::sym(c)))
    }

    /// `d/dε map − v∘map`, per coordinate; all zero for a true flow of `v`.
    pub fn flow_defects(&self, v: &VectorField) -> Result<Vec<NormalForm>> {
        let pairs: Vec<(Symbol, NormalForm)> = self.coords.iter().cloned().zip(self.maps.iter().cloned()).collect();
        self.maps
            .iter()
            .zip(v.components())
            .map(|(m, vc)| Ok(m.diff_sym(&self.eps)? - vc.subs_syms(&pairs)?))
            .collect()
    }

    /// Whether `g(ε₁ + ε₂) = g(ε₁) ∘ g(ε₂)` holds identically.
    pub fn satisfies_group_law(&self) -> Result<bool> {
        let e1 = NormalForm::sym(&Symbol::new("eps1", SymbolKind::GroupParameter));
        let e2 = NormalForm::sym(&Symbol::new("eps2", SymbolKind::GroupParameter));
        let sum = self.at(&(&e1 + &e2))?;
        let composed = self.at(&e1)?.compose(&self.at(&e2)?)?;
        for (a, b) in sum.maps.iter().zip(&composed) {
            if !(a - b).is_identically_zero()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Parse a tuple of maps in the coordinates and `eps`.
    pub fn parse(text: &str, coords: &[Symbol]) -> Result<GroupElement> {
        let inner = text
            .trim()
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| Error::Invalid(format!("group map `{text}` is not a parenthesised tuple")))?;
        let names: Vec<&str> = coords.iter().map(Symbol::name).collect();
        let ctx = ParseContext::empty().with_independents(&names);
        let parts = split_top_level(inner);
        if parts.len() != coords.len() {
            return Err(Error::Invalid(format!("group map needs {} components", coords.len())));
        }
        let maps = parts.iter().map(|p| normalize(&parse_with(p, &ctx)?)).collect::<Result<_>>()?;
        Ok(GroupElement { coords: coords.to_vec(), eps: epsilon(), maps })
    }

    /// Push a solution `u = f(x)` forward: the image of its graph is
    /// `u = a(x̂) f(x̂) + b(x̂)` where `x̂ = φ(x, −ε)` inverts the base map
    /// and `ũ = a u + b` is the map of the dependent variable.
    pub fn transform_solution(&self, f: &NormalForm) -> Result<NormalForm> {
        let (a, b, pairs) = self.push_forward_parts()?;
        Ok(a.mul(&f.subs_syms(&pairs)?)? + b)
    }

    /// [`GroupElement::transform_solution`] on an expression tree, which is
    /// left unnormalized so it evaluates exactly as written.
    pub fn transform_solution_expr(&self, f: &Expr) -> Result<Expr> {
        let (a, b, pairs) = self.push_forward_parts()?;
        let pairs: Vec<(Symbol, Expr)> = pairs.into_iter().map(|(s, m)| (s, m.to_expr())).collect();
        Ok(a.to_expr() * f.subs(&pairs)? + b.to_expr())
    }

    /// `a(x̂)`, `b(x̂)` and the inverse base maps `x ↦ x̂`.
    fn push_forward_parts(&self) -> Result<(NormalForm, NormalForm, Vec<(Symbol, NormalForm)>)> {
        let n = self.n() - 1;
        let u = &self.coords[n];
        for m in &self.maps[..n] {
            if m.any_atom(&|a| matches!(a, Atom::Sym(s) if s == u)) {
                return Err(Error::Invalid("base maps depend on the dependent variable".into()));
            }
        }
        let umap = &self.maps[n];
        let a = umap.diff_sym(u)?;
        if a.any_atom(&|x| matches!(x, Atom::Sym(s) if s == u)) {
            return Err(Error::Invalid("map of the dependent variable is not affine".into()));
        }
        if a.is_zero() {
            return Err(Error::Invalid("map of the dependent variable is not invertible".into()));
        }
        let b = umap.subs_syms(&[(u.clone(), NormalForm::zero())])?;
        let inverse = self.at(&-NormalForm::sym(&self.eps))?;
        let pairs: Vec<(Symbol, NormalForm)> =
            self.coords[..n].iter().cloned().zip(inverse.maps[..n].iter().cloned()).collect();
        Ok((a.subs_syms(&pairs)?, b.subs_syms(&pairs)?, pairs))
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.maps.iter().map(|m| m.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Generic solution `f(x, y, z, t)` as an unknown-function atom.
pub fn generic_solution(vars: &[Symbol]) -> NormalForm {
    let args = vars.iter().map(NormalForm::sym).collect();
    NormalForm::atom(Atom::func(Symbol::param("f"), crate::expr::MultiIndex::zero(vars.len()), args))
}

/// How a transcribed group relates to the flow of its generator.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupMatch {
    /// Equal to the flow after `ε ↦ c ε`.
    Rescaled(Rational),
    /// Each coordinate fixes its own `c`, and they disagree.
    Inconsistent(Vec<Option<Rational>>),
    /// A single `c` fits to first order, but the closed forms differ in
    /// the named coordinate.
    Mismatch { c: Rational, coordinate: usize },
}

/// Compare a transcribed group with the flow of `v`.
pub fn compare_group(g: &GroupElement, v: &VectorField) -> Result<GroupMatch> {
    let d0 = g.at(&NormalForm::zero()).and_then(|_| {
        g.maps.iter().map(|m| m.diff_sym(&g.eps)?.subs_syms(&[(g.eps.clone(), NormalForm::zero())])).collect::<Result<Vec<_>>>()
    })?;
    let comps = v.components();
    let ratios: Vec<Option<Rational>> = d0
        .iter()
        .zip(&comps)
        .map(|(d, c)| if c.is_zero() { None } else { ratio(d, c) })
        .collect();
    let mut c: Option<Rational> = None;
    let mut consistent = true;
    for (r, comp) in ratios.iter().zip(&comps) {
        if comp.is_zero() {
            continue;
        }
        match (r, &c) {
            (None, _) => consistent = false,
            (Some(r), None) => c = Some(r.clone()),
            (Some(r), Some(c0)) if r != c0 => consistent = false,
            _ => {}
        }
    }
    let Some(c) = c.filter(|_| consistent) else {
        return Ok(GroupMatch::Inconsistent(ratios));
    };
    let flow = exponentiate(v, &g.coords)?.rescaled(&c)?;
    for (k, (a, b)) in g.maps.iter().zip(&flow.maps).enumerate() {
        if !(a - b).is_identically_zero()? {
            return Ok(GroupMatch::Mismatch { c, coordinate: k });
        }
    }
    Ok(GroupMatch::Rescaled(c))
}

/// How a transcribed transformed solution relates to the push-forward.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolutionMatch {
    Exact,
    /// Agrees after `ε ↦ −ε`.
    Reversed,
    Mismatch,
}

pub fn compare_solution(g: &GroupElement, f: &NormalForm, claimed: &NormalForm) -> Result<SolutionMatch> {
    let pushed = g.transform_solution(f)?;
    if (&pushed - claimed).is_identically_zero()? {
        return Ok(SolutionMatch::Exact);
    }
    let rev = g.at(&-NormalForm::sym(&g.eps))?.transform_solution(f)?;
    if (&rev - claimed).is_identically_zero()? {
        return Ok(SolutionMatch::Reversed);
    }
    Ok(SolutionMatch::Mismatch)
}

/// One transcribed group with the solution it is said to produce.
#[derive(Clone, Debug)]
pub struct ReferenceGroup {
    pub name: String,
    /// 1-based index of the generator.
    pub field: usize,
    pub group: GroupElement,
    pub claimed: NormalForm,
}

pub const REFERENCE_GROUPS: &str = crate::data::GROUPS;

/// Parse `name | field | maps | solution` records.
pub fn parse_reference_groups(text: &str, coords: &[Symbol]) -> Result<Vec<ReferenceGroup>> {
    let names: Vec<&str> = coords.iter().map(Symbol::name).collect();
    let ctx = ParseContext::empty().with_independents(&names).with_functions(&["f"]);
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split('|').map(str::trim).collect();
        let [name, field, maps, sol] = parts[..] else {
            return Err(Error::Invalid(format!("group record `{line}` needs four fields")));
        };
        let field = field.parse().map_err(|_| Error::Invalid(format!("bad field index `{field}`")))?;
        out.push(ReferenceGroup {
            name: name.to_string(),
            field,
            group: GroupElement::parse(maps, coords)?,
            claimed: normalize(&parse_with(sol, &ctx)?)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
