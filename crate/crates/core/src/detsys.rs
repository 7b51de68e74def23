//! Determining equations of a scalar PDE and their solution under a
//! polynomial ansatz.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::expr::{parse_with, JetVar, MultiIndex, ParseContext, Symbol};
use crate::jet::{generic_field, on_shell_condition, Pde, VectorField};
use crate::linalg;
use crate::normal::{normalize, Atom, Monomial, NormalForm};
use crate::{Error, Exponent, Rational, Result};

/// Linear homogeneous constraints on the infinitesimals `xi1..xin, eta`,
/// written with jets such as `xi2_y` over the base coordinates.
#[derive(Clone, Debug)]
pub struct DeterminingSystem {
    pub coords: Arc<[Symbol]>,
    pub unknowns: Vec<Symbol>,
    pub constraints: Vec<NormalForm>,
}

fn unknown_names(n: usize) -> Vec<Symbol> {
    let mut u: Vec<Symbol> = (1..=n).map(|i| Symbol::var(&format!("xi{i}"))).collect();
    u.push(Symbol::var("eta"));
    u
}

/// Scale to integer coefficients with gcd 1 and positive leading term.
fn primitive(f: &NormalForm) -> NormalForm {
    let coeffs: Vec<Rational> = f.terms().map(|(_, c)| c.clone()).collect();
    let ints = linalg::primitive(&coeffs);
    NormalForm::from_terms(f.terms().map(|(m, _)| m.clone()).zip(ints.into_iter().map(Rational::from_integer)))
}

impl DeterminingSystem {
    pub fn new(coords: Arc<[Symbol]>, constraints: Vec<NormalForm>) -> Self {
        let unknowns = unknown_names(coords.len() - 1);
        let set: BTreeSet<NormalForm> =
            constraints.iter().filter(|c| !c.is_zero()).map(primitive).collect();
        DeterminingSystem { coords, unknowns, constraints: set.into_iter().collect() }
    }

    /// Parse context in which `xi1_t`, `eta_u` and friends are jets.
    pub fn parse_context(coords: &[Symbol]) -> ParseContext {
        let c: Vec<&str> = coords.iter().map(Symbol::name).collect();
        let mut ctx = ParseContext::empty();
        for u in unknown_names(coords.len() - 1) {
            ctx = ctx.with_dep(u.name(), &c);
        }
        ctx
    }

    /// One constraint per line; `#` comments and `lhs = rhs` are accepted.
    pub fn from_text(text: &str, coords: Arc<[Symbol]>) -> Result<Self> {
        let ctx = Self::parse_context(&coords);
        let mut out = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nf = match line.split_once('=') {
                Some((l, r)) => normalize(&parse_with(l, &ctx)?)? - normalize(&parse_with(r, &ctx)?)?,
                None => normalize(&parse_with(line, &ctx)?)?,
            };
            out.push(nf);
        }
        Ok(DeterminingSystem::new(coords, out))
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Whether `v` satisfies every constraint identically.
    pub fn is_satisfied_by(&self, v: &VectorField) -> Result<bool> {
        let comps = v.components();
        let coords = self.coords.clone();
        let unknowns = self.unknowns.clone();
        let mut memo: BTreeMap<JetVar, NormalForm> = BTreeMap::new();
        for c in &self.constraints {
            for a in c.atoms() {
                if let Atom::Jet(j) = a {
                    if memo.contains_key(&j) {
                        continue;
                    }
                    let k = unknowns.iter().position(|u| *u == j.dep).ok_or_else(|| {
                        Error::Invalid(format!("unknown function {} in determining system", j.dep.name()))
                    })?;
                    let mut d = comps[k].clone();
                    for (i, &n) in j.index.0.iter().enumerate() {
                        for _ in 0..n {
                            d = d.diff_sym(&coords[i])?;
                        }
                    }
                    memo.insert(j, d);
                }
            }
            let r = c.substitute_atoms(&|a| match a {
                Atom::Jet(j) => memo.get(j).cloned(),
                _ => None,
            })?;
            if !r.is_identically_zero()? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for DeterminingSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.constraints {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Map a coefficient of the generic condition into determining-system
/// form: `xiK` function atoms become jets over the coordinates and the
/// base jet of the dependent variable becomes the coordinate `u`.
fn to_det_space(f: &NormalForm, pde: &Pde, coords: &Arc<[Symbol]>) -> Result<NormalForm> {
    let u = NormalForm::sym(&coords[coords.len() - 1]);
    let base = pde.base();
    f.substitute_atoms(&|a| match a {
        Atom::Func(fa) => Some(NormalForm::jet(&JetVar::new(
            Symbol::var(fa.name.name()),
            coords.clone(),
            fa.deriv.clone(),
        ))),
        Atom::Jet(j) if *j == base => Some(u.clone()),
        _ => None,
    })
}

/// Determining equations: the on-shell symmetry condition of a generic
/// point field, split by monomials in the jet coordinates of order ≥ 1.
/// `lead_var` is the direction eliminated on shell.
pub fn extract_determining(pde: &Pde, lead_var: &str) -> Result<DeterminingSystem> {
    let v = generic_field(pde);
    let cond = on_shell_condition(&v, pde, lead_var)?;
    let dep = pde.dep.clone();
    let groups = cond.collect(&|a| matches!(a, Atom::Jet(j) if j.dep == dep && j.order() >= 1));
    let coords: Arc<[Symbol]> = pde.coordinates().into();
    let mut out = Vec::with_capacity(groups.len());
    for (_, coeff) in groups {
        out.push(to_det_space(&coeff, pde, &coords)?);
    }
    Ok(DeterminingSystem::new(coords, out))
}

/// Polynomial ansatz of total degree ≤ `degree` for every unknown.
#[derive(Clone, Debug)]
pub struct PolyAnsatz {
    pub degree: u32,
    pub nvars: usize,
    /// Exponent vectors, constants first, then by degree and reverse
    /// lexicographic order so that `x` precedes `y`.
    pub monomials: Vec<Vec<u32>>,
    index: BTreeMap<Vec<u32>, usize>,
}

impl PolyAnsatz {
    pub fn new(nvars: usize, degree: u32) -> Self {
        let mut monomials = Vec::new();
        for d in 0..=degree {
            let mut layer = Vec::new();
            compositions(nvars, d, &mut Vec::new(), &mut layer);
            layer.sort_by(|a, b| b.cmp(a));
            monomials.extend(layer);
        }
        let index = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        PolyAnsatz { degree, nvars, monomials, index }
    }

    /// Number of coefficients: `(nvars) · C(nvars + d, d)` over all
    /// unknowns, one unknown per coordinate.
    pub fn len(&self) -> usize {
        self.nvars * self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    fn column(&self, unknown: usize, mono: &[u32]) -> Option<usize> {
        self.index.get(mono).map(|i| unknown * self.monomials.len() + i)
    }

    /// Ansatz coefficient symbols `a_{k,i}` in column order.
    pub fn coefficient_symbols(&self) -> Vec<Symbol> {
        (0..self.nvars)
            .flat_map(|k| {
                (0..self.monomials.len()).map(move |i| {
                    Symbol::new(&format!("a{}_{}", k + 1, i), crate::expr::SymbolKind::AnsatzCoefficient)
                })
            })
            .collect()
    }

    fn poly(&self, coords: &[Symbol], coeffs: &[Rational]) -> NormalForm {
        let terms = self.monomials.iter().zip(coeffs).filter(|(_, c)| !c.is_zero()).map(|(m, c)| {
            let mut mono = Monomial::one();
            for (s, &e) in coords.iter().zip(m) {
                if e > 0 {
                    mono = mono.with_factor(Atom::Sym(s.clone()), Exponent::from_integer(e as i64));
                }
            }
            (mono, c.clone())
        });
        NormalForm::from_terms(terms)
    }

    /// Field with the given coefficient vector.
    pub fn field(&self, coords: &[Symbol], v: &[Rational]) -> VectorField {
        let n = self.monomials.len();
        VectorField::from_components((0..self.nvars).map(|k| self.poly(coords, &v[k * n..(k + 1) * n])).collect())
    }

    /// Coefficient vector of a polynomial field, or `None` if some
    /// component is not a polynomial of degree ≤ `degree`.
    pub fn coordinates_of(&self, coords: &[Symbol], v: &VectorField) -> Option<Vec<Rational>> {
        let mut out = vec![Rational::zero(); self.len()];
        for (k, comp) in v.components().iter().enumerate() {
            for (m, c) in comp.terms() {
                let e = exponents(m, coords)?;
                out[self.column(k, &e)?] = c.clone();
            }
        }
        Some(out)
    }
}

fn compositions(n: usize, d: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if cur.len() + 1 == n {
        cur.push(d);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for i in 0..=d {
        cur.push(i);
        compositions(n, d - i, cur, out);
        cur.pop();
    }
}

/// Exponent vector of a monomial built from coordinate symbols only.
fn exponents(m: &Monomial, coords: &[Symbol]) -> Option<Vec<u32>> {
    let mut e = vec![0u32; coords.len()];
    for (a, p) in m.factors() {
        let Atom::Sym(s) = a else { return None };
        let i = coords.iter().position(|c| c == s)?;
        if !p.is_integer() || p.is_negative() {
            return None;
        }
        e[i] = *p.numer() as u32;
    }
    Some(e)
}

/// Basis of the polynomial solutions of a determining system.
#[derive(Clone, Debug)]
pub struct SymmetryBasis {
    pub coords: Arc<[Symbol]>,
    pub ansatz: PolyAnsatz,
    pub vectors: Vec<Vec<Rational>>,
    pub fields: Vec<VectorField>,
}

impl SymmetryBasis {
    pub fn dimension(&self) -> usize {
        self.fields.len()
    }
}

impl fmt::Display for SymmetryBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.fields.iter().enumerate() {
            writeln!(f, "e{} = {}", i + 1, v.display())?;
        }
        writeln!(f, "dimension {}", self.dimension())
    }
}

/// Linear system in the ansatz coefficients, one row per (constraint,
/// coordinate monomial).
pub fn ansatz_rows(sys: &DeterminingSystem, ansatz: &PolyAnsatz) -> Result<Vec<Vec<Rational>>> {
    let coords = &sys.coords;
    let mut rows: BTreeMap<(usize, Vec<u32>), BTreeMap<usize, Rational>> = BTreeMap::new();
    for (ei, eq) in sys.constraints.iter().enumerate() {
        for (m, c) in eq.terms() {
            let (jets, rest) = m.split(&|a| matches!(a, Atom::Jet(_)));
            let [(Atom::Jet(j), p)] = jets.factors() else {
                return Err(Error::NotLinear(format!("determining constraint {eq}")));
            };
            if !p.is_one() {
                return Err(Error::NotLinear(format!("determining constraint {eq}")));
            }
            let k = sys
                .unknowns
                .iter()
                .position(|u| *u == j.dep)
                .ok_or_else(|| Error::Invalid(format!("unknown function {}", j.dep.name())))?;
            let gamma = exponents(&rest, coords)
                .ok_or_else(|| Error::Invalid(format!("non-polynomial coefficient in {eq}")))?;
            let beta = &j.index.0;
            for alpha in &ansatz.monomials {
                if alpha.iter().zip(beta).any(|(&a, &b)| a < b as u32) {
                    continue;
                }
                let mut factor = Rational::one();
                let mut key = gamma.clone();
                for i in 0..alpha.len() {
                    let b = beta[i] as u32;
                    for s in 0..b {
                        factor *= Rational::from_integer((alpha[i] - s).into());
                    }
                    key[i] += alpha[i] - b;
                }
                let col = ansatz.column(k, alpha).unwrap();
                let e = rows.entry((ei, key)).or_default().entry(col).or_insert_with(Rational::zero);
                *e += c * factor;
            }
        }
    }
    let n = ansatz.len();
    Ok(rows
        .into_values()
        .filter_map(|r| {
            let mut dense = vec![Rational::zero(); n];
            let mut any = false;
            for (c, v) in r {
                if !v.is_zero() {
                    any = true;
                    dense[c] = v;
                }
            }
            any.then_some(dense)
        })
        .collect())
}

/// Nullspace of the ansatz system, one field per basis vector. Vectors are
/// in reduced echelon form: the first nonzero coefficient is 1 and the
/// basis is ordered by the position of that coefficient.
pub fn solve_poly_ansatz(sys: &DeterminingSystem, degree: u32) -> Result<SymmetryBasis> {
    if degree < 1 {
        return Err(Error::Invalid("ansatz degree must be at least 1".into()));
    }
    let ansatz = PolyAnsatz::new(sys.coords.len(), degree);
    let rows = ansatz_rows(sys, &ansatz)?;
    let vectors = linalg::nullspace(&rows, ansatz.len());
    let fields = vectors.iter().map(|v| ansatz.field(&sys.coords, v)).collect();
    Ok(SymmetryBasis { coords: sys.coords.clone(), ansatz, vectors, fields })
}

/// Exact coordinates of `v` in the basis, or `None` if it lies outside the
/// span (or is not a polynomial field of admissible degree).
pub fn check_membership(basis: &SymmetryBasis, v: &VectorField) -> Option<Vec<Rational>> {
    let target = basis.ansatz.coordinates_of(&basis.coords, v)?;
    if basis.vectors.is_empty() {
        return target.iter().all(Zero::is_zero).then(Vec::new);
    }
    let n = basis.ansatz.len();
    let a: Vec<Vec<Rational>> = (0..n).map(|r| basis.vectors.iter().map(|b| b[r].clone()).collect()).collect();
    linalg::solve(&a, &target)
}

/// Multi-index helper for building constraint jets by hand.
pub fn unknown_jet(coords: &Arc<[Symbol]>, name: &str, index: &[u8]) -> JetVar {
    JetVar::new(Symbol::var(name), coords.clone(), MultiIndex(index.to_vec()))
}

#[cfg(test)]
mod tests;
