//! Canonical expanded form: a sparse map from monomials to rational
//! coefficients.
//!
//! Two denominator-free expressions that are equal modulo the rewriting
//! rules (expansion, `I² = -1`, `sech² = 1 - tanh²`, merging of like
//! powers, real odd roots) have identical normal forms. Expressions with
//! symbolic denominators are zero-tested through [`NormalForm::numerator`].

mod atom;
mod convert;
mod derive;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

pub use atom::{atom_power, const_power, exp_nf, sech_nf, tanh_nf, Atom, FuncAtom, Shared};
pub use convert::normalize;

use crate::expr::{JetVar, Symbol};
use crate::{Error, Exponent, Rational, Result};

/// Largest number of terms any intermediate result may have.
pub const MAX_TERMS: usize = 200_000;

/// Product of atom powers, sorted by atom.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Atom, Exponent)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Atom, Exponent)] {
        &self.0
    }

    pub fn exponent_of(&self, a: &Atom) -> Exponent {
        match self.0.binary_search_by(|(b, _)| b.cmp(a)) {
            Ok(i) => self.0[i].1,
            Err(_) => Exponent::zero(),
        }
    }

    /// Multiply by `a^e` without canonical rewriting.
    pub fn with_factor(mut self, a: Atom, e: Exponent) -> Monomial {
        match self.0.binary_search_by(|(b, _)| b.cmp(&a)) {
            Ok(i) => {
                self.0[i].1 += e;
                if self.0[i].1.is_zero() {
                    self.0.remove(i);
                }
            }
            Err(i) => {
                if !e.is_zero() {
                    self.0.insert(i, (a, e));
                }
            }
        }
        self
    }

    pub fn without(&self, a: &Atom) -> Monomial {
        Monomial(self.0.iter().filter(|(b, _)| b != a).cloned().collect())
    }

    /// Split into the factors selected by `pred` and the rest.
    pub fn split(&self, pred: &dyn Fn(&Atom) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().cloned().partition(|(x, _)| pred(x));
        (Monomial(a), Monomial(b))
    }

    fn merge(&self, o: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &o.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if !e.is_zero() {
                        out.push((a[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    fn needs_fixup(&self) -> bool {
        self.0.iter().any(|(a, e)| a.needs_fixup(*e))
    }

    pub fn to_expr(&self) -> crate::Expr {
        crate::Expr::mul_all(self.0.iter().map(|(a, e)| convert::atom_power_expr(a, *e)).collect::<Vec<_>>())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalForm {
    terms: BTreeMap<Monomial, Rational>,
}

fn add_term(map: &mut BTreeMap<Monomial, Rational>, m: Monomial, c: Rational) {
    use std::collections::btree_map::Entry;
    if c.is_zero() {
        return;
    }
    match map.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

impl NormalForm {
    pub fn zero() -> Self {
        NormalForm::default()
    }

    pub fn one() -> Self {
        NormalForm::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        add_term(&mut terms, Monomial::one(), c);
        NormalForm { terms }
    }

    pub fn int(n: i64) -> Self {
        NormalForm::constant(Rational::from_integer(n.into()))
    }

    pub fn from_monomial(m: Monomial) -> Self {
        NormalForm::term(m, Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        add_term(&mut terms, m, c);
        NormalForm { terms }
    }

    /// `a^e` as a bare monomial, without canonical rewriting.
    pub(crate) fn monomial_pow(a: Atom, e: Exponent) -> Self {
        NormalForm::from_monomial(Monomial::one().with_factor(a, e))
    }

    pub fn atom(a: Atom) -> Self {
        NormalForm::monomial_pow(a, Exponent::one())
    }

    pub fn sym(s: &Symbol) -> Self {
        NormalForm::atom(Atom::Sym(s.clone()))
    }

    pub fn jet(j: &JetVar) -> Self {
        NormalForm::atom(Atom::Jet(j.clone()))
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Rational> {
        self.terms
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(it: I) -> Self {
        let mut terms = BTreeMap::new();
        for (m, c) in it {
            add_term(&mut terms, m, c);
        }
        NormalForm { terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Structural zero test. For expressions with symbolic denominators use
    /// [`NormalForm::is_identically_zero`].
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_one())
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.terms.is_empty() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    /// Coefficient of the empty monomial.
    pub fn constant_term(&self) -> Rational {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return NormalForm::zero();
        }
        NormalForm { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn add_assign_scaled(&mut self, o: &NormalForm, c: &Rational) {
        for (m, k) in &o.terms {
            add_term(&mut self.terms, m.clone(), k * c);
        }
    }

    fn check(self) -> Result<Self> {
        if self.terms.len() > MAX_TERMS {
            Err(Error::ResourceLimit { limit: MAX_TERMS })
        } else {
            Ok(self)
        }
    }

    /// Canonical value of a monomial whose merged exponents may need
    /// rewriting.
    fn canonical(m: Monomial) -> Result<NormalForm> {
        if !m.needs_fixup() {
            return Ok(NormalForm::from_monomial(m));
        }
        let (fix, ok) = m.split(&|a| {
            let e = m.exponent_of(a);
            a.needs_fixup(e)
        });
        let mut out = NormalForm::from_monomial(ok);
        for (a, e) in fix.0 {
            out = out.mul(&atom_power(&a, e)?)?;
        }
        Ok(out)
    }

    pub fn mul(&self, o: &NormalForm) -> Result<NormalForm> {
        if self.terms.len() * o.terms.len() > 8 * MAX_TERMS {
            return Err(Error::ResourceLimit { limit: MAX_TERMS });
        }
        let mut terms = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let m = ma.merge(mb);
                let c = ca * cb;
                if m.needs_fixup() {
                    for (m2, c2) in NormalForm::canonical(m)?.terms {
                        add_term(&mut terms, m2, c2 * &c);
                    }
                } else {
                    add_term(&mut terms, m, c);
                }
            }
            if terms.len() > MAX_TERMS {
                return Err(Error::ResourceLimit { limit: MAX_TERMS });
            }
        }
        NormalForm { terms }.check()
    }

    /// Multiply by a single monomial.
    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Result<NormalForm> {
        self.mul(&NormalForm::term(m.clone(), c.clone()))
    }

    pub fn pow(&self, e: Exponent) -> Result<NormalForm> {
        if e.is_zero() {
            return Ok(NormalForm::one());
        }
        if self.is_zero() {
            return if e > Exponent::zero() {
                Ok(NormalForm::zero())
            } else {
                Err(Error::DivisionByZero("zero raised to a negative power".into()))
            };
        }
        if e.is_integer() && e > Exponent::zero() {
            let mut n = e.to_integer();
            let mut base = self.clone();
            let mut acc = NormalForm::one();
            while n > 0 {
                if n & 1 == 1 {
                    acc = acc.mul(&base)?;
                }
                n >>= 1;
                if n > 0 {
                    base = base.mul(&base)?;
                }
            }
            return Ok(acc);
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            return NormalForm::term_pow(m, c, e);
        }
        let lead = self.terms.values().next().unwrap().clone();
        let odd = *e.denom() % 2 == 1;
        let c = if e.is_integer() || odd { lead } else { lead.abs() };
        let key = self.scale(&c.recip());
        let coeff = if e.is_integer() {
            NormalForm::constant(crate::expr::rational_pow(&c, e).expect("nonzero"))
        } else {
            const_power(&c, e)?
        };
        coeff.mul(&atom_power(&Atom::Pow(Shared::new(key)), e)?)
    }

    fn term_pow(m: &Monomial, c: &Rational, e: Exponent) -> Result<NormalForm> {
        if e.is_integer() {
            let mut out = NormalForm::constant(crate::expr::rational_pow(c, e).expect("nonzero"));
            for (a, k) in &m.0 {
                out = out.mul(&atom_power(a, *k * e)?)?;
            }
            return Ok(out);
        }
        let (dist, rest) = m.split(&|a| a.distributes());
        let mut c = c.clone();
        let mut out = NormalForm::one();
        for (a, k) in &dist.0 {
            out = out.mul(&atom_power(a, *k * e)?)?;
        }
        if !rest.is_one() {
            let mut base = NormalForm::from_monomial(rest);
            if c.is_negative() && *e.denom() % 2 == 0 {
                base = -base;
                c = -c;
            }
            out = out.mul(&atom_power(&Atom::Pow(Shared::new(base)), e)?)?;
        }
        const_power(&c, e)?.mul(&out)
    }

    pub fn to_expr(&self) -> crate::Expr {
        crate::Expr::add_all(
            self.terms.iter().map(|(m, c)| crate::Expr::num(c.clone()) * m.to_expr()).collect::<Vec<_>>(),
        )
    }

    /// Terms whose coefficient is negative, used for pretty sign choices.
    pub fn leading_sign_negative(&self) -> bool {
        self.terms.values().next().map_or(false, |c| c.is_negative())
    }
}

impl std::ops::Add for &NormalForm {
    type Output = NormalForm;
    fn add(self, o: &NormalForm) -> NormalForm {
        let mut out = self.clone();
        out.add_assign_scaled(o, &Rational::one());
        out
    }
}

impl std::ops::Add for NormalForm {
    type Output = NormalForm;
    fn add(mut self, o: NormalForm) -> NormalForm {
        if self.terms.len() < o.terms.len() {
            return o + self;
        }
        for (m, c) in o.terms {
            add_term(&mut self.terms, m, c);
        }
        self
    }
}

impl std::ops::Sub for &NormalForm {
    type Output = NormalForm;
    fn sub(self, o: &NormalForm) -> NormalForm {
        let mut out = self.clone();
        out.add_assign_scaled(o, &-Rational::one());
        out
    }
}

impl std::ops::Sub for NormalForm {
    type Output = NormalForm;
    fn sub(self, o: NormalForm) -> NormalForm {
        self + (-o)
    }
}

impl std::ops::Neg for NormalForm {
    type Output = NormalForm;
    fn neg(mut self) -> NormalForm {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl std::ops::Neg for &NormalForm {
    type Output = NormalForm;
    fn neg(self) -> NormalForm {
        -self.clone()
    }
}

impl std::iter::Sum for NormalForm {
    fn sum<I: Iterator<Item = NormalForm>>(it: I) -> NormalForm {
        let mut acc = NormalForm::zero();
        for x in it {
            acc = acc + x;
        }
        acc
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

#[cfg(test)]
mod tests;
