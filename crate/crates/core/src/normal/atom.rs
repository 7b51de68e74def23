use std::cmp::Ordering;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Monomial, NormalForm};
use crate::expr::{JetVar, MultiIndex, Symbol};
use crate::{Error, Exponent, Rational, Result};

/// Reference-counted value whose comparisons short-circuit on pointer
/// identity.
#[derive(Debug)]
pub struct Shared<T>(pub Arc<T>);

impl<T> Clone for Shared<T> {
    fn clone(&self) -> Self {
        Shared(self.0.clone())
    }
}

impl<T> Shared<T> {
    pub fn new(v: T) -> Self {
        Shared(Arc::new(v))
    }
}

impl<T> std::ops::Deref for Shared<T> {
    type Target = T;
    fn deref(&self) -> &T {
        &self.0
    }
}

impl<T: PartialEq> PartialEq for Shared<T> {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.0, &o.0) || *self.0 == *o.0
    }
}

impl<T: Eq> Eq for Shared<T> {}

impl<T: Ord> PartialOrd for Shared<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl<T: Ord> Ord for Shared<T> {
    fn cmp(&self, o: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &o.0) {
            Ordering::Equal
        } else {
            (*self.0).cmp(&*o.0)
        }
    }
}

impl<T: Hash> Hash for Shared<T> {
    fn hash<H: Hasher>(&self, h: &mut H) {
        (*self.0).hash(h)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuncAtom {
    pub name: Symbol,
    pub deriv: MultiIndex,
    pub args: Vec<NormalForm>,
}

/// Indivisible factor of a monomial.
///
/// * `Tanh(θ)` and `Sech(θ)` have sign-canonical arguments (leading
///   coefficient positive); `Sech` only ever carries exponent 1.
/// * `Exp(m)` with exponent `c` stands for `exp(c·m)`.
/// * `Pow(B)` with exponent `e` stands for `B^e` where `e` is negative or
///   lies in `(0, 1)`; positive integer powers are always expanded. A
///   constant `B` is a prime and `e ∈ (0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Sym(Symbol),
    Imag,
    Jet(JetVar),
    Func(Shared<FuncAtom>),
    Tanh(Shared<NormalForm>),
    Sech(Shared<NormalForm>),
    Exp(Shared<Monomial>),
    Pow(Shared<NormalForm>),
}

impl Atom {
    pub fn func(name: Symbol, deriv: MultiIndex, args: Vec<NormalForm>) -> Atom {
        Atom::Func(Shared::new(FuncAtom { name, deriv, args }))
    }

    pub fn as_jet(&self) -> Option<&JetVar> {
        match self {
            Atom::Jet(j) => Some(j),
            _ => None,
        }
    }

    pub fn as_func(&self) -> Option<&FuncAtom> {
        match self {
            Atom::Func(f) => Some(f),
            _ => None,
        }
    }

    /// True for atoms a fractional power may be distributed over.
    pub(super) fn distributes(&self) -> bool {
        matches!(self, Atom::Sym(_) | Atom::Exp(_) | Atom::Pow(_))
    }

    /// Whether `self^e` needs rewriting into canonical shape.
    pub(super) fn needs_fixup(&self, e: Exponent) -> bool {
        if e.is_zero() {
            return true;
        }
        match self {
            Atom::Imag | Atom::Sech(_) => !e.is_one(),
            Atom::Pow(b) => {
                if b.is_constant() {
                    !(e > Exponent::zero() && e < Exponent::one())
                } else {
                    e >= Exponent::one()
                }
            }
            _ => false,
        }
    }
}

fn to_exponent(c: &Rational) -> Result<Exponent> {
    let n = c.numer().to_i64();
    let d = c.denom().to_i64();
    match (n, d) {
        (Some(n), Some(d)) => Ok(Exponent::new(n, d)),
        _ => Err(Error::Invalid(format!("exponent {c} does not fit in 64 bits"))),
    }
}

/// `exp(θ) = Π exp(c·m)` over the terms of `θ`.
pub fn exp_nf(theta: &NormalForm) -> Result<NormalForm> {
    let mut m = Monomial::one();
    for (mono, c) in theta.terms() {
        m = m.with_factor(Atom::Exp(Shared::new(mono.clone())), to_exponent(c)?);
    }
    Ok(NormalForm::from_monomial(m))
}

fn leading_negative(theta: &NormalForm) -> bool {
    theta.terms().next().map_or(false, |(_, c)| c.is_negative())
}

pub fn tanh_nf(theta: &NormalForm) -> NormalForm {
    if theta.is_zero() {
        return NormalForm::zero();
    }
    if leading_negative(theta) {
        -NormalForm::atom(Atom::Tanh(Shared::new(-theta)))
    } else {
        NormalForm::atom(Atom::Tanh(Shared::new(theta.clone())))
    }
}

pub fn sech_nf(theta: &NormalForm) -> NormalForm {
    if theta.is_zero() {
        return NormalForm::one();
    }
    let t = if leading_negative(theta) { -theta } else { theta.clone() };
    NormalForm::atom(Atom::Sech(Shared::new(t)))
}

/// `atom^e` in canonical shape.
pub fn atom_power(atom: &Atom, e: Exponent) -> Result<NormalForm> {
    if e.is_zero() {
        return Ok(NormalForm::one());
    }
    match atom {
        Atom::Imag => {
            if !e.is_integer() {
                let base = NormalForm::atom(Atom::Imag);
                return Ok(NormalForm::monomial_pow(Atom::Pow(Shared::new(base)), e));
            }
            Ok(match e.to_integer().rem_euclid(4) {
                0 => NormalForm::one(),
                1 => NormalForm::atom(Atom::Imag),
                2 => -NormalForm::one(),
                _ => -NormalForm::atom(Atom::Imag),
            })
        }
        Atom::Sech(theta) => {
            if !e.is_integer() {
                let base = NormalForm::atom(atom.clone());
                return Ok(NormalForm::monomial_pow(Atom::Pow(Shared::new(base)), e));
            }
            let k = e.to_integer();
            let (m, r) = (k.div_euclid(2), k.rem_euclid(2));
            let t = NormalForm::atom(Atom::Tanh(theta.clone()));
            let one_minus = NormalForm::one() - t.mul(&t)?;
            let mut out = one_minus.pow(Exponent::from_integer(m))?;
            if r == 1 {
                out = out.mul(&NormalForm::atom(atom.clone()))?;
            }
            Ok(out)
        }
        Atom::Pow(b) if b.is_constant() => {
            let fl = e.floor();
            let fr = e - fl;
            let p = b.constant_value().unwrap();
            let coeff = crate::expr::rational_pow(&p, fl).expect("nonzero prime");
            let mut out = NormalForm::constant(coeff);
            if !fr.is_zero() {
                out = out.mul(&NormalForm::monomial_pow(atom.clone(), fr))?;
            }
            Ok(out)
        }
        Atom::Pow(b) => {
            if e.is_integer() && e > Exponent::zero() {
                return b.pow(e);
            }
            if e > Exponent::one() {
                let fl = e.floor();
                let lower = b.pow(fl)?;
                return lower.mul(&NormalForm::monomial_pow(atom.clone(), e - fl));
            }
            Ok(NormalForm::monomial_pow(atom.clone(), e))
        }
        _ => Ok(NormalForm::monomial_pow(atom.clone(), e)),
    }
}

/// Prime factorisation by trial division; a large cofactor is kept whole.
fn factor(n: &BigInt) -> Vec<(BigInt, i64)> {
    let mut out = Vec::new();
    let mut n = n.clone();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(100_000);
    while &p * &p <= n && p <= limit {
        let mut k = 0;
        while n.is_multiple_of(&p) {
            n /= &p;
            k += 1;
        }
        if k > 0 {
            out.push((p.clone(), k));
        }
        p += if p == BigInt::from(2) { 1 } else { 2 };
    }
    if !n.is_one() {
        out.push((n, 1));
    }
    out
}

/// `c^e` for a rational constant and fractional `e`, as a product of a
/// rational, prime radicals and possibly `I`.
pub fn const_power(c: &Rational, e: Exponent) -> Result<NormalForm> {
    if c.is_zero() {
        return if e > Exponent::zero() {
            Ok(NormalForm::zero())
        } else {
            Err(Error::DivisionByZero("0 raised to a negative power".into()))
        };
    }
    if let Some(r) = crate::expr::rational_pow(c, e) {
        return Ok(NormalForm::constant(r));
    }
    let mut out = NormalForm::one();
    if c.is_negative() {
        let q = *e.denom();
        let p = *e.numer();
        if q % 2 == 1 {
            if p % 2 != 0 {
                out = -out;
            }
        } else if q == 2 {
            out = atom_power(&Atom::Imag, Exponent::from_integer(p))?;
        } else {
            return Err(Error::Domain(format!("({c})^({e}) has no real or principal-square-root branch")));
        }
    }
    let a = c.abs();
    for (p, k) in factor(a.numer()) {
        let base = NormalForm::constant(Rational::from_integer(p));
        out = out.mul(&atom_power(&Atom::Pow(Shared::new(base)), e * k)?)?;
    }
    for (p, k) in factor(a.denom()) {
        let base = NormalForm::constant(Rational::from_integer(p));
        out = out.mul(&atom_power(&Atom::Pow(Shared::new(base)), -e * k)?)?;
    }
    Ok(out)
}
