use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};

use super::{atom_power, exp_nf, sech_nf, tanh_nf, Atom, Monomial, NormalForm};
use crate::expr::Symbol;
use crate::{Exponent, Rational, Result};

/// Action of a derivation on leaf atoms (symbols and jet variables).
/// `None` means the leaf is constant.
pub type Leaf<'a> = &'a dyn Fn(&Atom) -> Option<NormalForm>;

impl NormalForm {
    /// Apply the derivation determined by `leaf`, extended to composite atoms
    /// by the chain rule.
    pub fn derive(&self, leaf: Leaf<'_>) -> Result<NormalForm> {
        self.derive_memo(leaf, &mut HashMap::new())
    }

    pub fn derive_memo(&self, leaf: Leaf<'_>, memo: &mut HashMap<Atom, NormalForm>) -> Result<NormalForm> {
        let mut out = NormalForm::zero();
        for (m, c) in self.terms() {
            for (a, k) in m.factors() {
                let da = atom_derivative(a, leaf, memo)?;
                if da.is_zero() {
                    continue;
                }
                let rest = NormalForm::term(m.without(a), c * crate::expr::exp_to_rational(*k));
                let lower = atom_power(a, *k - Exponent::one())?;
                out = out + rest.mul(&lower)?.mul(&da)?;
            }
            out = out.check()?;
        }
        Ok(out)
    }

    /// Partial derivative with respect to a symbol.
    pub fn diff_sym(&self, s: &Symbol) -> Result<NormalForm> {
        let s = s.clone();
        self.derive(&move |a| match a {
            Atom::Sym(t) if *t == s => Some(NormalForm::one()),
            _ => None,
        })
    }

    /// Replace atoms. `f` returns the new value of a leaf or composite atom;
    /// composite atoms it leaves alone are rebuilt from substituted parts.
    pub fn substitute_atoms(&self, f: &dyn Fn(&Atom) -> Option<NormalForm>) -> Result<NormalForm> {
        let mut memo = HashMap::new();
        self.subst_memo(f, &mut memo)
    }

    fn subst_memo(
        &self,
        f: &dyn Fn(&Atom) -> Option<NormalForm>,
        memo: &mut HashMap<Atom, Option<NormalForm>>,
    ) -> Result<NormalForm> {
        let mut out = NormalForm::zero();
        for (m, c) in self.terms() {
            let mut kept = Monomial::one();
            let mut changed = Vec::new();
            for (a, k) in m.factors() {
                match subst_value(a, f, memo)? {
                    None => kept = kept.with_factor(a.clone(), *k),
                    Some(v) => changed.push((v, *k)),
                }
            }
            let mut t = NormalForm::term(kept, c.clone());
            for (v, k) in changed {
                t = t.mul(&v.pow(k)?)?;
            }
            out = (out + t).check()?;
        }
        Ok(out)
    }

    /// Simultaneous substitution of symbols.
    pub fn subs_syms(&self, pairs: &[(Symbol, NormalForm)]) -> Result<NormalForm> {
        let map: BTreeMap<&Symbol, &NormalForm> = pairs.iter().map(|(s, v)| (s, v)).collect();
        self.substitute_atoms(&|a| match a {
            Atom::Sym(s) => map.get(s).map(|v| (*v).clone()),
            _ => None,
        })
    }

    /// Group terms by the part of their monomial selected by `pred`.
    pub fn collect(&self, pred: &dyn Fn(&Atom) -> bool) -> BTreeMap<Monomial, NormalForm> {
        let mut out: BTreeMap<Monomial, BTreeMap<Monomial, Rational>> = BTreeMap::new();
        for (m, c) in self.terms() {
            let (sel, rest) = m.split(pred);
            let e = out.entry(sel).or_default();
            let v = e.entry(rest).or_insert_with(Rational::zero);
            *v += c;
        }
        out.into_iter()
            .map(|(k, v)| (k, NormalForm::from_terms(v)))
            .filter(|(_, v)| !v.is_zero())
            .collect()
    }

    /// Top-level atoms appearing in some term.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.terms().flat_map(|(m, _)| m.factors().iter().map(|(a, _)| a.clone())).collect()
    }

    /// Whether any atom at any depth satisfies `pred`.
    pub fn any_atom(&self, pred: &dyn Fn(&Atom) -> bool) -> bool {
        self.terms().any(|(m, _)| {
            m.factors().iter().any(|(a, _)| {
                pred(a)
                    || match a {
                        Atom::Func(fa) => fa.args.iter().any(|x| x.any_atom(pred)),
                        Atom::Tanh(t) | Atom::Sech(t) | Atom::Pow(t) => t.any_atom(pred),
                        Atom::Exp(mm) => NormalForm::from_monomial((**mm).clone()).any_atom(pred),
                        _ => false,
                    }
            })
        })
    }

    /// Multiply through by powers of every symbolic base that occurs with a
    /// negative exponent, until none is left.
    pub fn numerator(&self) -> Result<NormalForm> {
        let mut cur = self.clone();
        for _ in 0..64 {
            let mut need: BTreeMap<Atom, Exponent> = BTreeMap::new();
            for (m, _) in cur.terms() {
                for (a, e) in m.factors() {
                    if let Atom::Pow(b) = a {
                        if !b.is_constant() && *e < Exponent::zero() {
                            let k = (-*e).ceil();
                            let slot = need.entry(a.clone()).or_insert(k);
                            if k > *slot {
                                *slot = k;
                            }
                        }
                    }
                }
            }
            if need.is_empty() {
                return Ok(cur);
            }
            let mut mono = Monomial::one();
            for (a, k) in need {
                mono = mono.with_factor(a, k);
            }
            cur = cur.mul(&NormalForm::from_monomial(mono))?;
        }
        Err(crate::Error::ResourceLimit { limit: 64 })
    }

    /// Exact zero test valid in the presence of symbolic denominators.
    pub fn is_identically_zero(&self) -> Result<bool> {
        if self.is_zero() {
            return Ok(true);
        }
        Ok(self.numerator()?.is_zero())
    }
}

fn atom_derivative(a: &Atom, leaf: Leaf<'_>, memo: &mut HashMap<Atom, NormalForm>) -> Result<NormalForm> {
    match a {
        Atom::Sym(_) | Atom::Jet(_) => return Ok(leaf(a).unwrap_or_default()),
        Atom::Imag => return Ok(NormalForm::zero()),
        _ => {}
    }
    if let Some(d) = memo.get(a) {
        return Ok(d.clone());
    }
    let d = match a {
        Atom::Func(fa) => {
            let mut out = NormalForm::zero();
            for (k, arg) in fa.args.iter().enumerate() {
                let darg = arg.derive_memo(leaf, memo)?;
                if darg.is_zero() {
                    continue;
                }
                let f = NormalForm::atom(Atom::func(fa.name.clone(), fa.deriv.bumped(k), fa.args.clone()));
                out = out + f.mul(&darg)?;
            }
            out
        }
        Atom::Tanh(theta) => {
            let dt = theta.derive_memo(leaf, memo)?;
            if dt.is_zero() {
                dt
            } else {
                let t = NormalForm::atom(a.clone());
                (NormalForm::one() - t.mul(&t)?).mul(&dt)?
            }
        }
        Atom::Sech(theta) => {
            let dt = theta.derive_memo(leaf, memo)?;
            if dt.is_zero() {
                dt
            } else {
                let st = NormalForm::atom(a.clone()).mul(&NormalForm::atom(Atom::Tanh(theta.clone())))?;
                (-st).mul(&dt)?
            }
        }
        Atom::Exp(m) => {
            let dm = NormalForm::from_monomial((**m).clone()).derive_memo(leaf, memo)?;
            if dm.is_zero() {
                dm
            } else {
                NormalForm::atom(a.clone()).mul(&dm)?
            }
        }
        Atom::Pow(b) => b.derive_memo(leaf, memo)?,
        Atom::Sym(_) | Atom::Jet(_) | Atom::Imag => unreachable!(),
    };
    memo.insert(a.clone(), d.clone());
    Ok(d)
}

/// New value of `a` under substitution, or `None` when unchanged. For
/// `Pow(B)` the returned value is the new base.
fn subst_value(
    a: &Atom,
    f: &dyn Fn(&Atom) -> Option<NormalForm>,
    memo: &mut HashMap<Atom, Option<NormalForm>>,
) -> Result<Option<NormalForm>> {
    if !matches!(a, Atom::Pow(_)) {
        if let Some(v) = f(a) {
            return Ok(Some(v));
        }
    }
    if matches!(a, Atom::Sym(_) | Atom::Jet(_) | Atom::Imag) {
        return Ok(None);
    }
    if let Some(v) = memo.get(a) {
        return Ok(v.clone());
    }
    let v = match a {
        Atom::Func(fa) => {
            let args = fa.args.iter().map(|x| x.subst_memo(f, memo)).collect::<Result<Vec<_>>>()?;
            if args == fa.args {
                None
            } else {
                Some(NormalForm::atom(Atom::func(fa.name.clone(), fa.deriv.clone(), args)))
            }
        }
        Atom::Tanh(t) => {
            let n = t.subst_memo(f, memo)?;
            if n == **t {
                None
            } else {
                Some(tanh_nf(&n))
            }
        }
        Atom::Sech(t) => {
            let n = t.subst_memo(f, memo)?;
            if n == **t {
                None
            } else {
                Some(sech_nf(&n))
            }
        }
        Atom::Exp(m) => {
            let old = NormalForm::from_monomial((**m).clone());
            let n = old.subst_memo(f, memo)?;
            if n == old {
                None
            } else {
                Some(exp_nf(&n)?)
            }
        }
        Atom::Pow(b) => {
            let n = b.subst_memo(f, memo)?;
            if n == **b {
                None
            } else {
                Some(n)
            }
        }
        Atom::Sym(_) | Atom::Jet(_) | Atom::Imag => unreachable!(),
    };
    memo.insert(a.clone(), v.clone());
    Ok(v)
}
