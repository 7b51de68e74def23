//! Lie brackets of point vector fields, commutator tables and structure
//! constants.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::expr::{parse_with, ParseContext, Symbol};
use crate::jet::VectorField;
use crate::linalg;
use crate::normal::{normalize, Atom, Monomial, NormalForm};
use crate::{Error, Rational, Result};

/// Apply a field as a derivation to a coefficient expression.
pub fn apply_field(v: &VectorField, f: &NormalForm, coords: &[Symbol]) -> Result<NormalForm> {
    let mut out = NormalForm::zero();
    for (c, s) in v.components().iter().zip(coords) {
        if c.is_zero() {
            continue;
        }
        let d = f.diff_sym(s)?;
        if !d.is_zero() {
            out = out + c.mul(&d)?;
        }
    }
    Ok(out)
}

/// `[X, Y]^k = X(Y^k) − Y(X^k)`.
pub fn lie_bracket(x: &VectorField, y: &VectorField, coords: &[Symbol]) -> Result<VectorField> {
    let comps = x
        .components()
        .iter()
        .zip(y.components())
        .map(|(xk, yk)| Ok(apply_field(x, &yk, coords)? - apply_field(y, xk, coords)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(VectorField::from_components(comps))
}

fn linear_combination(basis: &[VectorField], c: &[Rational]) -> VectorField {
    let n = basis.first().map_or(0, |b| b.components().len());
    let mut comps = vec![NormalForm::zero(); n];
    for (b, ci) in basis.iter().zip(c) {
        if ci.is_zero() {
            continue;
        }
        for (acc, bc) in comps.iter_mut().zip(b.components()) {
            acc.add_assign_scaled(&bc, ci);
        }
    }
    VectorField::from_components(comps)
}

/// Coefficient matrix of the fields: one row per (component, monomial),
/// one column per field.
fn coefficient_rows(fields: &[&VectorField]) -> Vec<Vec<Rational>> {
    let mut keys: BTreeSet<(usize, Monomial)> = BTreeSet::new();
    for f in fields {
        for (k, c) in f.components().iter().enumerate() {
            for (m, _) in c.terms() {
                keys.insert((k, m.clone()));
            }
        }
    }
    let comps: Vec<Vec<NormalForm>> = fields.iter().map(|f| f.components()).collect();
    keys.iter().map(|(k, m)| comps.iter().map(|c| c[*k].coefficient(m)).collect()).collect()
}

/// Exact coordinates of `v` in `basis`, or `None` if it leaves the span.
pub fn decompose(basis: &[VectorField], v: &VectorField) -> Option<Vec<Rational>> {
    let mut all: Vec<&VectorField> = basis.iter().collect();
    all.push(v);
    let rows = coefficient_rows(&all);
    let a: Vec<Vec<Rational>> = rows.iter().map(|r| r[..basis.len()].to_vec()).collect();
    let b: Vec<Rational> = rows.iter().map(|r| r[basis.len()].clone()).collect();
    if a.is_empty() {
        return Some(vec![Rational::zero(); basis.len()]);
    }
    let c = linalg::solve(&a, &b)?;
    // free variables are fixed at zero; only accept if independent
    (linear_combination(basis, &c) == *v).then_some(c)
}

/// Rank of the span of the fields over the rationals.
pub fn rank(fields: &[VectorField]) -> usize {
    let refs: Vec<&VectorField> = fields.iter().collect();
    let rows = coefficient_rows(&refs);
    linalg::rank(&rows, fields.len())
}

/// Brackets of every pair of basis fields, decomposed in the basis.
#[derive(Clone, Debug)]
pub struct CommutatorTable {
    pub names: Vec<String>,
    /// `entries[i][j]` holds the coordinates of `[v_i, v_j]`, or `None`
    /// when the bracket is outside the span.
    pub entries: Vec<Vec<Option<Vec<Rational>>>>,
}

pub fn commutator_table(basis: &[VectorField], names: &[String], coords: &[Symbol]) -> Result<CommutatorTable> {
    let n = basis.len();
    let mut entries = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            let b = lie_bracket(&basis[i], &basis[j], coords)?;
            entries[i][j] = decompose(basis, &b);
        }
    }
    Ok(CommutatorTable { names: names.to_vec(), entries })
}

/// `c[i][j][k]`: coefficient of `v_k` in `[v_i, v_j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    pub c: Vec<Vec<Vec<Rational>>>,
}

impl CommutatorTable {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.entries.iter().flatten().all(Option::is_some)
    }

    /// Pairs whose bracket escapes the span.
    pub fn failures(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| self.entries[i][j].is_none()).collect()
    }

    pub fn structure_constants(&self) -> Option<StructureConstants> {
        let c = self
            .entries
            .iter()
            .map(|row| row.iter().map(|e| e.clone()).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        Some(StructureConstants { c })
    }

    pub fn is_skew(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            (0..n).all(|j| match (&self.entries[i][j], &self.entries[j][i]) {
                (Some(a), Some(b)) => a.iter().zip(b).all(|(x, y)| (x + y).is_zero()),
                _ => false,
            })
        })
    }

    pub fn cell(&self, i: usize, j: usize) -> String {
        match &self.entries[i][j] {
            Some(c) => format_combination(c, &self.names),
            None => "?".into(),
        }
    }

    /// Cells differing from a golden table, as `(i, j, computed, expected)`.
    pub fn compare(&self, golden: &GoldenTable) -> Vec<(usize, usize, String, String)> {
        let n = self.len();
        let zero = vec![Rational::zero(); n];
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let expected = golden.cells.get(&(i, j)).cloned().unwrap_or_else(|| zero.clone());
                if self.entries[i][j].as_ref() != Some(&expected) {
                    out.push((i, j, self.cell(i, j), format_combination(&expected, &self.names)));
                }
            }
        }
        out
    }
}

impl fmt::Display for CommutatorTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.len();
        let cells: Vec<Vec<String>> = (0..n).map(|i| (0..n).map(|j| self.cell(i, j)).collect()).collect();
        let head = self.names.iter().map(String::len).max().unwrap_or(0).max(3);
        let widths: Vec<usize> = (0..n)
            .map(|j| cells.iter().map(|r| r[j].len()).chain([self.names[j].len()]).max().unwrap_or(1))
            .collect();
        write!(f, "{:head$}", "[,]")?;
        for (j, w) in widths.iter().enumerate() {
            write!(f, "  {:>w$}", self.names[j])?;
        }
        writeln!(f)?;
        for (i, row) in cells.iter().enumerate() {
            write!(f, "{:head$}", self.names[i])?;
            for (c, w) in row.iter().zip(&widths) {
                write!(f, "  {c:>w$}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// `1/4*v2 - v6`, or `0`.
pub fn format_combination(c: &[Rational], names: &[String]) -> String {
    let mut s = String::new();
    for (ci, name) in c.iter().zip(names) {
        if ci.is_zero() {
            continue;
        }
        let neg = ci.is_negative();
        let a = ci.abs();
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if !a.is_one() {
            s.push_str(&format!("{a}*"));
        }
        s.push_str(name);
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

impl StructureConstants {
    pub fn dim(&self) -> usize {
        self.c.len()
    }

    /// Triples `(i, j, k)` violating antisymmetry.
    pub fn skew_violations(&self) -> Vec<(usize, usize, usize)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if !(&self.c[i][j][k] + &self.c[j][i][k]).is_zero() {
                        out.push((i, j, k));
                    }
                }
            }
        }
        out
    }

    /// Index triples `(i, j, k)` and output index `l` at which the Jacobi
    /// sum is nonzero.
    pub fn jacobi_violations(&self) -> Vec<(usize, usize, usize, usize)> {
        let n = self.dim();
        let c = &self.c;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in 0..n {
                        let mut s = Rational::zero();
                        for m in 0..n {
                            s += &c[i][j][m] * &c[m][k][l];
                            s += &c[j][k][m] * &c[m][i][l];
                            s += &c[k][i][m] * &c[m][j][l];
                        }
                        if !s.is_zero() {
                            out.push((i, j, k, l));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Transcribed commutator table: nonzero cells only, with the lower
/// triangle filled by skew-symmetry.
#[derive(Clone, Debug, Default)]
pub struct GoldenTable {
    pub cells: BTreeMap<(usize, usize), Vec<Rational>>,
}

impl GoldenTable {
    /// Lines of the form `[v1, v2] = 1/4*v2`; `#` starts a comment.
    pub fn parse(text: &str, names: &[String]) -> Result<GoldenTable> {
        let n = names.len();
        let pos = |s: &str| {
            names.iter().position(|x| x == s.trim()).ok_or_else(|| Error::Invalid(format!("unknown basis name `{s}`")))
        };
        let ctx = ParseContext::empty();
        let mut cells = BTreeMap::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Invalid(format!("line {}: expected `[a, b] = combination`", ln + 1));
            let (lhs, rhs) = line.split_once('=').ok_or_else(bad)?;
            let inner = lhs.trim().strip_prefix('[').and_then(|s| s.strip_suffix(']')).ok_or_else(bad)?;
            let (a, b) = inner.split_once(',').ok_or_else(bad)?;
            let (i, j) = (pos(a)?, pos(b)?);
            let nf = normalize(&parse_with(rhs, &ctx)?)?;
            let mut c = vec![Rational::zero(); n];
            for (m, coeff) in nf.terms() {
                let k = match m.factors() {
                    [(Atom::Sym(s), e)] if e.is_one() => pos(s.name())?,
                    _ => return Err(Error::Invalid(format!("line {}: not a linear combination", ln + 1))),
                };
                c[k] = coeff.clone();
            }
            cells.insert((j, i), c.iter().map(|x| -x).collect());
            cells.insert((i, j), c);
        }
        Ok(GoldenTable { cells })
    }
}

/// Names `v1..vn`.
pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("v{i}")).collect()
}

#[cfg(test)]
mod tests;
