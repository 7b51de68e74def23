//! Exact linear algebra over the rationals.
//!
//! Echelon forms are computed fraction-free (Bareiss) over integers; the
//! final reduced form is recovered with rational back-substitution.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational;

/// Fraction-free forward elimination in place. Returns the pivot columns;
/// rows past the rank are zero afterwards. Every division is exact.
pub fn bareiss<T>(m: &mut [Vec<T>]) -> Vec<usize>
where
    T: Integer + Clone,
{
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut prev = T::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            let a = m[r][c].clone();
            let b = m[i][c].clone();
            for j in c + 1..cols {
                let v = a.clone() * m[i][j].clone() - b.clone() * m[r][j].clone();
                m[i][j] = v.div_floor(&prev);
            }
            m[i][c] = T::zero();
        }
        for j in 0..c {
            if r + 1 < rows {
                for row in m.iter_mut().skip(r + 1) {
                    row[j] = T::zero();
                }
            }
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Scale a rational row to a primitive integer row with positive leading
/// entry.
pub fn primitive(row: &[Rational]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = row.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    let sign = ints.iter().find(|x| !x.is_zero()).map_or(false, |x| x.is_negative());
    ints.into_iter().map(|x| if sign { -(x / &g) } else { x / &g }).collect()
}

const P: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn to_mod(x: &BigInt) -> u64 {
    let m = x.mod_floor(&BigInt::from(P));
    m.to_u64().unwrap()
}

/// Indices of a maximal subset of rows that is independent modulo a prime.
/// Such rows are independent over the rationals too.
fn independent_mod_p(rows: &[Vec<BigInt>]) -> Vec<usize> {
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut keep = Vec::new();
    for (ri, row) in rows.iter().enumerate() {
        let mut v: Vec<u64> = row.iter().map(to_mod).collect();
        for (pc, b) in &basis {
            let f = v[*pc];
            if f != 0 {
                for j in 0..v.len() {
                    if b[j] != 0 {
                        v[j] = (v[j] + P - mulmod(f, b[j])) % P;
                    }
                }
            }
        }
        if let Some(pc) = v.iter().position(|&x| x != 0) {
            let inv = powmod(v[pc], P - 2);
            for x in v.iter_mut() {
                *x = mulmod(*x, inv);
            }
            basis.push((pc, v));
            keep.push(ri);
        }
    }
    keep
}

/// Reduced row echelon form of an integer echelon matrix, as rationals.
fn back_substitute(m: &[Vec<BigInt>], pivots: &[usize]) -> Vec<Vec<Rational>> {
    let mut rows: Vec<Vec<Rational>> = m[..pivots.len()]
        .iter()
        .map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
        .collect();
    for (i, &pc) in pivots.iter().enumerate().rev() {
        let inv = rows[i][pc].recip();
        for x in rows[i].iter_mut() {
            *x *= &inv;
        }
        for k in 0..i {
            let f = rows[k][pc].clone();
            if !f.is_zero() {
                let (head, tail) = rows.split_at_mut(i);
                for (x, y) in head[k].iter_mut().zip(tail[0].iter()) {
                    *x -= &f * y;
                }
            }
        }
    }
    rows
}

/// Reduced row echelon form and pivot columns.
pub fn rref(rows: &[Vec<Rational>], ncols: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let ints: Vec<Vec<BigInt>> = {
        let set: BTreeSet<Vec<BigInt>> =
            rows.iter().map(|r| primitive(r)).filter(|r| r.iter().any(|x| !x.is_zero())).collect();
        set.into_iter().collect()
    };
    if ints.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let keep = independent_mod_p(&ints);
    let mut m: Vec<Vec<BigInt>> = keep.iter().map(|&i| ints[i].clone()).collect();
    let pivots = bareiss(&mut m);
    let reduced = back_substitute(&m, &pivots);
    // rows dependent mod p but not over Q would be lost; confirm every
    // input row lies in the span, else redo with all rows
    let ok = ints.iter().all(|r| in_row_space(&reduced, &pivots, r));
    if ok {
        return (reduced, pivots);
    }
    let mut m = ints;
    let pivots = bareiss(&mut m);
    let reduced = back_substitute(&m, &pivots);
    let _ = ncols;
    (reduced, pivots)
}

fn in_row_space(reduced: &[Vec<Rational>], pivots: &[usize], row: &[BigInt]) -> bool {
    let mut v: Vec<Rational> = row.iter().map(|x| Rational::from_integer(x.clone())).collect();
    for (r, &pc) in reduced.iter().zip(pivots) {
        let f = v[pc].clone();
        if !f.is_zero() {
            for (x, y) in v.iter_mut().zip(r) {
                *x -= &f * y;
            }
        }
    }
    v.iter().all(Zero::is_zero)
}

pub fn rank(rows: &[Vec<Rational>], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// Basis of `{v : A v = 0}` in reduced echelon form (first nonzero entry of
/// each vector is 1, vectors ordered by that position).
pub fn nullspace(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let (reduced, pivots) = rref(rows, ncols);
    let pivset: BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivset.contains(c)) {
        let mut v = vec![Rational::zero(); ncols];
        v[free] = Rational::one();
        for (r, &pc) in reduced.iter().zip(&pivots) {
            v[pc] = -r[free].clone();
        }
        basis.push(v);
    }
    let (b, _) = rref(&basis, ncols);
    b
}

/// Exact solution of `A x = b`, or `None` when inconsistent. Free
/// variables are set to zero.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.first().map_or(0, Vec::len);
    let aug: Vec<Vec<Rational>> =
        a.iter().zip(b).map(|(r, bi)| r.iter().cloned().chain(std::iter::once(bi.clone())).collect()).collect();
    let (reduced, pivots) = rref(&aug, n + 1);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (r, &pc) in reduced.iter().zip(&pivots) {
        x[pc] = r[n].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn bareiss_on_small_integers() {
        let mut a: Vec<Vec<i64>> = vec![vec![2, 3, 1], vec![4, 7, 5], vec![6, 18, 22]];
        let piv = bareiss(&mut a);
        assert_eq!(piv, vec![0, 1, 2]);
        // last pivot is the determinant
        assert_eq!(a[2][2], 2 * (7 * 22 - 5 * 18) - 3 * (4 * 22 - 5 * 6) + (4 * 18 - 7 * 6));
    }

    #[test]
    fn nullspace_of_rank_deficient() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 1);
        for r in &a {
            let dot: Rational = r.iter().zip(&ns[0]).map(|(x, y)| x * y).sum();
            assert!(dot.is_zero());
        }
        assert!(ns[0][0].is_one());
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = m(&[&[1, 1], &[1, -1]]);
        let x = solve(&a, &[q(3), q(1)]).unwrap();
        assert_eq!(x, vec![q(2), q(1)]);
        let a = m(&[&[1, 1], &[2, 2]]);
        assert!(solve(&a, &[q(1), q(3)]).is_none());
    }

    #[test]
    fn rank_counts_independent_rows() {
        assert_eq!(rank(&m(&[&[1, 0], &[0, 1], &[1, 1]]), 2), 2);
        assert_eq!(rank(&m(&[&[0, 0]]), 2), 0);
    }
}
