use super::*;
use crate::jet::tests::{kdv, GENERATORS};

fn generators() -> (Vec<VectorField>, Vec<Symbol>) {
    let pde = kdv();
    (GENERATORS.iter().map(|s| VectorField::parse(s, &pde).unwrap()).collect(), pde.coordinates())
}

fn q(n: i64, d: i64) -> Rational {
    crate::jet::rat(n, d)
}

#[test]
fn hand_brackets() {
    let (v, c) = generators();
    let b = lie_bracket(&v[0], &v[1], &c).unwrap();
    assert_eq!(b, v[1].scale(&q(1, 4)));
    let b = lie_bracket(&v[3], &v[9], &c).unwrap();
    assert_eq!(b, v[1].scale(&q(-1, 20)));
    assert!(lie_bracket(&v[2], &v[2], &c).unwrap().is_zero());
}

#[test]
fn table_matches_transcription() {
    let (v, c) = generators();
    let names = default_names(10);
    let t = commutator_table(&v, &names, &c).unwrap();
    assert!(t.is_closed());
    assert!(t.is_skew());
    let golden = GoldenTable::parse(include_str!("../../../../data/commutators.golden"), &names).unwrap();
    let diff = t.compare(&golden);
    assert!(diff.is_empty(), "{diff:?}");
    let sc = t.structure_constants().unwrap();
    assert!(sc.skew_violations().is_empty());
    assert!(sc.jacobi_violations().is_empty());
    assert_eq!(rank(&v), 10);
    let s = t.to_string();
    assert_eq!(s.lines().count(), 11);
    assert!(s.contains("-1/20*v2"));
}

#[test]
fn translations_commute() {
    let (v, c) = generators();
    let sub: Vec<VectorField> = [1, 2, 5, 6, 9].iter().map(|&i| v[i].clone()).collect();
    let t = commutator_table(&sub, &default_names(5), &c).unwrap();
    assert!(t.entries.iter().flatten().all(|e| e.as_ref().unwrap().iter().all(Zero::is_zero)));
}

#[test]
fn corrupted_constants_fail_jacobi() {
    let (v, c) = generators();
    let t = commutator_table(&v, &default_names(10), &c).unwrap();
    let mut sc = t.structure_constants().unwrap();
    sc.c[0][1][1] = q(1, 3);
    sc.c[1][0][1] = q(-1, 3);
    assert!(!sc.jacobi_violations().is_empty());
    let one = StructureConstants { c: vec![vec![vec![Rational::zero()]]] };
    assert!(one.jacobi_violations().is_empty());
}

#[test]
fn escape_from_span_is_reported() {
    let (v, c) = generators();
    let pde = kdv();
    let mut basis = vec![v[9].clone()];
    basis.push(VectorField::parse("(x^2, 0, 0, 0, 0)", &pde).unwrap());
    let t = commutator_table(&basis, &default_names(2), &c).unwrap();
    assert!(!t.is_closed());
    assert_eq!(t.failures(), vec![(0, 1), (1, 0)]);
}

#[test]
fn golden_mismatch_is_reported() {
    let (v, c) = generators();
    let names = default_names(10);
    let t = commutator_table(&v, &names, &c).unwrap();
    let text = include_str!("../../../../data/commutators.golden").replace("[v3, v8] = v10", "[v3, v8] = 2*v10");
    let golden = GoldenTable::parse(&text, &names).unwrap();
    let diff = t.compare(&golden);
    assert_eq!(diff.len(), 2);
    assert_eq!((diff[0].0, diff[0].1), (2, 7));
}
