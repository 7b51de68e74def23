use super::*;
use crate::jet::tests::{kdv, GENERATORS};
use crate::jet::rat;

fn setup() -> (Vec<VectorField>, Vec<Symbol>) {
    let pde = kdv();
    (GENERATORS.iter().map(|s| VectorField::parse(s, &pde).unwrap()).collect(), pde.coordinates())
}

fn maps(text: &str, coords: &[Symbol]) -> GroupElement {
    GroupElement::parse(text, coords).unwrap()
}

#[test]
fn closed_forms() {
    let (v, c) = setup();
    assert_eq!(exponentiate(&v[2], &c).unwrap(), maps("(x, y, z, t + eps, u)", &c));
    assert_eq!(
        exponentiate(&v[3], &c).unwrap(),
        maps("(x, y + 3*t*eps/10, z + y*eps + 3*t*eps^2/20, t, u + x*eps/20)", &c)
    );
    assert_eq!(
        exponentiate(&v[0], &c).unwrap(),
        maps("(x*exp(eps/4), y*exp(eps/2), z, t*exp(eps), u*exp(-eps/4))", &c)
    );
}

#[test]
fn every_flow_solves_its_ode_and_group_law() {
    let (v, c) = setup();
    for (i, f) in v.iter().enumerate() {
        let g = exponentiate(f, &c).unwrap();
        assert!(g.is_identity_at_zero().unwrap(), "v{}", i + 1);
        for d in g.flow_defects(f).unwrap() {
            assert!(d.is_identically_zero().unwrap(), "v{}: {d}", i + 1);
        }
        assert!(g.satisfies_group_law().unwrap(), "v{}", i + 1);
    }
}

#[test]
fn mixed_flow_is_not_closed_form() {
    let pde = kdv();
    let c = pde.coordinates();
    let v = VectorField::parse("(x + 1, 0, 0, 0, 0)", &pde).unwrap();
    assert!(matches!(exponentiate(&v, &c), Err(Error::NonClosedForm(_))));
}

#[test]
fn transcribed_groups_against_flows() {
    let (v, c) = setup();
    let refs = parse_reference_groups(REFERENCE_GROUPS, &c).unwrap();
    assert_eq!(refs.len(), 10);
    let expected = [None, Some(1), Some(1), Some(20), Some(4), Some(1), Some(1), Some(6), Some(10), Some(1)];
    for (r, want) in refs.iter().zip(expected) {
        let m = compare_group(&r.group, &v[r.field - 1]).unwrap();
        match want {
            Some(k) => assert_eq!(m, GroupMatch::Rescaled(rat(k, 1)), "{}", r.name),
            None => assert!(matches!(m, GroupMatch::Inconsistent(_)), "{}: {m:?}", r.name),
        }
    }
    if let GroupMatch::Inconsistent(r) = compare_group(&refs[0].group, &v[0]).unwrap() {
        assert_eq!(r, vec![Some(rat(4, 1)), Some(rat(2, 1)), None, Some(rat(4, 1)), Some(rat(4, 1))]);
    }
}

#[test]
fn transcribed_solutions_against_push_forward() {
    let (_, c) = setup();
    let f = generic_solution(&c[..4]);
    let refs = parse_reference_groups(REFERENCE_GROUPS, &c).unwrap();
    let got: Vec<SolutionMatch> =
        refs.iter().map(|r| compare_solution(&r.group, &f, &r.claimed).unwrap()).collect();
    use SolutionMatch::*;
    assert_eq!(got, vec![Mismatch, Reversed, Exact, Mismatch, Mismatch, Exact, Exact, Mismatch, Mismatch, Exact]);
}

#[test]
fn push_forward_examples() {
    let (v, c) = setup();
    let f = generic_solution(&c[..4]);
    let ctx = ParseContext::empty().with_independents(&["x", "y", "z", "t"]).with_functions(&["f"]);
    let p = |s: &str| normalize(&parse_with(s, &ctx).unwrap()).unwrap();
    let g3 = exponentiate(&v[2], &c).unwrap();
    assert_eq!(g3.transform_solution(&f).unwrap(), p("f(x, y, z, t - eps)"));
    let g8 = exponentiate(&v[7], &c).unwrap().rescaled(&rat(6, 1)).unwrap();
    assert_eq!(g8.transform_solution(&f).unwrap(), p("f(x - 6*t*eps, y, z, t) + eps*y"));
    let g4 = exponentiate(&v[3], &c).unwrap().rescaled(&rat(20, 1)).unwrap();
    assert_eq!(
        g4.transform_solution(&f).unwrap(),
        p("f(x, y - 6*t*eps, z - 20*y*eps + 60*t*eps^2, t) + eps*x")
    );
    // u = xy/(6t) stays a solution-shaped rational function under the v8 flow
    let sol = p("x*y/(6*t)");
    let out = g8.transform_solution(&sol).unwrap();
    assert_eq!(out, p("x*y/(6*t)"));
}

#[test]
fn tree_push_forward_agrees_with_normal_form() {
    let (v, c) = setup();
    let ctx = ParseContext::empty().with_independents(&["x", "y", "z", "t"]);
    let f = parse_with("c1*tanh(x - y) + x*y/(6*t)", &ctx).unwrap();
    for field in &v {
        let g = exponentiate(field, &c).unwrap();
        let a = normalize(&g.transform_solution_expr(&f).unwrap()).unwrap();
        let b = g.transform_solution(&normalize(&f).unwrap()).unwrap();
        assert!((&a - &b).is_identically_zero().unwrap(), "{}", field.display());
    }
}
