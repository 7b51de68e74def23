//! Solutions of the reduced equations, lifted back through each reduction in
//! turn, must solve every equation along the way and finally the full one.

use liesym::data::{kdv31, CATALOG};
use liesym::expr::{parse_with, Expr, ParseContext};
use liesym::verify::catalog::{parse_catalog, reduction_of};
use liesym::verify::{residual, Sampling, SymbolicVerdict};
use liesym::normalize;

/// Lift `solution` (over the innermost reduction's variables) through the
/// named reductions, innermost first, checking the base equation of each.
fn lift_chain(solution: &str, chain: &[&str]) -> Expr {
    let pde = kdv31();
    let entries = parse_catalog(CATALOG).unwrap();
    let sampling = Sampling { points: 40, ..Sampling::default() };
    let reds: Vec<_> = chain
        .iter()
        .map(|n| reduction_of(entries.iter().find(|e| e.name == *n).unwrap(), &pde).unwrap())
        .collect();
    let vars: Vec<&str> = reds[0].defs.iter().map(|(s, _)| s.name()).collect();
    let mut f = parse_with(solution, &ParseContext::default().with_independents(&vars)).unwrap();
    let r = residual(&reds[0].claim, &f, &sampling, chain[0]).unwrap();
    assert_eq!(r.symbolic, SymbolicVerdict::Zero, "{solution} in the {} equation", chain[0]);
    for (name, red) in chain.iter().zip(&reds) {
        f = red.lift(&f).unwrap();
        let r = residual(&red.base, &f, &sampling, name).unwrap();
        assert!(r.numeric_pass(1e-9), "{name}: {:?} for {f}", r.numeric_max);
        assert_ne!(r.symbolic, SymbolicVerdict::Nonzero, "{name}: {f}");
    }
    f
}

fn same(a: &Expr, b: &str) -> bool {
    let b = parse_with(b, &ParseContext::default()).unwrap();
    normalize(a).unwrap() == normalize(&b).unwrap()
}

#[test]
fn quadratic_through_time_scaling() {
    let u = lift_chain("w^2/6", &["reduce-v1-similarity", "reduce-v1-translation", "reduce-v1-prefactor"]);
    assert!(same(&u, "x*y/(6*t)"), "{u}");
}

#[test]
fn linear_through_xy_scaling() {
    let u = lift_chain("w/10 + gamma", &["reduce-v3-scaling-xy-ode", "reduce-v3-scaling-xy", "reduce-v3"]);
    assert!(same(&u, "x*z/(10*y) + gamma*z^(1/2)*y^(-1/2)"), "{u}");
}

#[test]
fn arbitrary_invariant_function_through_galilean_reduction() {
    let u = lift_chain("tanh(T/Y)*((3*Z*T - 5*Y^2)/(3*T))^2 + exp(-T/Y)", &["reduce-v8"]);
    assert!(same(&u, "x*y/(6*t) + tanh(t/y)*((3*z*t - 5*y^2)/(3*t))^2 + exp(-t/y)"), "{u}");
}

#[test]
fn constant_through_xy_scaling() {
    lift_chain("alpha", &["reduce-v3-scaling-xy-ode", "reduce-v3-scaling-xy", "reduce-v3"]);
}
