use super::*;
use crate::expr::{parse, parse_with, ParseContext};

fn nf(s: &str) -> NormalForm {
    normalize(&parse(s).unwrap()).unwrap()
}

fn zero(s: &str) -> bool {
    nf(s).is_identically_zero().unwrap()
}

#[test]
fn expansion_collects_like_terms() {
    assert_eq!(nf("(x + y)^2"), nf("x^2 + 2*x*y + y^2"));
    assert!(nf("(a - b)*(a + b) - a^2 + b^2").is_zero());
}

#[test]
fn imaginary_unit_reduces() {
    assert_eq!(nf("(1 + I)^2"), nf("2*I"));
    assert_eq!(nf("I^3"), nf("-I"));
}

#[test]
fn sech_squared_becomes_tanh() {
    assert!(nf("sech(x)^2 + tanh(x)^2 - 1").is_zero());
    assert!(nf("sech(-x) - sech(x)").is_zero());
    assert!(nf("tanh(-x) + tanh(x)").is_zero());
    assert!(nf("sech(x)^3 - sech(x)*(1 - tanh(x)^2)").is_zero());
}

#[test]
fn exponentials_multiply() {
    assert!(nf("exp(x)*exp(-x) - 1").is_zero());
    assert!(nf("exp(x + y) - exp(x)*exp(y)").is_zero());
    assert!(nf("cosh(x)^2 - sinh(x)^2 - 1").is_zero());
}

#[test]
fn radicals() {
    assert_eq!(nf("sqrt(8)"), nf("2*sqrt(2)"));
    assert!(nf("sqrt(6) - sqrt(2)*sqrt(3)").is_zero());
    assert!(nf("sqrt(1 + x)^2 - 1 - x").is_zero());
    assert!(nf("(-8)^(1/3) + 2").is_zero());
    assert!(nf("sqrt(-4) - 2*I").is_zero());
    assert!(nf("sqrt(z/y)*sqrt(y) - sqrt(z)").is_zero());
    assert!(nf("sqrt(4*x + 4) - 2*sqrt(x + 1)").is_zero());
}

#[test]
fn denominators_clear_for_zero_test() {
    assert!(zero("1/(x - 1) + 1/(1 - x)"));
    assert!(zero("x/(x + 1) - 1/(1 + 1/x)"));
    assert!(zero("1/sqrt(1 + x) - sqrt(1 + x)/(1 + x)"));
    assert!(!zero("1/(x - 1) - 1/(1 - x)"));
}

#[test]
fn derivative_of_kink() {
    let x = Symbol::var("x");
    let d = nf("tanh(k*x)").diff_sym(&x).unwrap();
    assert_eq!(d, nf("k - k*tanh(k*x)^2"));
    let d = nf("sech(x)").diff_sym(&x).unwrap();
    assert_eq!(d, nf("-sech(x)*tanh(x)"));
    let d = nf("sqrt(x^2 + 1)").diff_sym(&x).unwrap();
    assert!((d - nf("x/sqrt(x^2 + 1)")).is_identically_zero().unwrap());
}

#[test]
fn quotient_derivative_matches_tree_route() {
    let t = Symbol::var("t");
    let e = parse("x*y/(6*t) + exp(-x/t)").unwrap();
    let a = normalize(&e.differentiate(&t)).unwrap();
    let b = normalize(&e).unwrap().diff_sym(&t).unwrap();
    assert!((a - b).is_identically_zero().unwrap());
}

#[test]
fn unknown_function_chain_rule() {
    let ctx = ParseContext::default().with_functions(&["f"]);
    let e = normalize(&parse_with("f(x*y)", &ctx).unwrap()).unwrap();
    let d = e.diff_sym(&Symbol::var("x")).unwrap();
    assert_eq!(d, normalize(&parse_with("y*f[1](x*y)", &ctx).unwrap()).unwrap());
}

#[test]
fn symbol_substitution() {
    let e = nf("x^2 + tanh(x)");
    let s = e.subs_syms(&[(Symbol::var("x"), nf("-y"))]).unwrap();
    assert_eq!(s, nf("y^2 - tanh(y)"));
}

#[test]
fn to_expr_round_trips() {
    for s in ["x^2/(1 + x) - 3*I*sqrt(2)", "tanh(2*x - t)^2*sech(x)", "exp(-x/4)*u_xx"] {
        let a = nf(s);
        let b = normalize(&a.to_expr()).unwrap();
        assert_eq!(a, b, "{s}");
    }
}

#[test]
fn expansion_limit() {
    let e = parse("(a + b + c + d + e + f + g + h)^16").unwrap();
    assert!(matches!(normalize(&e), Err(crate::Error::ResourceLimit { .. })));
}
