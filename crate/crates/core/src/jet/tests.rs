use super::*;
use crate::expr::parse_with;

pub(crate) fn kdv() -> Pde {
    Pde::from_text(include_str!("../../../../data/kdv31.pde")).unwrap()
}

fn nf(pde: &Pde, s: &str) -> NormalForm {
    normalize(&parse_with(s, &pde.parse_context()).unwrap()).unwrap()
}

fn field(pde: &Pde, s: &str) -> VectorField {
    VectorField::parse(s, pde).unwrap()
}

pub(crate) const GENERATORS: [&str; 10] = [
    "(x/4, y/2, 0, t, -u/4)",
    "(0, 0, 0, 0, 1)",
    "(0, 0, 0, 1, 0)",
    "(0, 3*t/10, y, 0, x/20)",
    "(-x/4, y/2, z, 0, u/4)",
    "(0, 0, 1, 0, 0)",
    "(0, 1, 0, 0, 0)",
    "(t, 0, 0, 0, y/6)",
    "(y, 0, 0, 0, z/10)",
    "(1, 0, 0, 0, 0)",
];

#[test]
fn pde_file_reads() {
    let p = kdv();
    assert_eq!(p.order, 5);
    assert_eq!(p.vars.len(), 4);
}

#[test]
fn total_derivative_examples() {
    let p = kdv();
    let x = Symbol::var("x");
    let t = Symbol::var("t");
    assert_eq!(total_derivative(&nf(&p, "u_x"), &x, &p.vars).unwrap(), nf(&p, "u_xx"));
    assert_eq!(total_derivative(&nf(&p, "u_x^2"), &x, &p.vars).unwrap(), nf(&p, "2*u_x*u_xx"));
    assert_eq!(total_derivative(&nf(&p, "x*u_y"), &t, &p.vars).unwrap(), nf(&p, "x*u_yt"));
    assert_eq!(total_derivative(&nf(&p, "x*u"), &x, &p.vars).unwrap(), nf(&p, "u + x*u_x"));
}

#[test]
fn translation_and_shift_conditions_vanish() {
    let p = kdv();
    assert!(symmetry_condition(&field(&p, "(0, 0, 0, 0, 1)"), &p).unwrap().is_zero());
    assert!(symmetry_condition(&field(&p, "(0, 0, 0, 1, 0)"), &p).unwrap().is_zero());
}

#[test]
fn translation_prolongs_to_zero() {
    let p = kdv();
    let mut pr = Prolongation::new(&field(&p, "(1, 0, 0, 0, 0)"), &p).unwrap();
    assert!(pr.coefficient(&MultiIndex(vec![1, 0, 0, 0])).unwrap().is_zero());
    let mut pr = Prolongation::new(&field(&p, "(0, 0, 0, 0, 1)"), &p).unwrap();
    assert!(pr.coefficient(&MultiIndex(vec![4, 0, 1, 0])).unwrap().is_zero());
}

#[test]
fn scaling_condition_is_multiple_of_delta() {
    let p = kdv();
    let c = symmetry_condition(&field(&p, GENERATORS[0]), &p).unwrap();
    let lhs = &c + &p.delta_nf.scale(&rat(5, 4));
    assert!(lhs.is_zero(), "{c}");
}

#[test]
fn on_shell_examples() {
    let p = kdv();
    let mut os = OnShell::new(&p, "t").unwrap();
    assert!(os.apply(&p.delta_nf).unwrap().is_zero());
    let got = os.apply(&nf(&p, "u_t + 6*u_x*u_y")).unwrap();
    assert_eq!(got, nf(&p, "-(u_xxy + u_xxxxz + 60*u_x^2*u_z + 10*u_xxx*u_z + 20*u_x*u_xxz)"));
    let got = os.apply(&nf(&p, "u_xt")).unwrap();
    let want = total_derivative(&nf(&p, "-(6*u_x*u_y + u_xxy + u_xxxxz + 60*u_x^2*u_z + 10*u_xxx*u_z + 20*u_x*u_xxz)"), &Symbol::var("x"), &p.vars).unwrap();
    assert_eq!(got, want);
}

#[test]
fn lead_must_be_linear() {
    let p = Pde::new(&["x", "t"], "u", "u_t^2 + u_xx").unwrap();
    assert!(matches!(OnShell::new(&p, "t"), Err(Error::NotLinear(_))));
}

#[test]
fn every_generator_is_a_symmetry() {
    let p = kdv();
    for g in GENERATORS {
        assert!(is_symmetry(&field(&p, g), &p, "t").unwrap(), "{g}");
    }
    assert!(!is_symmetry(&field(&p, "(x, 0, 0, 0, 0)"), &p, "t").unwrap());
}

/// The textbook first- and higher-order forms, built from total
/// derivatives of the generic coefficients.
#[test]
fn recursion_matches_closed_forms() {
    let p = kdv();
    let g = generic_field(&p);
    let (xi, _) = g.on_jet(&p).unwrap();
    let mut pr = Prolongation::new(&g, &p).unwrap();
    let mut td = TotalDerivative::new(p.vars.clone());
    let jet = |s: &str| NormalForm::jet(&parse_jet(&p, s));
    let cases: [(&str, usize, &str, [&str; 4]); 8] = [
        ("t", 3, "", ["u_x", "u_y", "u_z", "u_t"]),
        ("x", 0, "", ["u_x", "u_y", "u_z", "u_t"]),
        ("y", 1, "", ["u_x", "u_y", "u_z", "u_t"]),
        ("z", 2, "", ["u_x", "u_y", "u_z", "u_t"]),
        ("xxx", 0, "xx", ["u_xxx", "u_xxy", "u_xxz", "u_xxt"]),
        ("xxy", 1, "xx", ["u_xxx", "u_xxy", "u_xxz", "u_xxt"]),
        ("xxz", 2, "xx", ["u_xxx", "u_xxy", "u_xxz", "u_xxt"]),
        ("xxxxz", 2, "xxxx", ["u_xxxxx", "u_xxxxy", "u_xxxxz", "u_xxxxt"]),
    ];
    for (target, dir, base, us) in cases {
        let base_name = if base.is_empty() { "u".to_string() } else { format!("u_{base}") };
        let base_coeff = pr.coefficient(&parse_jet(&p, &base_name).index).unwrap();
        let mut want = td.apply(&base_coeff, dir).unwrap();
        for k in 0..4 {
            let dk = td.apply(&xi[k], dir).unwrap();
            want = want - jet(us[k]).mul(&dk).unwrap();
        }
        let got = pr.coefficient(&parse_jet(&p, &format!("u_{target}")).index).unwrap();
        assert_eq!(got, want, "eta^{target}");
    }
}

fn parse_jet(p: &Pde, s: &str) -> JetVar {
    match parse_with(s, &p.parse_context()).unwrap().kind() {
        crate::ExprKind::Jet(j) => j.clone(),
        _ => panic!("{s} is not a jet"),
    }
}

#[test]
fn first_order_coefficient_prints_canonically() {
    let p = kdv();
    let mut pr = Prolongation::new(&generic_field(&p), &p).unwrap();
    let eta_x = pr.coefficient(&MultiIndex(vec![1, 0, 0, 0])).unwrap();
    let ctx = p.parse_context().with_functions(&["xi1", "xi2", "xi3", "xi4", "eta"]);
    let a = "x, y, z, t, u";
    let hand = format!(
        "eta[1,0,0,0,0]({a}) + u_x*eta[0,0,0,0,1]({a}) \
         - u_x*(xi1[1,0,0,0,0]({a}) + u_x*xi1[0,0,0,0,1]({a})) \
         - u_y*(xi2[1,0,0,0,0]({a}) + u_x*xi2[0,0,0,0,1]({a})) \
         - u_z*(xi3[1,0,0,0,0]({a}) + u_x*xi3[0,0,0,0,1]({a})) \
         - u_t*(xi4[1,0,0,0,0]({a}) + u_x*xi4[0,0,0,0,1]({a}))"
    );
    let hand = normalize(&parse_with(&hand, &ctx).unwrap()).unwrap();
    assert_eq!(eta_x.to_string(), hand.to_string());
}

#[test]
fn condition_is_linear_in_the_field() {
    let p = kdv();
    let a = field(&p, GENERATORS[3]);
    let b = field(&p, "(x*t, y^2, 0, 0, u*z)");
    let sum = VectorField::from_components(
        a.components().iter().zip(b.components()).map(|(x, y)| x.scale(&rat(2, 1)) + y.scale(&rat(-3, 5))).collect(),
    );
    let lhs = symmetry_condition(&sum, &p).unwrap();
    let rhs = symmetry_condition(&a, &p).unwrap().scale(&rat(2, 1)) + symmetry_condition(&b, &p).unwrap().scale(&rat(-3, 5));
    assert_eq!(lhs, rhs);
}

#[test]
fn lead_variable() {
    assert_eq!(kdv().lead_var().map(Symbol::name), Some("t"));
    let heat = Pde::new(&["x", "t"], "u", "u_t - u_xx").unwrap();
    assert_eq!(heat.lead_var().map(Symbol::name), Some("t"));
    let burgers = Pde::new(&["x", "t"], "u", "u_t + u*u_x - u_xx").unwrap();
    assert_eq!(burgers.lead_var().map(Symbol::name), Some("t"));
    let none = Pde::new(&["x", "t"], "u", "u_t^2 - u_xx").unwrap();
    assert_eq!(none.lead_var().map(Symbol::name), None);
}
