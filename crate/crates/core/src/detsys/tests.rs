use std::time::Instant;

use super::*;
use crate::jet::tests::{kdv, GENERATORS};

fn golden(coords: Arc<[Symbol]>) -> DeterminingSystem {
    DeterminingSystem::from_text(include_str!("../../../../data/determining.golden"), coords).unwrap()
}

#[test]
fn ansatz_size() {
    for d in 1..=3 {
        let a = PolyAnsatz::new(5, d);
        let binom = (1..=d as usize).fold(1, |acc, i| acc * (5 + i) / i);
        assert_eq!(a.len(), 5 * binom);
    }
    assert_eq!(PolyAnsatz::new(5, 1).monomials[1], vec![1, 0, 0, 0, 0]);
}

#[test]
fn golden_system_parses() {
    let pde = kdv();
    let g = golden(pde.coordinates().into());
    assert_eq!(g.len(), 27);
    let basis = solve_poly_ansatz(&g, 2).unwrap();
    assert_eq!(basis.dimension(), 10);
}

#[test]
fn extracted_system_matches_golden_and_generators() {
    let pde = kdv();
    let start = Instant::now();
    let sys = extract_determining(&pde, "t").unwrap();
    eprintln!("extracted {} constraints in {:?}", sys.len(), start.elapsed());
    for line in sys.to_string().lines() {
        assert!(!line.contains("u_"), "jet left in {line}");
    }
    let g = golden(sys.coords.clone());
    for d in [1, 2] {
        let a = solve_poly_ansatz(&sys, d).unwrap();
        let b = solve_poly_ansatz(&g, d).unwrap();
        assert_eq!(a.dimension(), 10, "degree {d}");
        assert_eq!(a.vectors, b.vectors, "degree {d}");
    }
    for s in GENERATORS {
        let v = VectorField::parse(s, &pde).unwrap();
        assert!(sys.is_satisfied_by(&v).unwrap(), "{s}");
        assert!(g.is_satisfied_by(&v).unwrap(), "{s}");
    }
}

#[test]
fn membership() {
    let pde = kdv();
    let g = golden(pde.coordinates().into());
    let basis = solve_poly_ansatz(&g, 1).unwrap();
    for s in GENERATORS {
        let v = VectorField::parse(s, &pde).unwrap();
        let c = check_membership(&basis, &v).expect(s);
        let mut back = VectorField::from_components(vec![NormalForm::zero(); 5]);
        for (ci, f) in c.iter().zip(&basis.fields) {
            let comps = back.components().iter().zip(f.components()).map(|(a, b)| a + &b.scale(ci)).collect();
            back = VectorField::from_components(comps);
        }
        assert_eq!(back, v);
    }
    let combo = VectorField::parse("(0, 0, 3, 2, 0)", &pde).unwrap();
    assert!(check_membership(&basis, &combo).is_some());
    let x = VectorField::parse("(x, 0, 0, 0, 0)", &pde).unwrap();
    assert!(check_membership(&basis, &x).is_none());
    let high = VectorField::parse("(x^3, 0, 0, 0, 0)", &pde).unwrap();
    assert!(check_membership(&basis, &high).is_none());
}

#[test]
fn basis_is_sound_and_normalized() {
    let pde = kdv();
    let g = golden(pde.coordinates().into());
    let basis = solve_poly_ansatz(&g, 2).unwrap();
    let mut last = None;
    for (v, f) in basis.vectors.iter().zip(&basis.fields) {
        let first = v.iter().position(|c| !c.is_zero()).unwrap();
        assert!(v[first].is_one());
        assert!(last.map_or(true, |l| l < first));
        last = Some(first);
        assert!(crate::jet::is_symmetry(f, &pde, "t").unwrap(), "{}", f.display());
    }
}

#[test]
fn perturbed_equation_changes_dimension() {
    let pde = Pde::new(
        &["x", "y", "z", "t"],
        "u",
        "u_t + 6*u_x*u_y - u_xxy + u_xxxxz + 60*u_x^2*u_z + 10*u_xxx*u_z + 20*u_x*u_xxz",
    )
    .unwrap();
    let sys = extract_determining(&pde, "t").unwrap();
    assert_ne!(solve_poly_ansatz(&sys, 2).unwrap().dimension(), 10);
}
