//! Acceptance suite: one pass/fail line per criterion. Run with
//! `cargo test -p liesym-cli --test acceptance`; exits nonzero on any failure.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use liesym::data::{self, kdv31};
use liesym::detsys::{check_membership, extract_determining, solve_poly_ansatz, DeterminingSystem};
use liesym::flows::{compare_group, exponentiate, parse_reference_groups, GroupMatch};
use liesym::jet::{is_symmetry, rat, Pde, VectorField};
use liesym::liealg::{commutator_table, GoldenTable};
use liesym::verify::catalog::{parse_catalog, run_entry, verified_solutions, Entry, Outcome, RunOptions, Verdict};
use liesym::verify::group::{verify_group_actions, DEFAULT_EPSILONS};
use liesym::verify::{Precision, Sampling, SymbolicVerdict};

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

struct Ctx {
    pde: Pde,
    gens: Vec<(String, VectorField)>,
    entries: Vec<Entry>,
}

impl Ctx {
    fn run(&self, name: &str, points: usize) -> Result<Outcome, String> {
        let e = self.entries.iter().find(|e| e.name == name).ok_or(format!("no catalog entry {name}"))?;
        let opts = RunOptions { sampling: Sampling { points, ..Sampling::default() } };
        Ok(run_entry(e, &self.pde, &opts))
    }
}

fn determining_system(c: &Ctx) -> Check {
    let start = Instant::now();
    let sys = extract_determining(&c.pde, "t").map_err(|e| e.to_string())?;
    let golden = DeterminingSystem::from_text(data::DETERMINING_GOLDEN, sys.coords.clone()).map_err(|e| e.to_string())?;
    for d in [1, 2] {
        let a = solve_poly_ansatz(&sys, d).map_err(|e| e.to_string())?;
        let b = solve_poly_ansatz(&golden, d).map_err(|e| e.to_string())?;
        if a.vectors != b.vectors {
            return Err(format!("nullspaces differ at degree {d}"));
        }
    }
    let took = start.elapsed();
    ensure(
        took < Duration::from_secs(60),
        format!("{} constraints, nullspaces equal at degrees 1 and 2, {:.2} s", sys.len(), took.as_secs_f64()),
    )
}

fn symmetry_algebra(c: &Ctx) -> Check {
    let sys = extract_determining(&c.pde, "t").map_err(|e| e.to_string())?;
    let mut dims = Vec::new();
    for d in [1, 2] {
        let basis = solve_poly_ansatz(&sys, d).map_err(|e| e.to_string())?;
        dims.push(basis.dimension());
        for (name, v) in &c.gens {
            if check_membership(&basis, v).is_none() {
                return Err(format!("{name} not in the degree-{d} solution space"));
            }
        }
    }
    for (name, v) in &c.gens {
        if !is_symmetry(v, &c.pde, "t").map_err(|e| e.to_string())? {
            return Err(format!("symmetry condition of {name} does not vanish on shell"));
        }
    }
    ensure(dims == [10, 10], format!("dimensions {dims:?}, all 10 generators members, symmetry conditions vanish"))
}

fn commutator_table_check(c: &Ctx) -> Check {
    let names: Vec<String> = c.gens.iter().map(|(n, _)| n.clone()).collect();
    let fields: Vec<VectorField> = c.gens.iter().map(|(_, v)| v.clone()).collect();
    let t = commutator_table(&fields, &names, &c.pde.coordinates()).map_err(|e| e.to_string())?;
    let golden = GoldenTable::parse(data::COMMUTATOR_GOLDEN, &names).map_err(|e| e.to_string())?;
    let diff = t.compare(&golden);
    let sc = t.structure_constants().ok_or("table does not close")?;
    let (skew, jacobi) = (sc.skew_violations().len(), sc.jacobi_violations().len());
    let v4v10 = t.cell(3, 9);
    ensure(
        diff.is_empty() && t.is_skew() && skew == 0 && jacobi == 0 && v4v10 == "-1/20*v2",
        format!(
            "{} differing cells, {skew} skew and {jacobi} Jacobi violations, [v4, v10] = {v4v10}",
            diff.len()
        ),
    )
}

fn flows(c: &Ctx) -> Check {
    let coords = c.pde.coordinates();
    let refs = parse_reference_groups(data::GROUPS, &coords).map_err(|e| e.to_string())?;
    let expected = |i: usize| match i {
        2 | 3 | 6 | 7 | 10 => Some(rat(1, 1)),
        4 => Some(rat(20, 1)),
        8 => Some(rat(6, 1)),
        9 => Some(rat(10, 1)),
        _ => None,
    };
    let mut notes = Vec::new();
    for (i, (name, v)) in c.gens.iter().enumerate() {
        let g = exponentiate(v, &coords).map_err(|e| format!("{name}: {e}"))?;
        let ode = g.flow_defects(v).map_err(|e| e.to_string())?.iter().all(|d| d.is_identically_zero().unwrap_or(false));
        if !ode {
            return Err(format!("flow of {name} fails the flow ODE"));
        }
        if !g.satisfies_group_law().map_err(|e| e.to_string())? {
            return Err(format!("flow of {name} fails the group law"));
        }
        let Some(r) = refs.iter().find(|r| r.field == i + 1) else { continue };
        let m = compare_group(&r.group, v).map_err(|e| e.to_string())?;
        match (i + 1, expected(i + 1), &m) {
            (_, Some(want), GroupMatch::Rescaled(got)) if *got == want => {
                if want != rat(1, 1) {
                    notes.push(format!("{} x{want}", r.name));
                }
            }
            (1, _, GroupMatch::Inconsistent(_)) => notes.push(format!("{} inconsistent (reported)", r.name)),
            (_, None, _) => {}
            (_, _, m) => return Err(format!("{}: unexpected comparison {m:?}", r.name)),
        }
    }
    ensure(
        notes.iter().any(|n| n.contains("inconsistent")) && notes.len() == 4,
        format!("10 closed forms, flow ODE and group law hold; exact g2 g3 g6 g7 g10; {}", notes.join(", ")),
    )
}

const SOLUTIONS: &[&str] = &[
    "u2", "u3", "u3-free", "u17", "u18", "u10", "u11", "u12", "u13", "u14", "u15", "v4-scaling-t",
    "v4-scaling-y", "v4-galilean", "v4-translation", "v6-scaling", "v6-boost-x", "v6-scaling-y", "v6-x-only",
    "v6-boost-y", "v6-y-only", "u16-tanh", "u16-sech", "u16-rational", "u20a", "u20b", "u21-tanh", "u21-sech",
];

fn solution_residuals(c: &Ctx) -> Check {
    let start = Instant::now();
    let mut worst = 0f64;
    for name in SOLUTIONS {
        let o = c.run(name, 100)?;
        let r = o.residual.as_ref().ok_or(format!("{name}: no residual ({})", o.summary))?;
        if r.symbolic != SymbolicVerdict::Zero {
            return Err(format!("{name}: symbolic residual {:?}", r.symbolic));
        }
        let m = r.numeric_max.ok_or(format!("{name}: nothing sampled"))?;
        if !(m < 1e-9) || r.samples < 100 {
            return Err(format!("{name}: numeric {m:.1e} over {} points", r.samples));
        }
        worst = worst.max(m);
    }
    let took = start.elapsed();
    ensure(
        took < Duration::from_secs(120),
        format!("{} solutions symbolic zero, worst numeric {worst:.1e} at 100 points, {:.2} s", SOLUTIONS.len(), took.as_secs_f64()),
    )
}

fn reduced_equations(c: &Ctx) -> Check {
    let holds = [
        "reduce-v3", "reduce-travelling-wave", "reduce-v6", "reduce-v7", "reduce-v8", "reduce-v9", "reduce-v1-prefactor",
    ];
    for name in holds {
        let o = c.run(name, 100)?;
        let r = o.reduction.as_ref().ok_or(format!("{name}: {}", o.summary))?;
        if !(o.passed && o.observed == Some(Verdict::Zero) && r.proportional && r.multiplier_matches != Some(false)) {
            return Err(format!("{name}: {}", o.summary));
        }
    }
    let tw = c.run("reduce-travelling-wave", 100)?;
    let m = tw.reduction.as_ref().and_then(|r| r.multiplier.clone()).unwrap_or_default();
    let bare = c.run("reduce-v1", 100)?;
    ensure(
        bare.passed && bare.observed == Some(Verdict::Nonzero) && m.replace(' ', "") == "a*b",
        format!("6 reductions reproduce, travelling-wave multiplier {m}; v1 holds only with the t^(-1/4) prefactor"),
    )
}

fn reduced_ode_solutions(c: &Ctx) -> Check {
    for name in ["R-constant", "R-quadratic", "f-rational-plus", "f-rational-minus"] {
        let o = c.run(name, 100)?;
        let r = o.residual.as_ref().ok_or(format!("{name}: {}", o.summary))?;
        if r.symbolic != SymbolicVerdict::Zero {
            return Err(format!("{name}: {:?}", r.symbolic));
        }
    }
    let mut conds = Vec::new();
    for name in ["H-rational-branch", "u6"] {
        let o = c.run(name, 100)?;
        let cond = o.condition.as_ref().ok_or(format!("{name}: no condition"))?;
        if !(o.passed && o.observed == Some(Verdict::Conditional) && cond.implied && o.status == liesym::verify::catalog::Status::Flagged) {
            return Err(format!("{name}: {}", o.summary));
        }
        conds.push(format!("{name}: {} = 0", cond.condition));
    }
    Ok(format!("R = alpha1, R = w^2/6, f plus/minus exact; flagged {}", conds.join(", ")))
}

fn weierstrass(c: &Ctx) -> Check {
    let mut parts = Vec::new();
    for name in ["wp-ode", "f-weierstrass"] {
        let o = c.run(name, 100)?;
        let w = o.weierstrass.as_ref().ok_or(format!("{name}: {}", o.summary))?;
        if !(w.max_residual <= 1e-8 && w.samples >= 100) {
            return Err(format!("{name}: {:.1e} over {} points", w.max_residual, w.samples));
        }
        parts.push(format!("{name} {:.1e}", w.max_residual));
    }
    Ok(format!("{} (100 points, 0.1 <= |z| <= 2)", parts.join(", ")))
}

fn group_actions(c: &Ctx) -> Check {
    let opts = RunOptions { sampling: Sampling { points: 50, precision: Precision::DoubleDouble, ..Sampling::default() } };
    let subjects = verified_solutions(&c.entries, &c.pde, &opts).map_err(|e| e.to_string())?;
    let coords = c.pde.coordinates();
    let mut flows = Vec::new();
    for (name, v) in &c.gens {
        flows.push((name.clone(), exponentiate(v, &coords).map_err(|e| e.to_string())?));
    }
    let out = verify_group_actions(&c.pde, &subjects, &flows, 50, Precision::DoubleDouble, 1e-8, &DEFAULT_EPSILONS);
    let failed: Vec<String> = out.iter().filter(|o| !o.passed).map(|o| format!("{} under {}", o.solution, o.group)).collect();
    let worst = out.iter().filter_map(|o| o.report.as_ref().and_then(|r| r.numeric_max)).fold(0f64, f64::max);
    if !failed.is_empty() {
        return Err(format!("{} of {} pairs fail, e.g. {}", failed.len(), out.len(), failed[0]));
    }
    ensure(
        out.len() == subjects.len() * flows.len() && !out.is_empty(),
        format!("{} solutions x {} flows, worst {worst:.1e} (double-double, 50 points)", subjects.len(), flows.len()),
    )
}

fn read_dir(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn determinism(_: &Ctx) -> Check {
    let root = std::env::temp_dir().join(format!("liesym-acceptance-{}", std::process::id()));
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let dir = root.join(run);
        let status = Command::new(env!("CARGO_BIN_EXE_liesym"))
            .args(["pipeline", "--seed", "7", "--out"])
            .arg(&dir)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!("pipeline run {run} exited with {}", status.status));
        }
        outputs.push(read_dir(&dir));
    }
    let _ = std::fs::remove_dir_all(&root);
    let names: Vec<&str> = outputs[0].iter().map(|(n, _)| n.as_str()).collect();
    ensure(
        outputs[0] == outputs[1] && names.contains(&"summary.json") && names.iter().any(|n| n.ends_with(".csv")),
        format!("two pipeline runs, {} files byte-identical ({})", names.len(), names.join(", ")),
    )
}

fn main() {
    let pde = kdv31();
    let gens = data::parse_generators(data::GENERATORS, &pde).expect("shipped generators");
    let entries = parse_catalog(data::CATALOG).expect("shipped catalog");
    let ctx = Ctx { pde, gens, entries };
    let criteria: [(&str, fn(&Ctx) -> Check); 10] = [
        ("determining system", determining_system),
        ("symmetry algebra", symmetry_algebra),
        ("commutator table", commutator_table_check),
        ("flows", flows),
        ("solution residuals", solution_residuals),
        ("reduced equations", reduced_equations),
        ("reduced-equation solutions", reduced_ode_solutions),
        ("weierstrass", weierstrass),
        ("group actions preserve solutions", group_actions),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match check(&ctx) {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {:>2}. {name}: {detail} [{:.1} s]", i + 1, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
