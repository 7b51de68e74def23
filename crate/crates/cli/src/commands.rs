//! Subcommand implementations. Each returns a [`Report`] with human text,
//! a JSON value and a pass flag; nothing here prints.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use liesym::data;
use liesym::detsys::{check_membership, extract_determining, solve_poly_ansatz, DeterminingSystem, SymmetryBasis};
use liesym::expr::{parse_with, Expr, ParseContext};
use liesym::flows::{compare_group, exponentiate, parse_reference_groups, GroupElement, GroupMatch};
use liesym::grid::{sample_grid, GridSpec};
use liesym::jet::{is_symmetry, Pde, VectorField};
use liesym::liealg::{commutator_table, GoldenTable};
use liesym::normal::normalize;
use liesym::verify::catalog::{format_table, parse_catalog, verified_solutions, verify_catalog, RunOptions};
use liesym::verify::group::{verify_group_action, verify_group_actions, DEFAULT_EPSILONS};
use liesym::verify::{residual, Precision, Sampling};

use crate::config::RunConfig;
use crate::CliError;

pub struct Report {
    pub text: String,
    pub json: Value,
    pub passed: bool,
    pub warnings: Vec<String>,
}

impl Report {
    fn new(text: String, json: Value, passed: bool) -> Self {
        Report { text, json, passed, warnings: Vec::new() }
    }
}

/// Loaded equation and the settings of one invocation.
pub struct Session {
    pub cfg: RunConfig,
    pub pde: Pde,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

impl Session {
    pub fn new(cfg: RunConfig) -> Result<Self, CliError> {
        let pde = match &cfg.pde {
            Some(p) => Pde::from_text(&read(p)?)?,
            None => data::kdv31(),
        };
        Ok(Session { cfg, pde })
    }

    fn lead(&self) -> Result<String, CliError> {
        self.pde
            .lead_var()
            .map(|s| s.name().to_string())
            .ok_or_else(|| CliError::input("no variable appears as a bare first derivative; cannot solve on shell"))
    }

    fn generators(&self, path: Option<&Path>) -> Result<Vec<(String, VectorField)>, CliError> {
        let text = match path {
            Some(p) => read(p)?,
            None => data::GENERATORS.to_string(),
        };
        Ok(data::parse_generators(&text, &self.pde)?)
    }

    fn sampling(&self) -> Sampling {
        Sampling {
            points: self.cfg.points,
            seed: self.cfg.seed,
            tol: self.cfg.tol,
            precision: self.cfg.precision,
            ..Sampling::default()
        }
    }

    fn parse_solution(&self, text: &str) -> Result<Expr, CliError> {
        let vars: Vec<&str> = self.pde.vars.iter().map(|s| s.name()).collect();
        let ctx = ParseContext::empty().with_dep(self.pde.dep.name(), &vars);
        Ok(parse_with(text, &ctx)?)
    }
}

fn same_nullspaces(a: &DeterminingSystem, b: &DeterminingSystem, degree: u32) -> liesym::Result<bool> {
    for d in 1..=degree {
        if solve_poly_ansatz(a, d)?.vectors != solve_poly_ansatz(b, d)?.vectors {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn derive(s: &Session, golden: Option<&Path>) -> Result<Report, CliError> {
    let lead = s.lead()?;
    let sys = extract_determining(&s.pde, &lead)?;
    let mut text = format!("determining system: {} constraints (solved for u_{lead})\n", sys.len());
    text += &sys.to_string();
    let matched = match golden {
        Some(p) => {
            let g = DeterminingSystem::from_text(&read(p)?, sys.coords.clone())?;
            let m = same_nullspaces(&sys, &g, s.cfg.degree)?;
            let _ = writeln!(
                text,
                "reference {}: {} up to degree {}",
                p.display(),
                if m { "equivalent" } else { "NOT equivalent" },
                s.cfg.degree
            );
            Some(m)
        }
        None => None,
    };
    let equations: Vec<String> = sys.to_string().lines().map(str::to_string).collect();
    let json = json!({
        "constraints": sys.len(),
        "lead": lead,
        "equations": equations,
        "reference_equivalent": matched,
    });
    Ok(Report::new(text, json, matched != Some(false)))
}

/// Builtin reference system, used when the shipped equation is in use.
pub fn derive_against_shipped(s: &Session) -> Result<Report, CliError> {
    let lead = s.lead()?;
    let sys = extract_determining(&s.pde, &lead)?;
    let g = DeterminingSystem::from_text(data::DETERMINING_GOLDEN, sys.coords.clone())?;
    let m = same_nullspaces(&sys, &g, s.cfg.degree)?;
    let text = format!(
        "determining system: {} constraints; shipped reference {} up to degree {}\n",
        sys.len(),
        if m { "equivalent" } else { "NOT equivalent" },
        s.cfg.degree
    );
    Ok(Report::new(text, json!({"constraints": sys.len(), "reference_equivalent": m}), m))
}

fn solve_basis(s: &Session, degree: u32) -> Result<SymmetryBasis, CliError> {
    let sys = extract_determining(&s.pde, &s.lead()?)?;
    Ok(solve_poly_ansatz(&sys, degree)?)
}

pub fn solve(s: &Session, degree: u32, generators: Option<&Path>) -> Result<Report, CliError> {
    let lead = s.lead()?;
    let basis = solve_basis(s, degree)?;
    let gens = s.generators(generators)?;
    let mut text = format!("degree {degree}: dimension {}\n", basis.dimension());
    text += &basis.to_string();
    let mut members = Vec::new();
    let mut ok = basis.dimension() == gens.len();
    for (name, v) in &gens {
        let coords = check_membership(&basis, v);
        let sym = is_symmetry(v, &s.pde, &lead)?;
        ok &= coords.is_some() && sym;
        let _ = writeln!(
            text,
            "{name}: {}, symmetry condition {}",
            if coords.is_some() { "member" } else { "NOT a member" },
            if sym { "vanishes" } else { "does NOT vanish" }
        );
        members.push(json!({
            "name": name,
            "member": coords.is_some(),
            "coordinates": coords.map(|c| c.iter().map(|q| q.to_string()).collect::<Vec<_>>()),
            "symmetry_condition_zero": sym,
        }));
    }
    if basis.dimension() != gens.len() {
        let _ = writeln!(text, "dimension {} differs from the {} reference generators", basis.dimension(), gens.len());
    }
    let fields: Vec<String> = basis.fields.iter().map(VectorField::display).collect();
    let json = json!({
        "degree": degree,
        "dimension": basis.dimension(),
        "basis": fields,
        "generators": members,
    });
    Ok(Report::new(text, json, ok))
}

pub fn table(s: &Session, compare: Option<&Path>, generators: Option<&Path>) -> Result<Report, CliError> {
    let gens = s.generators(generators)?;
    let names: Vec<String> = gens.iter().map(|(n, _)| n.clone()).collect();
    let fields: Vec<VectorField> = gens.into_iter().map(|(_, v)| v).collect();
    let coords = s.pde.coordinates();
    let t = commutator_table(&fields, &names, &coords)?;
    let mut text = t.to_string();
    let closed = t.is_closed();
    let skew = t.is_skew();
    let (skew_v, jacobi_v) = match t.structure_constants() {
        Some(sc) => (sc.skew_violations().len(), sc.jacobi_violations().len()),
        None => (usize::MAX, usize::MAX),
    };
    let golden_text = match compare {
        Some(p) => read(p)?,
        None => data::COMMUTATOR_GOLDEN.to_string(),
    };
    let golden = GoldenTable::parse(&golden_text, &names)?;
    let diff = t.compare(&golden);
    for (i, j, got, want) in &diff {
        let _ = writeln!(text, "cell [{}, {}]: computed {got}, reference {want}", names[*i], names[*j]);
    }
    let _ = writeln!(
        text,
        "closed: {closed}; skew: {}; Jacobi violations: {}; reference cells differing: {}",
        skew && skew_v == 0,
        jacobi_v,
        diff.len()
    );
    let n = names.len();
    let cells: Vec<Vec<String>> = (0..n).map(|i| (0..n).map(|j| t.cell(i, j)).collect()).collect();
    let json = json!({
        "names": names,
        "cells": cells,
        "closed": closed,
        "skew": skew && skew_v == 0,
        "jacobi_violations": jacobi_v,
        "reference_mismatches": diff.iter().map(|(i, j, a, b)| json!([names[*i], names[*j], a, b])).collect::<Vec<_>>(),
    });
    Ok(Report::new(text, json, closed && skew && skew_v == 0 && jacobi_v == 0 && diff.is_empty()))
}

fn group_match_json(m: &GroupMatch) -> Value {
    match m {
        GroupMatch::Rescaled(c) => json!({"match": "rescaled", "factor": c.to_string()}),
        GroupMatch::Inconsistent(r) => json!({
            "match": "inconsistent",
            "factors": r.iter().map(|c| c.as_ref().map(|c| c.to_string())).collect::<Vec<_>>(),
        }),
        GroupMatch::Mismatch { c, coordinate } => json!({"match": "mismatch", "factor": c.to_string(), "coordinate": coordinate}),
    }
}

fn describe_match(m: &GroupMatch) -> String {
    match m {
        GroupMatch::Rescaled(c) if c == &liesym::jet::rat(1, 1) => "matches exactly".into(),
        GroupMatch::Rescaled(c) => format!("matches after eps -> {c}*eps"),
        GroupMatch::Inconsistent(r) => {
            let parts: Vec<String> = r.iter().map(|c| c.as_ref().map_or("-".into(), |c| c.to_string())).collect();
            format!("INCONSISTENT: per-coordinate factors ({})", parts.join(", "))
        }
        GroupMatch::Mismatch { c, coordinate } => format!("MISMATCH in coordinate {coordinate} after eps -> {c}*eps"),
    }
}

pub struct FlowArgs<'a> {
    pub field: Option<usize>,
    pub epsilon: Option<&'a str>,
    pub apply: Option<&'a str>,
    pub generators: Option<&'a Path>,
}

/// Closed-form flows, their ODE and group-law checks, and the comparison
/// with the transcribed groups. The transcribed-group comparison reports
/// but does not fail: the reference data contains known inconsistencies.
pub fn flow(s: &Session, a: &FlowArgs) -> Result<Report, CliError> {
    let gens = s.generators(a.generators)?;
    let coords = s.pde.coordinates();
    let refs = if a.generators.is_none() { parse_reference_groups(data::GROUPS, &coords)? } else { Vec::new() };
    let picked: Vec<usize> = match a.field {
        Some(i) if i >= 1 && i <= gens.len() => vec![i - 1],
        Some(i) => return Err(CliError::input(format!("--field {i} is outside 1..={}", gens.len()))),
        None => (0..gens.len()).collect(),
    };
    let mut text = String::new();
    let mut items = Vec::new();
    let mut ok = true;
    for i in picked {
        let (name, v) = &gens[i];
        let g = exponentiate(v, &coords)?;
        let ode = g.flow_defects(v)?.iter().all(|d| d.is_identically_zero().unwrap_or(false));
        let law = g.satisfies_group_law()?;
        ok &= ode && law;
        let _ = writeln!(text, "{name}: {g}");
        let _ = writeln!(text, "  flow ODE {}, group law {}", pass(ode), pass(law));
        let mut item = json!({"name": name, "group": g.to_string(), "flow_ode": ode, "group_law": law});
        if let Some(r) = refs.iter().find(|r| r.field == i + 1) {
            let m = compare_group(&r.group, v)?;
            let _ = writeln!(text, "  transcribed {}: {}", r.name, describe_match(&m));
            item["transcribed"] = group_match_json(&m);
        }
        if let Some(e) = a.epsilon {
            let val = normalize(&parse_with(e, &ParseContext::empty())?)?;
            let at = g.at(&val)?;
            let _ = writeln!(text, "  at eps = {e}: {at}");
            item["at"] = json!(at.to_string());
        }
        if let Some(f) = a.apply {
            let (line, passed, j) = apply_flow(s, &g, f, name)?;
            text += &line;
            ok &= passed;
            item["apply"] = j;
        }
        items.push(item);
    }
    Ok(Report::new(text, json!({"flows": items}), ok))
}

fn pass(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILED"
    }
}

/// Push a solution forward and, if it solves the equation, check that its
/// images do too.
fn apply_flow(s: &Session, g: &GroupElement, f: &str, name: &str) -> Result<(String, bool, Value), CliError> {
    let expr = s.parse_solution(f)?;
    let nf = normalize(&expr)?;
    let image = g.transform_solution(&nf)?;
    let mut text = format!("  image of u = {f}: {image}\n");
    let sampling = Sampling { precision: Precision::DoubleDouble, ..s.sampling() };
    let base = residual(&s.pde, &expr, &sampling, f)?;
    if !base.numeric_pass(s.cfg.tol.max(1e-8)) {
        let _ = writeln!(text, "  u = {f} is not a solution; images not checked");
        return Ok((text, true, json!({"image": image.to_string(), "solution": false})));
    }
    let rep = verify_group_action(&s.pde, g, &expr, &sampling, &DEFAULT_EPSILONS, name)?;
    let tol = s.cfg.tol.max(1e-8);
    let ok = rep.passed(tol);
    let _ = writeln!(
        text,
        "  image residual max {:.1e} over {} points at eps in {:?}: {}",
        rep.numeric_max.unwrap_or(f64::NAN),
        rep.samples,
        DEFAULT_EPSILONS,
        pass(ok)
    );
    Ok((text, ok, json!({"image": image.to_string(), "solution": true, "passed": ok, "report": rep})))
}

pub fn verify(s: &Session, group_actions: bool, ga_points: usize) -> Result<Report, CliError> {
    let text_in = match &s.cfg.catalog {
        Some(p) => read(p)?,
        None => data::CATALOG.to_string(),
    };
    let entries = parse_catalog(&text_in)?;
    let opts = RunOptions { sampling: s.sampling() };
    let mut warnings = Vec::new();
    if entries.is_empty() {
        warnings.push("catalog is empty; nothing to verify".to_string());
    }
    let outcomes = verify_catalog(&entries, &s.pde, &opts);
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let flagged = outcomes.iter().filter(|o| o.status == liesym::verify::catalog::Status::Flagged).count();
    let mut text = if entries.is_empty() { String::new() } else { format_table(&outcomes) };
    let _ = writeln!(text, "{} entries, {} failed, {} flagged as transcribed", outcomes.len(), failed, flagged);
    let mut json = json!({"entries": outcomes.len(), "failed": failed, "flagged": flagged, "outcomes": outcomes});
    let mut ok = failed == 0;
    if group_actions {
        let subjects = verified_solutions(&entries, &s.pde, &opts)?;
        let coords = s.pde.coordinates();
        let flows = s
            .generators(None)?
            .iter()
            .enumerate()
            .map(|(i, (_, v))| Ok((format!("g{}", i + 1), exponentiate(v, &coords)?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        let tol = s.cfg.tol.max(1e-8);
        let out = verify_group_actions(&s.pde, &subjects, &flows, ga_points, Precision::DoubleDouble, tol, &DEFAULT_EPSILONS);
        let bad: Vec<_> = out.iter().filter(|o| !o.passed).collect();
        let worst = out.iter().filter_map(|o| o.report.as_ref()?.numeric_max).fold(0.0, f64::max);
        let _ = writeln!(
            text,
            "group actions: {} solutions x {} flows, {} failed, worst residual {:.1e} (dd, {} points per eps)",
            subjects.len(),
            flows.len(),
            bad.len(),
            worst,
            ga_points
        );
        for o in &bad {
            let _ = writeln!(text, "  {} under {}: {}", o.solution, o.group, o.error.as_deref().unwrap_or("residual above tolerance"));
        }
        ok &= bad.is_empty();
        json["group_actions"] = json!({
            "pairs": out.len(),
            "failed": bad.len(),
            "worst": worst,
            "outcomes": out,
        });
    }
    Ok(Report { text, json, passed: ok, warnings })
}

pub fn sample(s: &Session, solution: &str, grid: &str) -> Result<(Report, String), CliError> {
    let f = s.parse_solution(solution)?;
    let g = GridSpec::parse(grid)?;
    let out = sample_grid(&f, &g)?;
    let mut r = Report::new(
        format!("sampled {} points, {} singular\n", out.rows, out.singular),
        json!({"rows": out.rows, "singular": out.singular}),
        true,
    );
    if out.singular > 0 {
        r.warnings.push(format!("{} grid points were singular and written as nan", out.singular));
    }
    Ok((r, out.csv))
}

/// Profiles sampled by `pipeline`.
pub const PROFILES: &[(&str, &str, &str)] = &[
    (
        "kink",
        "1.9872*tanh(1.9872*x - 4*2.9876*1.9872^2*y + 2.9876*z + 1.9876) + 3.9812",
        "x=-10:10:200 y=-10:10:200 z=0 t=0",
    ),
    ("rational", "x*y/(6*t)", "x=-1:1:3 y=-1:1:3 z=0 t=1"),
    (
        "sech-sum",
        "x*y/(6*t) + sech((3*t*z - 5*y^2)/(3*y))^2 + sech(2*t^3/y^3 + 2*(3*t*z - 5*y^2)/t)^2 \
         + sech((3*t*z - 5*y^2)^2/(9*t^2) + 2*t^2/y^2 + 1)^2",
        "x=-5:5:101 y=0.5:5:101 z=0.9654 t=6",
    ),
];

pub struct Stage {
    pub name: &'static str,
    pub report: Report,
}

pub fn pipeline(s: &Session) -> Result<(Vec<Stage>, Vec<(String, String)>), CliError> {
    let mut stages = Vec::new();
    let derive = if s.cfg.pde.is_none() {
        derive_against_shipped(s)?
    } else {
        let mut r = derive(s, None)?;
        r.text = r.text.lines().next().unwrap_or("").to_string() + "\n";
        r
    };
    let halt = !derive.passed;
    stages.push(Stage { name: "derive", report: derive });
    if halt {
        return Ok((stages, Vec::new()));
    }
    for (name, r) in [
        ("solve", solve(s, s.cfg.degree, None)?),
        ("table", table(s, None, None)?),
        ("flow", flow(s, &FlowArgs { field: None, epsilon: None, apply: None, generators: None })?),
        ("verify", verify(s, true, 50)?),
    ] {
        let halt = !r.passed;
        stages.push(Stage { name, report: r });
        if halt {
            return Ok((stages, Vec::new()));
        }
    }
    let mut csvs = Vec::new();
    let mut sample_json = Vec::new();
    let mut text = String::new();
    let mut warnings = Vec::new();
    for (name, f, grid) in PROFILES {
        let (r, csv) = sample(s, f, grid)?;
        let _ = write!(text, "{name}: {}", r.text);
        sample_json.push(json!({"name": name, "solution": f, "grid": grid, "result": r.json}));
        warnings.extend(r.warnings);
        csvs.push((format!("{name}.csv"), csv));
    }
    stages.push(Stage { name: "sample", report: Report { text, json: json!(sample_json), passed: true, warnings } });
    Ok((stages, csvs))
}

pub fn pipeline_json(s: &Session, stages: &[Stage]) -> Value {
    let passed = stages.iter().all(|st| st.report.passed) && stages.len() == 6;
    json!({
        "config": {
            "pde": s.cfg.pde.as_ref().map(|p| p.display().to_string()),
            "catalog": s.cfg.catalog.as_ref().map(|p| p.display().to_string()),
            "seed": s.cfg.seed,
            "tol": s.cfg.tol,
            "points": s.cfg.points,
            "precision": s.cfg.precision.to_string(),
            "degree": s.cfg.degree,
        },
        "passed": passed,
        "stages": stages.iter().map(|st| json!({
            "name": st.name,
            "passed": st.report.passed,
            "warnings": st.report.warnings,
            "result": st.report.json,
        })).collect::<Vec<_>>(),
    })
}
