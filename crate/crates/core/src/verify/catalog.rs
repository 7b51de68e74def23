//! Plain-text catalog of claimed solutions, reductions and Weierstrass
//! identities, and the runner that checks each record.
//!
//! Records are separated by blank lines; each line is `key: value` and `#`
//! starts a comment. Keys common to every record:
//!
//! * `name`, `kind` (`solution`, `reduction` or `weierstrass`)
//! * `expected` (`zero`, `conditional` or `nonzero`)
//! * `status` (`verified`, `verified-after-correction` or `flagged`)
//! * `note` (free text)
//!
//! `solution`: `claim`, optional `equation`, `unknown`, `independents`,
//! `functions`, `params`, `sample`, `nonzero`, `condition`, `condition-var`.
//!
//! `reduction`: `ansatz`, `vars`, `equation`, `function`, optional `base`,
//! `base-unknown`, `base-vars`, `multiplier`, `params`, `sample`.
//!
//! `weierstrass`: `check`, `params`, optional `prefactor`.

use std::collections::BTreeMap;

use serde::Serialize;

use super::reduction::{Reduction, ReductionReport};
use super::residual::{
    numeric_residuals, parse_number, pseudo_remainder, residual, salt, Precision, ResidualReport,
    Sampling, SymbolicVerdict,
};
use super::weierstrass::{Prefactor, WeierstrassCheck, WeierstrassReport};
use crate::expr::{eval_numeric, parse_with, EvalOptions, Expr, ParseContext};
use crate::jet::Pde;
use crate::normal::{normalize, Atom, NormalForm};
use crate::{Complex64, Dd, Error, Result, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Solution,
    Reduction,
    Weierstrass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Zero,
    Conditional,
    Nonzero,
    /// Symbolic and numeric paths disagree.
    Inconsistent,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Zero => "zero",
            Verdict::Conditional => "conditional",
            Verdict::Nonzero => "nonzero",
            Verdict::Inconsistent => "inconsistent",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Verified,
    VerifiedAfterCorrection,
    Flagged,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Verified => "verified",
            Status::VerifiedAfterCorrection => "verified-after-correction",
            Status::Flagged => "flagged",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub name: String,
    pub kind: Kind,
    pub expected: Verdict,
    pub status: Status,
    pub note: Option<String>,
    pub fields: BTreeMap<String, String>,
    /// 1-based line of the record's first key.
    pub line: usize,
}

impl Entry {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| Error::Invalid(format!("{}: missing `{key}`", self.name)))
    }
}

const KEYS: &[&str] = &[
    "name", "kind", "expected", "status", "note", "claim", "equation", "unknown", "independents", "functions",
    "params", "sample", "nonzero", "condition", "condition-var", "ansatz", "vars", "function", "base",
    "base-unknown", "base-vars", "multiplier", "check", "prefactor",
];

pub fn parse_catalog(text: &str) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    let mut fields: BTreeMap<String, String> = BTreeMap::new();
    let mut first = 0;
    let flush = |fields: &mut BTreeMap<String, String>, line: usize, out: &mut Vec<Entry>| -> Result<()> {
        if fields.is_empty() {
            return Ok(());
        }
        let f = std::mem::take(fields);
        let name = f.get("name").cloned().ok_or_else(|| Error::Invalid(format!("record at line {line} has no name")))?;
        let bad = |k: &str| Error::Invalid(format!("{name}: bad or missing `{k}`"));
        let kind = match f.get("kind").map(String::as_str) {
            Some("solution") => Kind::Solution,
            Some("reduction") => Kind::Reduction,
            Some("weierstrass") => Kind::Weierstrass,
            _ => return Err(bad("kind")),
        };
        let expected = match f.get("expected").map(String::as_str) {
            Some("zero") => Verdict::Zero,
            Some("conditional") => Verdict::Conditional,
            Some("nonzero") => Verdict::Nonzero,
            _ => return Err(bad("expected")),
        };
        let status = match f.get("status").map(String::as_str) {
            Some("verified") => Status::Verified,
            Some("verified-after-correction") => Status::VerifiedAfterCorrection,
            Some("flagged") => Status::Flagged,
            _ => return Err(bad("status")),
        };
        out.push(Entry { name, kind, expected, status, note: f.get("note").cloned(), fields: f, line });
        Ok(())
    };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if raw.trim().is_empty() {
            flush(&mut fields, first, &mut out)?;
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once(':')
            .ok_or_else(|| Error::Invalid(format!("line {}: expected `key: value`", i + 1)))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(Error::Invalid(format!("line {}: unknown key `{k}`", i + 1)));
        }
        if fields.is_empty() {
            first = i + 1;
        }
        if fields.insert(k.to_string(), v.trim().to_string()).is_some() {
            return Err(Error::Invalid(format!("line {}: duplicate key `{k}`", i + 1)));
        }
    }
    flush(&mut fields, first, &mut out)?;
    let mut names = std::collections::BTreeSet::new();
    for e in &out {
        if !names.insert(e.name.clone()) {
            return Err(Error::Invalid(format!("duplicate entry name `{}`", e.name)));
        }
    }
    Ok(out)
}

/// `c1=1.9872 b1=[-2,-0.5] k` into fixed values and ranges.
fn parse_bindings(text: &str, s: &mut Sampling) -> Result<()> {
    for tok in text.split_whitespace() {
        let Some((name, v)) = tok.split_once('=') else {
            continue;
        };
        let sym = Symbol::param(name);
        if let Some(inner) = v.strip_prefix('[').and_then(|v| v.strip_suffix(']')) {
            let (lo, hi) =
                inner.split_once(',').ok_or_else(|| Error::Invalid(format!("range `{v}` needs `[lo,hi]`")))?;
            let (lo, hi) = (parse_number(lo.trim())?, parse_number(hi.trim())?);
            if !(lo < hi) {
                return Err(Error::Invalid(format!("empty range for `{name}`")));
            }
            s.ranges.insert(sym, (lo, hi));
        } else {
            s.fixed.insert(sym, parse_number(v)?);
        }
    }
    Ok(())
}

fn words(s: Option<&str>) -> Vec<&str> {
    s.map(|s| s.split_whitespace().collect()).unwrap_or_default()
}

/// Per-entry result.
#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub name: String,
    pub kind: Kind,
    pub status: Status,
    pub expected: Verdict,
    pub observed: Option<Verdict>,
    pub passed: bool,
    pub summary: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<ResidualReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition: Option<ConditionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weierstrass: Option<WeierstrassReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub condition: String,
    pub variable: String,
    /// Pseudo-remainder of the residual by the condition is zero.
    pub implied: bool,
    /// Largest residual with the variable set to a real root of the condition.
    pub numeric_max: Option<f64>,
    pub samples: usize,
}

/// Shared settings for a catalog run.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub sampling: Sampling,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { sampling: Sampling::default() }
    }
}

fn fmt_sci(x: Option<f64>) -> String {
    x.map_or("-".into(), |v| format!("{v:.1e}"))
}

pub fn run_entry(e: &Entry, pde: &Pde, opts: &RunOptions) -> Outcome {
    let mut out = Outcome {
        name: e.name.clone(),
        kind: e.kind,
        status: e.status,
        expected: e.expected,
        observed: None,
        passed: false,
        summary: String::new(),
        residual: None,
        condition: None,
        reduction: None,
        weierstrass: None,
        error: None,
        note: e.note.clone(),
    };
    let r = match e.kind {
        Kind::Solution => run_solution(e, pde, opts, &mut out),
        Kind::Reduction => run_reduction(e, pde, opts, &mut out),
        Kind::Weierstrass => run_weierstrass(e, opts, &mut out),
    };
    match r {
        Ok(v) => {
            out.observed = Some(v);
            out.passed = v == e.expected;
        }
        Err(err) => {
            out.summary = format!("error: {err}");
            out.error = Some(err.to_string());
        }
    }
    out
}

fn entry_sampling(e: &Entry, opts: &RunOptions) -> Result<Sampling> {
    let mut s = opts.sampling.clone();
    s.ranges.clear();
    s.fixed.clear();
    for key in ["params", "sample"] {
        if let Some(t) = e.get(key) {
            parse_bindings(t, &mut s)?;
        }
    }
    for n in words(e.get("nonzero")) {
        let sym = Symbol::param(n);
        let (lo, hi) = s.ranges.get(&sym).copied().unwrap_or(s.default_range);
        let fixed_zero = s.fixed.get(&sym).map_or(false, |v| *v == 0.0);
        if fixed_zero || (lo <= 0.0 && hi >= 0.0) {
            return Err(Error::Invalid(format!("{}: `{n}` is declared nonzero but may be sampled at 0", e.name)));
        }
    }
    Ok(s)
}

fn solution_pde(e: &Entry, pde: &Pde) -> Result<Pde> {
    match e.get("equation") {
        None => Ok(pde.clone()),
        Some(eq) => {
            let vars = words(e.get("independents"));
            if vars.is_empty() {
                return Err(Error::Invalid(format!("{}: `equation` needs `independents`", e.name)));
            }
            Pde::new(&vars, e.get("unknown").unwrap_or("u"), eq)
        }
    }
}

fn run_solution(e: &Entry, base: &Pde, opts: &RunOptions, out: &mut Outcome) -> Result<Verdict> {
    let pde = solution_pde(e, base)?;
    let vars: Vec<&str> = pde.vars.iter().map(Symbol::name).collect();
    let ctx = ParseContext::empty().with_dep(pde.dep.name(), &vars).with_functions(&words(e.get("functions")));
    let claim = parse_with(e.require("claim")?, &ctx)?;
    let sampling = entry_sampling(e, opts)?;
    let tol = sampling.tol;
    let rep = residual(&pde, &claim, &sampling, &e.name)?;
    let numeric_zero = rep.numeric_pass(tol);
    let mut verdict = match (rep.symbolic, numeric_zero) {
        (SymbolicVerdict::Zero, true) => Verdict::Zero,
        (SymbolicVerdict::Nonzero, false) => Verdict::Nonzero,
        (SymbolicVerdict::Undecided, true) => Verdict::Zero,
        (SymbolicVerdict::Undecided, false) => Verdict::Nonzero,
        _ => Verdict::Inconsistent,
    };
    if rep.samples == 0 {
        return Err(Error::AllSingular(rep.rejected));
    }
    out.summary = format!("symbolic {:?}, max rel {} ({} pts, {})", rep.symbolic, fmt_sci(rep.numeric_max), rep.samples, rep.precision)
        .to_lowercase();
    if let (Some(cond), Verdict::Nonzero) = (e.get("condition"), verdict) {
        let var = Symbol::param(e.require("condition-var")?);
        let c = normalize(&parse_with(cond, &ctx)?)?;
        let r = rep.residual.clone().expect("nonzero residual");
        let implied = pseudo_remainder(&r, &c, &var)?.is_zero();
        let (numeric_max, samples) = conditional_numeric(&pde, &claim, &c, &var, &sampling, &e.name, rep.precision)?;
        let numeric_ok = numeric_max.map_or(false, |m| m <= tol);
        if implied && numeric_ok {
            verdict = Verdict::Conditional;
        } else if implied != numeric_ok {
            verdict = Verdict::Inconsistent;
        }
        out.summary += &format!("; under {cond} = 0: remainder {}, max rel {}", if implied { "0" } else { "nonzero" }, fmt_sci(numeric_max));
        out.condition = Some(ConditionReport {
            condition: cond.to_string(),
            variable: var.name().to_string(),
            implied,
            numeric_max,
            samples,
        });
    }
    out.residual = Some(rep);
    Ok(verdict)
}

/// Coefficients of `c` in `var`, lowest degree first.
fn univariate(c: &NormalForm, var: &Symbol) -> Result<Vec<Expr>> {
    let atom = Atom::Sym(var.clone());
    let mut by_deg: BTreeMap<usize, NormalForm> = BTreeMap::new();
    for (m, k) in c.terms() {
        let e = m.exponent_of(&atom);
        if !e.is_integer() || *e.numer() < 0 {
            return Err(Error::Invalid(format!("condition is not polynomial in {}", var.name())));
        }
        by_deg
            .entry(*e.numer() as usize)
            .or_insert_with(NormalForm::zero)
            .add_assign_scaled(&NormalForm::from_monomial(m.without(&atom)), k);
    }
    let n = by_deg.keys().next_back().copied().unwrap_or(0);
    Ok((0..=n).map(|d| by_deg.get(&d).map_or(Expr::zero(), NormalForm::to_expr)).collect())
}

/// Real roots of a polynomial with real coefficients (lowest degree first)
/// by simultaneous Weierstrass iteration.
pub fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.last().map_or(false, |v| *v == 0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return vec![];
    }
    let lead = c[n];
    let monic: Vec<f64> = c.iter().map(|v| v / lead).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a);
    let mut z: Vec<Complex64> = (0..n).map(|k| Complex64::new(0.4, 0.9).powu(k as u32)).collect();
    for _ in 0..500 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let denom: Complex64 = (0..n).filter(|&j| j != i).map(|j| z[i] - z[j]).product();
            let step = eval(z[i]) / denom;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    let scale = 1.0 + z.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut out: Vec<f64> = z.iter().filter(|v| v.im.abs() < 1e-8 * scale).map(|v| v.re).collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Numeric residual with `var` replaced by the real root of the condition
/// nearest its sampled value.
fn conditional_numeric(
    pde: &Pde,
    claim: &Expr,
    cond: &NormalForm,
    var: &Symbol,
    sampling: &Sampling,
    name: &str,
    precision: Precision,
) -> Result<(Option<f64>, usize)> {
    let coeffs = univariate(cond, var)?;
    let mut syms = super::residual::sample_symbols(pde, claim);
    for c in &coeffs {
        syms.extend(c.free_symbols());
    }
    syms.sort();
    syms.dedup();
    let opts = EvalOptions::default();
    let mut points = Vec::new();
    for mut p in sampling.draw(&syms, salt(name) ^ 0x5eed, sampling.points * 4) {
        let cs: Result<Vec<f64>> = coeffs.iter().map(|c| eval_numeric(c, &p, &opts)).collect();
        let Ok(cs) = cs else { continue };
        let guess = p.get(var).copied().unwrap_or(0.0);
        if let Some(r) = real_roots(&cs).into_iter().min_by(|a, b| (a - guess).abs().total_cmp(&(b - guess).abs())) {
            p.insert(var.clone(), r);
            points.push(p);
        }
    }
    let (res, _) = match precision {
        Precision::Double => numeric_residuals::<f64>(pde, claim, &points, sampling.points)?,
        Precision::DoubleDouble => numeric_residuals::<Dd>(pde, claim, &points, sampling.points)?,
        Precision::Complex => numeric_residuals::<Complex64>(pde, claim, &points, sampling.points)?,
    };
    Ok((res.iter().copied().reduce(f64::max), res.len()))
}

/// The reduction described by a `kind: reduction` entry; without `base` it
/// reduces `pde`.
pub fn reduction_of(e: &Entry, pde: &Pde) -> Result<Reduction> {
    let base = match e.get("base") {
        None => pde.clone(),
        Some(b) => {
            let vars = words(e.get("base-vars"));
            if vars.is_empty() {
                return Err(Error::Invalid(format!("{}: `base` needs `base-vars`", e.name)));
            }
            Pde::new(&vars, e.get("base-unknown").unwrap_or("u"), b)?
        }
    };
    Reduction::new(
        base,
        e.require("function")?,
        e.require("vars")?,
        e.require("ansatz")?,
        e.require("equation")?,
        e.get("multiplier"),
    )
}

fn run_reduction(e: &Entry, pde: &Pde, opts: &RunOptions, out: &mut Outcome) -> Result<Verdict> {
    let red = reduction_of(e, pde)?;
    let sampling = entry_sampling(e, opts)?;
    let rep = red.check(&sampling, &e.name)?;
    let numeric_zero = rep.numeric_max.map_or(false, |m| m <= sampling.tol);
    let symbolic_zero = rep.proportional && rep.multiplier_matches != Some(false);
    out.summary = format!(
        "{}, multiplier {}{}, max rel {} ({} pts)",
        if rep.proportional { "proportional" } else { "not proportional" },
        rep.multiplier.as_deref().unwrap_or("-"),
        match rep.multiplier_matches {
            Some(true) => " (as expected)",
            Some(false) => " (differs from expected)",
            None => "",
        },
        fmt_sci(rep.numeric_max),
        rep.samples
    );
    if !rep.independent {
        out.summary += "; similarity variables are dependent";
    }
    let v = match (symbolic_zero && rep.independent, numeric_zero) {
        (true, true) => Verdict::Zero,
        (false, false) => Verdict::Nonzero,
        // A mismatched multiplier still leaves the numeric check (which uses
        // the expected one) failing; a wrong claim with lucky samples does not.
        _ => Verdict::Inconsistent,
    };
    out.reduction = Some(rep);
    Ok(v)
}

fn run_weierstrass(e: &Entry, opts: &RunOptions, out: &mut Outcome) -> Result<Verdict> {
    let mut p: BTreeMap<&str, f64> = BTreeMap::new();
    for tok in words(e.get("params")) {
        let (k, v) = tok.split_once('=').ok_or_else(|| Error::Invalid(format!("{}: bad parameter `{tok}`", e.name)))?;
        p.insert(k, parse_number(v)?);
    }
    let get = |k: &str| p.get(k).copied().ok_or_else(|| Error::Invalid(format!("{}: missing parameter `{k}`", e.name)));
    let pre = || -> Result<Prefactor> { e.require("prefactor")?.parse() };
    let g2 = p.get("g2").copied().unwrap_or(0.0);
    let check = match e.require("check")? {
        "p-ode" => WeierstrassCheck::POde { g2, g3: get("g3")? },
        "p-algebraic" => WeierstrassCheck::PAlgebraic { g2, g3: get("g3")? },
        "p-derivative" => WeierstrassCheck::PDerivative { g2, g3: get("g3")? },
        "zeta-derivative" => WeierstrassCheck::ZetaDerivative { g2, g3: get("g3")? },
        "f-ode" => WeierstrassCheck::FOde { a: get("a")?, c1: get("c1")?, c2: get("c2")?, prefactor: pre()? },
        "h-ode-zeta" => WeierstrassCheck::HOdeZeta {
            a: get("a")?,
            c6: get("c6")?,
            c7: get("c7")?,
            c8: get("c8")?,
            prefactor: pre()?,
        },
        "h-ode-p" => WeierstrassCheck::HOdeP { a: get("a")?, c1: get("c1")?, c2: get("c2")?, prefactor: pre()? },
        other => return Err(Error::Invalid(format!("{}: unknown check `{other}`", e.name))),
    };
    let rep = check.run(opts.sampling.seed ^ salt(&e.name), opts.sampling.points)?;
    let tol = opts.sampling.tol.max(1e-8);
    out.summary = format!("max rel {} ({} pts)", fmt_sci(Some(rep.max_residual)), rep.samples);
    let v = if rep.max_residual <= tol { Verdict::Zero } else { Verdict::Nonzero };
    out.weierstrass = Some(rep);
    Ok(v)
}

/// Run every entry, in catalog order.
pub fn verify_catalog(entries: &[Entry], pde: &Pde, opts: &RunOptions) -> Vec<Outcome> {
    entries.iter().map(|e| run_entry(e, pde, opts)).collect()
}

/// Aligned text table, one row per outcome.
pub fn format_table(outcomes: &[Outcome]) -> String {
    let w = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(4).max(4);
    let mut s = format!("{:<w$}  {:<11}  {:<25}  {:<12}  {:<12}  {}\n", "name", "kind", "status", "expected", "observed", "result");
    for o in outcomes {
        let kind = format!("{:?}", o.kind).to_lowercase();
        let observed = o.observed.map_or("error".to_string(), |v| v.to_string());
        s += &format!(
            "{:<w$}  {:<11}  {:<25}  {:<12}  {:<12}  {}  {}\n",
            o.name,
            kind,
            o.status.to_string(),
            o.expected.to_string(),
            observed,
            if o.passed { "PASS" } else { "FAIL" },
            o.summary
        );
    }
    s
}

/// Numeric residual of `f` in `pde` at explicit points, for callers that
/// already chose their sample set.
pub fn residual_at_points<S: crate::Scalar>(
    pde: &Pde,
    f: &Expr,
    points: &[BTreeMap<Symbol, f64>],
) -> Result<Vec<f64>> {
    let (res, rejected) = numeric_residuals::<S>(pde, f, points, points.len())?;
    if res.is_empty() && rejected > 0 {
        return Err(Error::AllSingular(rejected));
    }
    Ok(res)
}

/// A solution of the base equation that the catalog records as exact.
#[derive(Clone, Debug)]
pub struct Subject {
    pub name: String,
    pub solution: Expr,
    pub sampling: Sampling,
}

/// Entries of kind `solution` on the base equation, expected `zero` and
/// not flagged, parsed with their sampling boxes.
pub fn verified_solutions(entries: &[Entry], pde: &Pde, opts: &RunOptions) -> Result<Vec<Subject>> {
    let vars: Vec<&str> = pde.vars.iter().map(Symbol::name).collect();
    let mut out = Vec::new();
    for e in entries {
        if e.kind != Kind::Solution
            || e.expected != Verdict::Zero
            || e.status == Status::Flagged
            || e.get("equation").is_some()
        {
            continue;
        }
        let ctx = ParseContext::empty().with_dep(pde.dep.name(), &vars).with_functions(&words(e.get("functions")));
        out.push(Subject {
            name: e.name.clone(),
            solution: parse_with(e.require("claim")?, &ctx)?,
            sampling: entry_sampling(e, opts)?,
        });
    }
    Ok(out)
}
