//! Rectangular sampling grids for closed-form solutions, written as CSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::expr::{eval_numeric, EvalOptions, Expr};
use crate::verify::residual::{is_singular, unknown_functions};
use crate::{Error, Result, Symbol};

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub symbol: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    /// Evenly spaced values from `min` to `max` inclusive.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count - 1;
        (0..self.count)
            .map(|i| if i == n { self.max } else { self.min + (self.max - self.min) * i as f64 / n as f64 })
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
    pub fixed: BTreeMap<String, f64>,
}

impl GridSpec {
    /// Whitespace- or comma-separated `sym=min:max:count` axes and
    /// `sym=value` bindings, e.g. `x=-10:10:200 y=-10:10:200 z=0 t=0`.
    pub fn parse(text: &str) -> Result<GridSpec> {
        let mut g = GridSpec::default();
        for tok in text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let (name, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("grid item `{tok}` needs `name=...`")))?;
            let num = |s: &str| {
                s.trim().parse::<f64>().map_err(|_| Error::Invalid(format!("grid item `{tok}`: `{s}` is not a number")))
            };
            let parts: Vec<&str> = v.split(':').collect();
            match parts[..] {
                [value] => {
                    g.fixed.insert(name.to_string(), num(value)?);
                }
                [lo, hi, n] => {
                    let count =
                        n.parse().map_err(|_| Error::Invalid(format!("grid item `{tok}`: bad count `{n}`")))?;
                    g.axes.push(Axis { symbol: name.to_string(), min: num(lo)?, max: num(hi)?, count });
                }
                _ => return Err(Error::Invalid(format!("grid item `{tok}` is neither `v` nor `min:max:count`"))),
            }
        }
        g.check()?;
        Ok(g)
    }

    fn check(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(Error::Invalid("grid has no swept axis".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for a in &self.axes {
            if a.count < 2 {
                return Err(Error::Invalid(format!("axis `{}` needs at least 2 points", a.symbol)));
            }
            if !(a.min.is_finite() && a.max.is_finite() && a.min < a.max) {
                return Err(Error::Invalid(format!("axis `{}` needs finite min < max", a.symbol)));
            }
            if !seen.insert(&a.symbol) || self.fixed.contains_key(&a.symbol) {
                return Err(Error::Invalid(format!("`{}` is bound more than once", a.symbol)));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A sampled grid as CSV text.
#[derive(Clone, Debug)]
pub struct Sampled {
    pub csv: String,
    pub rows: usize,
    /// Points where evaluation hit a pole or left the real domain.
    pub singular: usize,
}

/// Shortest round-trip form is not fixed-width, so print 17 significant
/// digits explicitly.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

/// Evaluate `f` over the grid, row-major in axis order (last axis fastest).
/// Header: swept symbols, then `u`.
pub fn sample_grid(f: &Expr, grid: &GridSpec) -> Result<Sampled> {
    grid.check()?;
    if let Some(name) = unknown_functions(f).keys().next() {
        return Err(Error::Invalid(format!("unknown function `{}` must be instantiated before sampling", name.name())));
    }
    let free: BTreeMap<String, Symbol> = f.free_symbols().into_iter().map(|s| (s.name().to_string(), s)).collect();
    let bound: Vec<&String> = grid.axes.iter().map(|a| &a.symbol).chain(grid.fixed.keys()).collect();
    let missing: Vec<&str> = free.keys().filter(|k| !bound.contains(k)).map(String::as_str).collect();
    if !missing.is_empty() {
        return Err(Error::Invalid(format!("grid leaves {} unbound", missing.join(", "))));
    }
    let lookup = |name: &str| free.get(name).cloned().unwrap_or_else(|| Symbol::param(name));
    let mut env: BTreeMap<Symbol, f64> = grid.fixed.iter().map(|(k, v)| (lookup(k), *v)).collect();
    let axes: Vec<(Symbol, Vec<f64>)> = grid.axes.iter().map(|a| (lookup(&a.symbol), a.values())).collect();

    let mut csv = String::new();
    let header: Vec<&str> = grid.axes.iter().map(|a| a.symbol.as_str()).chain(["u"]).collect();
    csv += &header.join(",");
    csv.push('\n');
    let opts = EvalOptions::default();
    let mut idx = vec![0usize; axes.len()];
    let (mut rows, mut singular) = (0, 0);
    loop {
        for ((s, vals), &i) in axes.iter().zip(&idx) {
            env.insert(s.clone(), vals[i]);
        }
        let u = match eval_numeric::<f64>(f, &env, &opts) {
            Ok(v) if v.is_finite() => v,
            Ok(_) => {
                singular += 1;
                f64::NAN
            }
            Err(e) if is_singular(&e) => {
                singular += 1;
                f64::NAN
            }
            Err(e) => return Err(e),
        };
        for ((_, vals), &i) in axes.iter().zip(&idx) {
            let _ = write!(csv, "{},", format_value(vals[i]));
        }
        csv += &format_value(u);
        csv.push('\n');
        rows += 1;
        let mut k = axes.len();
        loop {
            if k == 0 {
                return Ok(Sampled { csv, rows, singular });
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < axes[k].1.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_with, ParseContext};

    fn expr(s: &str) -> Expr {
        parse_with(s, &ParseContext::default()).unwrap()
    }

    fn column(csv: &str, k: usize) -> Vec<f64> {
        csv.lines().skip(1).map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
    }

    #[test]
    fn products_on_integer_grid() {
        let g = GridSpec::parse("x=-1:1:3, y=-1:1:3, t=1").unwrap();
        let s = sample_grid(&expr("x*y/(6*t)"), &g).unwrap();
        assert_eq!(s.rows, 9);
        assert_eq!(s.singular, 0);
        assert!(s.csv.starts_with("x,y,u\n"));
        let u = column(&s.csv, 2);
        let want: Vec<f64> = [-1.0, 0.0, 1.0]
            .iter()
            .flat_map(|x| [-1.0, 0.0, 1.0].map(|y| x * y / 6.0))
            .collect();
        assert_eq!(u, want);
    }

    #[test]
    fn kink_is_monotone_with_asymptotes() {
        let g = GridSpec::parse("y=-10:10:200 x=-10:10:200 z=0 t=0").unwrap();
        let f = expr("1.9872*tanh(1.9872*x - 4*2.9876*1.9872^2*y + 2.9876*z + 1.9876) + 3.9812");
        let s = sample_grid(&f, &g).unwrap();
        assert_eq!(s.rows, 40000);
        let u = column(&s.csv, 2);
        for slice in u.chunks(200) {
            assert!(slice.windows(2).all(|w| w[1] >= w[0]));
            for v in slice {
                assert!(*v >= 3.9812 - 1.9872 - 1e-12 && *v <= 3.9812 + 1.9872 + 1e-12);
            }
        }
    }

    #[test]
    fn sech_sum_is_bounded() {
        let g = GridSpec::parse("x=-5:5:21 y=0.5:5:21 z=0.9654 t=6").unwrap();
        let sech = "sech((3*t*z - 5*y^2)/(3*y))^2 + sech(2*t^3/y^3 + 2*(3*t*z - 5*y^2)/t)^2 \
                    + sech((3*t*z - 5*y^2)^2/(9*t^2) + 2*t^2/y^2 + 1)^2";
        let s = sample_grid(&expr(&format!("x*y/(6*t) + {sech}")), &g).unwrap();
        let (x, y, u) = (column(&s.csv, 0), column(&s.csv, 1), column(&s.csv, 2));
        for i in 0..u.len() {
            let d = u[i] - x[i] * y[i] / 36.0;
            assert!((-1e-12..=3.0).contains(&d), "{d}");
        }
    }

    #[test]
    fn singular_points_become_nan() {
        let g = GridSpec::parse("x=-1:1:3").unwrap();
        let s = sample_grid(&expr("1/x"), &g).unwrap();
        assert_eq!(s.singular, 1);
        assert_eq!(s.csv.lines().nth(2).unwrap(), "0.0000000000000000e0,nan");
    }

    #[test]
    fn values_round_trip() {
        let g = GridSpec::parse("x=0.1:2.3:7 y=-1:1:5").unwrap();
        let f = expr("exp(x)*tanh(y) + sqrt(x)/3");
        let s = sample_grid(&f, &g).unwrap();
        for line in s.csv.lines().skip(1) {
            let v: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
            let env = BTreeMap::from([(Symbol::var("x"), v[0]), (Symbol::var("y"), v[1])]);
            let u: f64 = eval_numeric(&f, &env, &EvalOptions::default()).unwrap();
            assert_eq!(u.to_bits(), v[2].to_bits());
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(GridSpec::parse("x=0:1:1").is_err());
        assert!(GridSpec::parse("x=1:0:3").is_err());
        assert!(GridSpec::parse("x=0:1:3 x=2").is_err());
        assert!(GridSpec::parse("t=1").is_err());
        let g = GridSpec::parse("x=0:1:3").unwrap();
        assert!(sample_grid(&expr("x*y"), &g).is_err());
    }
}
