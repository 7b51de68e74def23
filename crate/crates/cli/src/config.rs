//! Run configuration: flat `key = value` file, overridden by flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use liesym::verify::Precision;

use crate::CliError;

/// Keys accepted in a config file; each mirrors a global flag.
pub const KEYS: &[&str] = &["pde", "catalog", "seed", "tol", "points", "precision", "degree", "out", "json"];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub pde: Option<PathBuf>,
    pub catalog: Option<PathBuf>,
    pub seed: u64,
    pub tol: f64,
    pub points: usize,
    pub precision: Precision,
    pub degree: u32,
    pub out: Option<PathBuf>,
    pub json: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            pde: None,
            catalog: None,
            seed: 0,
            tol: 1e-9,
            points: 100,
            precision: Precision::Double,
            degree: 2,
            out: None,
            json: false,
        }
    }
}

/// Flag values; `None` leaves the file or default value in place.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub pde: Option<PathBuf>,
    pub catalog: Option<PathBuf>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub points: Option<usize>,
    pub precision: Option<Precision>,
    pub degree: Option<u32>,
    pub out: Option<PathBuf>,
    pub json: bool,
}

/// Parse `key = value` lines; `#` starts a comment. Relative paths are
/// taken relative to the file's directory.
pub fn parse_config(text: &str, base: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::input(format!("config line {}: expected `key = value`", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(CliError::input(format!("config line {}: unknown key `{k}`", i + 1)));
        }
        let v = if matches!(k, "pde" | "catalog" | "out") && Path::new(v).is_relative() {
            base.join(v).to_string_lossy().into_owned()
        } else {
            v.to_string()
        };
        out.insert(k.to_string(), v);
    }
    Ok(out)
}

fn value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::input(format!("config: bad value `{v}` for `{key}`")))
}

impl RunConfig {
    pub fn from_sources(file: Option<&Path>, flags: Overrides) -> Result<RunConfig, CliError> {
        let mut c = RunConfig::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
            let base = path.parent().unwrap_or(Path::new("."));
            for (k, v) in parse_config(&text, base)? {
                match k.as_str() {
                    "pde" => c.pde = Some(v.into()),
                    "catalog" => c.catalog = Some(v.into()),
                    "seed" => c.seed = value(&k, &v)?,
                    "tol" => c.tol = value(&k, &v)?,
                    "points" => c.points = value(&k, &v)?,
                    "precision" => c.precision = v.parse().map_err(|e| CliError::input(format!("config: {e}")))?,
                    "degree" => c.degree = value(&k, &v)?,
                    "out" => c.out = Some(v.into()),
                    "json" => c.json = value(&k, &v)?,
                    _ => unreachable!(),
                }
            }
        }
        c.pde = flags.pde.or(c.pde);
        c.catalog = flags.catalog.or(c.catalog);
        c.seed = flags.seed.unwrap_or(c.seed);
        c.tol = flags.tol.unwrap_or(c.tol);
        c.points = flags.points.unwrap_or(c.points);
        c.precision = flags.precision.unwrap_or(c.precision);
        c.degree = flags.degree.unwrap_or(c.degree);
        c.out = flags.out.or(c.out);
        c.json |= flags.json;
        if c.points == 0 {
            return Err(CliError::input("points must be positive"));
        }
        if !(c.tol > 0.0) {
            return Err(CliError::input("tol must be positive"));
        }
        if c.degree == 0 {
            return Err(CliError::input("degree must be at least 1"));
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("liesym-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        std::fs::write(&path, "# run\nseed = 7\ntol=1e-6\nprecision = dd\npde = eq.pde\n").unwrap();
        let c = RunConfig::from_sources(Some(&path), Overrides { seed: Some(3), ..Default::default() }).unwrap();
        assert_eq!(c.seed, 3);
        assert_eq!(c.tol, 1e-6);
        assert_eq!(c.precision, Precision::DoubleDouble);
        assert_eq!(c.pde, Some(dir.join("eq.pde")));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn rejects_unknown_keys_and_values() {
        assert!(parse_config("colour = red", Path::new(".")).is_err());
        assert!(parse_config("seed 3", Path::new(".")).is_err());
        let c = RunConfig::from_sources(None, Overrides { points: Some(0), ..Default::default() });
        assert!(c.is_err());
    }
}
