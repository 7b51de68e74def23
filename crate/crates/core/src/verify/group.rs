//! Numeric check that a one-parameter group maps solutions to solutions.

use serde::Serialize;

use super::residual::{numeric_residuals, salt, sample_symbols, Precision, Sampling};
use crate::flows::GroupElement;
use crate::jet::Pde;
use crate::expr::Expr;
use crate::{Complex64, Dd, Error, Result};

/// Parameter values tried by default, `0` included so the identity is
/// always exercised.
pub const DEFAULT_EPSILONS: [f64; 4] = [0.0, 0.3, -0.45, 0.8];

#[derive(Clone, Debug, Serialize)]
pub struct GroupActionReport {
    pub epsilons: Vec<f64>,
    /// Largest relative residual over all parameter values.
    pub numeric_max: Option<f64>,
    pub samples: usize,
    pub rejected: usize,
    pub precision: Precision,
}

impl GroupActionReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.samples > 0 && self.numeric_max.map_or(false, |m| m <= tol)
    }
}

/// Push `f` forward along `g` and sample the residual of the image at
/// `sampling.points` points for each parameter value.
pub fn verify_group_action(
    pde: &Pde,
    g: &GroupElement,
    f: &Expr,
    sampling: &Sampling,
    epsilons: &[f64],
    name: &str,
) -> Result<GroupActionReport> {
    let image = g.transform_solution_expr(f)?;
    let syms = sample_symbols(pde, &image);
    let mut all = Vec::new();
    let mut rejected = 0;
    for (k, &e) in epsilons.iter().enumerate() {
        let mut s = sampling.clone();
        s.fixed.insert(g.eps.clone(), e);
        let points = s.draw(&syms, salt(name) ^ (k as u64 + 1), s.points * 4);
        let (res, rej) = match sampling.precision {
            Precision::Double => numeric_residuals::<f64>(pde, &image, &points, s.points)?,
            Precision::DoubleDouble => numeric_residuals::<Dd>(pde, &image, &points, s.points)?,
            Precision::Complex => numeric_residuals::<Complex64>(pde, &image, &points, s.points)?,
        };
        if res.is_empty() {
            return Err(Error::AllSingular(rej));
        }
        all.extend(res);
        rejected += rej;
    }
    Ok(GroupActionReport {
        epsilons: epsilons.to_vec(),
        numeric_max: all.iter().copied().reduce(f64::max),
        samples: all.len(),
        rejected,
        precision: sampling.precision,
    })
}

/// One (solution, flow) pair.
#[derive(Clone, Debug, Serialize)]
pub struct GroupActionOutcome {
    pub solution: String,
    pub group: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<GroupActionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Every subject under every named flow, in input order. `points`,
/// `precision` and `tol` override the subjects' own sampling.
pub fn verify_group_actions(
    pde: &Pde,
    subjects: &[super::catalog::Subject],
    flows: &[(String, GroupElement)],
    points: usize,
    precision: Precision,
    tol: f64,
    epsilons: &[f64],
) -> Vec<GroupActionOutcome> {
    let mut out = Vec::new();
    for s in subjects {
        let mut sampling = s.sampling.clone();
        sampling.points = points;
        sampling.precision = precision;
        for (gname, g) in flows {
            let tag = format!("{}/{}", s.name, gname);
            let r = verify_group_action(pde, g, &s.solution, &sampling, epsilons, &tag);
            out.push(match r {
                Ok(rep) => GroupActionOutcome {
                    solution: s.name.clone(),
                    group: gname.clone(),
                    passed: rep.passed(tol),
                    report: Some(rep),
                    error: None,
                },
                Err(e) => GroupActionOutcome {
                    solution: s.name.clone(),
                    group: gname.clone(),
                    passed: false,
                    report: None,
                    error: Some(e.to_string()),
                },
            });
        }
    }
    out
}
