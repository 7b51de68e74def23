//! Weierstrass `℘`, `℘'` and `ζ` from the Laurent series at the origin,
//! extended by the duplication formulas, plus the ODE checks built on them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{Complex64, Error, Result};

const TERMS: usize = 30;
const MAX_HALVINGS: u32 = 8;

#[derive(Clone, Debug)]
pub struct Weierstrass {
    pub g2: Complex64,
    pub g3: Complex64,
    /// `c[k]` for `k = 2..TERMS+2`; `℘(z) = z⁻² + Σ c_k z^{2k−2}`.
    c: Vec<Complex64>,
    /// Arguments up to this modulus are summed directly.
    radius: f64,
}

impl Weierstrass {
    pub fn new(g2: f64, g3: f64) -> Self {
        let (g2, g3) = (Complex64::new(g2, 0.0), Complex64::new(g3, 0.0));
        let mut c = vec![Complex64::new(0.0, 0.0); TERMS + 2];
        c[2] = g2 / 20.0;
        c[3] = g3 / 28.0;
        for k in 4..TERMS + 2 {
            let s: Complex64 = (2..=k - 2).map(|m| c[m] * c[k - m]).sum();
            c[k] = s * (3.0 / ((2 * k + 1) as f64 * (k - 3) as f64));
        }
        // Root test on the last nonzero coefficients estimates the distance to the
        // nearest lattice pole; a third of it keeps the truncation negligible.
        let reach = (TERMS - 4..TERMS + 2)
            .filter(|&k| c[k].norm() > 0.0)
            .map(|k| c[k].norm().powf(-1.0 / (2.0 * k as f64 - 2.0)))
            .fold(f64::INFINITY, f64::min);
        Weierstrass { g2, g3, c, radius: (reach / 3.0).min(64.0) }
    }

    /// Equianharmonic case `g2 = 0`.
    pub fn equianharmonic(g3: f64) -> Self {
        Weierstrass::new(0.0, g3)
    }

    fn series(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        let z2 = z * z;
        let (mut p, mut dp, mut zeta) = (z2.inv(), -2.0 * (z2 * z).inv(), z.inv());
        let mut pw = Complex64::new(1.0, 0.0);
        for k in 2..TERMS + 2 {
            let kf = k as f64;
            // pw = z^{2k−4}
            p += self.c[k] * pw * z2;
            dp += self.c[k] * (2.0 * kf - 2.0) * pw * z;
            zeta -= self.c[k] * pw * z2 * z / (2.0 * kf - 1.0);
            pw *= z2;
        }
        (p, dp, zeta)
    }

    /// `(℘(z), ℘'(z), ζ(z))`.
    pub fn eval(&self, z: Complex64) -> Result<(Complex64, Complex64, Complex64)> {
        if !z.is_finite() {
            return Err(Error::Domain(format!("non-finite argument {z}")));
        }
        if z.norm() < 1e-6 {
            return Err(Error::Pole(format!("℘ at {z}")));
        }
        let mut halvings = 0;
        let mut w = z;
        while w.norm() > self.radius {
            if halvings == MAX_HALVINGS {
                return Err(Error::Domain(format!("|z| = {} too large for the series", z.norm())));
            }
            w /= 2.0;
            halvings += 1;
        }
        let (mut p, mut q, mut zeta) = self.series(w);
        for _ in 0..halvings {
            if q.norm() < 1e-10 * (1.0 + p.norm()) {
                return Err(Error::Pole(format!("℘' vanishes near {z}")));
            }
            let r = 6.0 * p * p - self.g2 / 2.0;
            let q2 = q * q;
            let np = -2.0 * p + r * r / (4.0 * q2);
            let nq = -q + 3.0 * p * r / q - r * r * r / (4.0 * q2 * q);
            let nz = 2.0 * zeta + r / (2.0 * q);
            (p, q, zeta) = (np, nq, nz);
        }
        if !(p.is_finite() && q.is_finite() && zeta.is_finite()) {
            return Err(Error::Pole(format!("℘ at {z}")));
        }
        Ok((p, q, zeta))
    }

    pub fn p(&self, z: Complex64) -> Result<Complex64> {
        self.eval(z).map(|v| v.0)
    }

    pub fn dp(&self, z: Complex64) -> Result<Complex64> {
        self.eval(z).map(|v| v.1)
    }

    pub fn zeta(&self, z: Complex64) -> Result<Complex64> {
        self.eval(z).map(|v| v.2)
    }
}

/// `n`-th derivative by the trapezoid rule on the Cauchy integral over a
/// circle of radius `rho` with `points` nodes.
pub fn cauchy_derivative(
    f: &dyn Fn(Complex64) -> Result<Complex64>,
    z: Complex64,
    n: u32,
    rho: f64,
    points: usize,
) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..points {
        let w = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / points as f64);
        acc += f(z + rho * w)? * w.powu(n).inv();
    }
    let fact: f64 = (1..=n).map(f64::from).product();
    Ok(acc * fact / (points as f64 * rho.powi(n as i32)))
}

const RHO: f64 = 0.05;
const NODES: usize = 64;

fn d(f: &dyn Fn(Complex64) -> Result<Complex64>, z: Complex64, n: u32) -> Result<Complex64> {
    cauchy_derivative(f, z, n, RHO, NODES)
}

/// Prefactor variants for the solutions built from `℘` and `ζ`, in terms
/// of `a` and `μ`, the real cube root of `−1/a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Prefactor {
    /// `μ⁻¹`
    InverseMu,
    /// `a·μ`
    AMu,
    /// `a·μ⁻¹`
    AInverseMu,
    /// `(−1/a)^(−1/a)`, principal branch.
    PowerMinusInverseA,
}

impl Prefactor {
    pub fn value(self, a: f64) -> Complex64 {
        let mu = mu(a);
        match self {
            Prefactor::InverseMu => Complex64::new(1.0 / mu, 0.0),
            Prefactor::AMu => Complex64::new(a * mu, 0.0),
            Prefactor::AInverseMu => Complex64::new(a / mu, 0.0),
            Prefactor::PowerMinusInverseA => Complex64::new(-1.0 / a, 0.0).powc(Complex64::new(-1.0 / a, 0.0)),
        }
    }
}

impl std::str::FromStr for Prefactor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "inverse-mu" => Prefactor::InverseMu,
            "a-mu" => Prefactor::AMu,
            "a-inverse-mu" => Prefactor::AInverseMu,
            "power-minus-inverse-a" => Prefactor::PowerMinusInverseA,
            _ => return Err(Error::Invalid(format!("unknown prefactor `{s}`"))),
        })
    }
}

/// Real cube root of `−1/a`.
pub fn mu(a: f64) -> f64 {
    (-1.0 / a).cbrt()
}

/// Identities and ODEs checked on sampled complex points.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
pub enum WeierstrassCheck {
    /// `℘'' = 6℘² − g2/2`, with `℘''` from the Cauchy integral.
    POde { g2: f64, g3: f64 },
    /// `℘'² = 4℘³ − g2℘ − g3`.
    PAlgebraic { g2: f64, g3: f64 },
    /// Series `℘'` against the Cauchy derivative of `℘`.
    PDerivative { g2: f64, g3: f64 },
    /// `ζ' = −℘`.
    ZetaDerivative { g2: f64, g3: f64 },
    /// `f = k·℘(μ(ζ + c1); 0, c2)` in `6f² + a f'' = 0`.
    FOde { a: f64, c1: f64, c2: f64, prefactor: Prefactor },
    /// `H = k·ζ_W(μζ + c6; 0, c7) + c8` in `6H'² + a H''' = 0`.
    HOdeZeta { a: f64, c6: f64, c7: f64, c8: f64, prefactor: Prefactor },
    /// `H = k·℘(μ(ζ + c1); 0, c2)` in `6H'² + a H''' = 0`.
    HOdeP { a: f64, c1: f64, c2: f64, prefactor: Prefactor },
}

#[derive(Clone, Debug, Serialize)]
pub struct WeierstrassReport {
    /// Largest `|lhs − rhs| / (|lhs| + |rhs|)`.
    pub max_residual: f64,
    pub samples: usize,
    pub rejected: usize,
}

/// Points in the annulus `0.1 ≤ |z| ≤ 2`.
fn annulus(seed: u64, count: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Complex64::from_polar(rng.gen_range(0.1..2.0), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect()
}

fn rel(lhs: Complex64, rhs: Complex64) -> f64 {
    let s = lhs.norm() + rhs.norm();
    if s == 0.0 {
        0.0
    } else {
        (lhs - rhs).norm() / s
    }
}

/// Reject points whose Cauchy circle passes near a pole of `℘`.
fn clear_of_poles(w: &Weierstrass, z: Complex64) -> Result<()> {
    let p = w.p(z)?;
    if p.norm() * (4.0 * RHO).powi(2) > 1.0 {
        return Err(Error::Pole(format!("℘ large at {z}")));
    }
    Ok(())
}

impl WeierstrassCheck {
    fn residual_at(&self, z: Complex64) -> Result<f64> {
        match *self {
            WeierstrassCheck::POde { g2, g3 } => {
                let w = Weierstrass::new(g2, g3);
                clear_of_poles(&w, z)?;
                let p = w.p(z)?;
                Ok(rel(d(&|s| w.p(s), z, 2)?, 6.0 * p * p - g2 / 2.0))
            }
            WeierstrassCheck::PAlgebraic { g2, g3 } => {
                let w = Weierstrass::new(g2, g3);
                let (p, q, _) = w.eval(z)?;
                Ok(rel(q * q, 4.0 * p * p * p - g2 * p - g3))
            }
            WeierstrassCheck::PDerivative { g2, g3 } => {
                let w = Weierstrass::new(g2, g3);
                clear_of_poles(&w, z)?;
                Ok(rel(d(&|s| w.p(s), z, 1)?, w.dp(z)?))
            }
            WeierstrassCheck::ZetaDerivative { g2, g3 } => {
                let w = Weierstrass::new(g2, g3);
                clear_of_poles(&w, z)?;
                Ok(rel(d(&|s| w.zeta(s), z, 1)?, -w.p(z)?))
            }
            WeierstrassCheck::FOde { a, c1, c2, prefactor } => {
                let (w, m, k) = (Weierstrass::equianharmonic(c2), mu(a), prefactor.value(a));
                clear_of_poles(&w, m * (z + c1))?;
                let f = |s: Complex64| Ok(k * w.p(m * (s + c1))?);
                let v = f(z)?;
                Ok(rel(6.0 * v * v, -a * d(&f, z, 2)?))
            }
            WeierstrassCheck::HOdeZeta { a, c6, c7, c8, prefactor } => {
                let (w, m, k) = (Weierstrass::equianharmonic(c7), mu(a), prefactor.value(a));
                clear_of_poles(&w, m * z + c6)?;
                let h = |s: Complex64| Ok(k * w.zeta(m * s + c6)? + c8);
                let h1 = d(&h, z, 1)?;
                Ok(rel(6.0 * h1 * h1, -a * d(&h, z, 3)?))
            }
            WeierstrassCheck::HOdeP { a, c1, c2, prefactor } => {
                let (w, m, k) = (Weierstrass::equianharmonic(c2), mu(a), prefactor.value(a));
                clear_of_poles(&w, m * (z + c1))?;
                let h = |s: Complex64| Ok(k * w.p(m * (s + c1))?);
                let h1 = d(&h, z, 1)?;
                Ok(rel(6.0 * h1 * h1, -a * d(&h, z, 3)?))
            }
        }
    }

    /// Worst relative residual over `points` accepted samples.
    pub fn run(&self, seed: u64, points: usize) -> Result<WeierstrassReport> {
        let mut worst: f64 = 0.0;
        let (mut samples, mut rejected) = (0, 0);
        for z in annulus(seed, points * 4) {
            if samples == points {
                break;
            }
            match self.residual_at(z) {
                Ok(r) => {
                    worst = worst.max(r);
                    samples += 1;
                }
                Err(Error::Pole(_) | Error::Domain(_)) => rejected += 1,
                Err(e) => return Err(e),
            }
        }
        if samples == 0 {
            return Err(Error::AllSingular(rejected));
        }
        Ok(WeierstrassReport { max_residual: worst, samples, rejected })
    }
}
