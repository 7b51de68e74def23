//! Symbolic engine for Lie point-symmetry analysis of the (3+1)-dimensional
//! KdV-type equation
//!
//! ```text
//! u_t + 6 u_x u_y + u_xxy + u_xxxxz + 60 u_x^2 u_z + 10 u_xxx u_z + 20 u_x u_xxz = 0
//! ```
//!
//! The crate is organised bottom-up:
//!
//! * [`expr`] and [`normal`]: exact symbolic expressions, a canonical
//!   polynomial normal form, parsing, printing, differentiation, substitution
//!   and numeric evaluation over any [`Scalar`].
//! * [`jet`]: jet-space bookkeeping, total derivatives and prolongation.
//! * [`detsys`] and [`linalg`]: determining equations and their exact
//!   solution under a polynomial ansatz.
//! * [`liealg`] and [`flows`]: brackets, structure constants and
//!   one-parameter groups.
//! * [`verify`]: residual checks of closed-form solutions and reductions,
//!   plus equianharmonic Weierstrass functions.

pub mod detsys;
pub mod data;
pub mod dd;
pub mod error;
pub mod expr;
pub mod flows;
pub mod grid;
pub mod jet;
pub mod liealg;
pub mod linalg;
pub mod normal;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use expr::{Expr, ExprKind, JetVar, MultiIndex, Symbol, SymbolKind};
pub use normal::{normalize, NormalForm};
pub use scalar::Scalar;

/// Exact coefficient type of every symbolic computation.
pub type Rational = num_rational::BigRational;
/// Exponents of powers in trees and monomials.
pub type Exponent = num_rational::Ratio<i64>;
/// Double-double working precision for residual tests.
pub type Dd = dd::DoubleDouble;
/// Complex evaluation mode.
pub type Complex64 = num_complex::Complex<f64>;
