//! Verification of closed-form solutions, reductions and Weierstrass
//! identities against the equation.

pub mod catalog;
pub mod group;
pub mod reduction;
pub mod residual;
pub mod weierstrass;

pub use group::{verify_group_action, GroupActionReport};
pub use residual::{ode_residual, residual, Precision, ResidualReport, Sampling, SymbolicVerdict};
