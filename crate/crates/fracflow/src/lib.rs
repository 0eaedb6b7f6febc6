//! Fundamental solutions, Fox H-function evaluation and decay experiments
//! for the time- and space-fractional diffusion equation
//! ∂_t^α(u - u₀) + (-Δ)^{β/2} u = f.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decay_lab;
pub mod error;
pub mod fox_h;
pub mod grid_solver;
pub mod kernels;
pub mod quadrature;
pub mod special_functions;
pub mod transform_solver;

pub use error::{Error, Result};
