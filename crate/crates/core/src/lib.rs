//! Scalar numerics for the generalized pseudorelativistic operator
//!
//! ```text
//! P_c(D) = (c²|D|² + a²)^s − a^{2s} + μ,     P_∞(D) = |D|² + 1
//! ```
//!
//! This crate is `no_std` (with `alloc`) and holds everything that can be done without
//! a grid transform: symbol evaluation in cancellation-free form, the pointwise symbol
//! bounds and their sweeps, existence classification and the parameter rescaling, the
//! nonlinearity remainder, composite quadrature and finite-difference stencils, and the
//! log-log slope fit used by convergence studies.
//!
//! The grid-based solver lives in the `pseudorel` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod existence;
pub mod fit;
pub mod nonlinear;
pub mod quadrature;
pub mod series;
pub mod symbols;

mod math;

pub use existence::{classify_existence, ExistenceRegime, ScalingMap};
pub use symbols::{BoundReport, ParamError, SymbolParams};
