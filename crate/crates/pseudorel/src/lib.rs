//! Radial spectral solver for the pseudorelativistic Schrödinger equation
//!
//! ```text
//! (c²|D|² + a²)^s u − a^{2s} u + μ u = |u|^{p−1} u
//! ```
//!
//! at large light speed `c`, constructed as `u_c = u_∞ + w` around the ground state
//! `u_∞` of `−Δu + u = u^p` by a contraction in `H¹ ∩ W^{1,q}`.
//!
//! - [`radial`]: grids, transforms, multipliers, norms.
//! - [`groundstate`]: the limit profile `u_∞`.
//! - [`operators`]: symbol multipliers, the dense operator `I − p u_∞^{p−1} P_∞(D)^{−1}`,
//!   and the factorized inverse of the linearization.
//! - [`solver`]: the fixed-point map and its contraction-driven solve.
//! - [`identities`]: the Pohozaev functional, the commutator identity, rescaling.
//! - [`lab`]: rate studies, manifests, and emission.

pub mod error;
pub mod groundstate;
pub mod identities;
pub mod io;
pub mod lab;
pub mod operators;
pub mod radial;
pub mod solver;

pub use error::Error;
pub use pseudorel_core as core;
