//! Radial Schrödinger–Bopp–Podolsky solver.
//!
//! Finds radial solutions of
//! `-Δu + ωu + q²φu = |u|^{p-2}u`, `-Δφ + a²Δ²φ = 4πu²`
//! by eliminating `φ = K * u²` with the Bopp–Podolsky kernel
//! `K(r) = (1 - e^{-r/a})/r`, and checks the variational identities that any
//! solution must satisfy.

pub mod error;
pub mod functional;
pub mod kernel;
pub mod limit;
pub mod quadrature;
pub mod potential;
pub mod radial;
pub mod shooting;
pub mod solver;
pub mod verify;

pub use error::{Result, SbpError};
