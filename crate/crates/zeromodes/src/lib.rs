//! Zero modes of the magnetic Dirac operator
//!
//! ```text
//! D_a = -2i [[0, ∂_z], [∂_z̄, 0]] - [[0, ā], [a, 0]]
//! ```
//!
//! on the plane, a disc, or the round sphere with circular holes removed,
//! under global spectral (APS) boundary conditions. The crate counts zero
//! modes, builds explicit bases `e^{±h}·(polynomial)`, verifies them with
//! independent finite-difference and boundary-trace oracles, and evaluates
//! the eta invariants and index of the boundary problem. A separate module
//! treats the local Berry–Mondragón condition on a concentric annulus.
//!
//! Fluxes are plain radians throughout; threshold comparisons (integer or
//! half-integer values of `Φ/2π`) snap within [`arith::THRESHOLD_TOL`].

pub mod aps;
pub mod arith;
pub mod bm;
pub mod conformal;
pub mod error;
pub mod eta;
pub mod field;
pub mod geometry;
pub mod modes;
pub mod potential;
pub mod quad;

pub use error::{Error, Result};

/// Two-component spinor `(u⁺, u⁻)`.
pub type Spinor = [num_complex::Complex64; 2];
