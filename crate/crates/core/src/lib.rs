//! Numerical objects attached to the one-parameter slices of the cubic family
//!
//! ```text
//! P(z) = λ z (1 - (1 + 1/c) z / 2 + z² / (3c))
//! ```
//!
//! which fixes `0` with multiplier `λ` and has critical points `1` and `c`.
//!
//! The crate covers:
//!
//! * [`family`]: the polynomials, their unmarked coordinates and escape bounds,
//! * [`series`]: the linearizing power series and Cauchy-Hadamard radius estimators,
//! * [`rotation`]: continued fractions of rotation numbers,
//! * [`attracting`]: the linearizing coordinate on the basin, `r(P)` and the Z-curve,
//! * [`parabolic`]: the polynomial `Č(u)`, its roots and the atomic measures `μ_{p/q}`,
//! * [`potential`]: potentials, grid Laplacians, test-function pairings and the
//!   rational-to-irrational convergence experiment,
//! * [`render`]: parameter-plane rasters, height fields and the raw sidecar format,
//! * [`parse`]: textual forms of complex numbers and rotation numbers.

pub mod attracting;
pub mod error;
pub mod family;
pub mod parabolic;
pub mod parse;
pub mod potential;
pub mod render;
pub mod rotation;
pub mod series;

pub use error::{Error, Result};
pub use num_complex::Complex64;
