//! Phase-space representation of coupled spin-1/2 systems.
//!
//! Operators on N coupled spins map one-to-one onto finite spherical-
//! harmonic expansions over N spheres. This crate provides both sides of
//! that correspondence and the machinery connecting them:
//!
//! - [`angular`]: Clebsch-Gordan / 6-j coupling coefficients and the
//!   derived product and Poisson-bracket expansion tables.
//! - [`spinop`]: dense tensor and product operators, the von-Neumann
//!   right-hand side, exact matrix propagation, and entanglement entropy.
//! - [`wigner`]: the coefficient representation of phase-space functions,
//!   the forward/inverse transform, point evaluation, pointwise products,
//!   spherical Poisson brackets, and rank projection.
//! - [`star`]: prestar/star products, star commutators, and the phase-space
//!   equation of motion.
//! - [`evolve`]: generator construction and time propagation, with a
//!   matrix-mechanics oracle comparison.
//! - [`quad`]: Gauss-Legendre sphere quadrature, the integral (three-point
//!   kernel) star product, and the phase-space postulate validation suite.

pub mod angular;
pub mod error;
pub mod evolve;
pub mod quad;
pub mod spinop;
pub mod star;
pub mod wigner;

pub use error::{Error, Result};
