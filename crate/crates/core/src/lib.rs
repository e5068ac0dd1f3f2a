//! Pseudo-spectral simulation of the incompressible Oldroyd-B system on the
//! 2π-periodic torus, without stress damping, together with the machinery to
//! verify its dissipative structure numerically.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`]: grids, transforms, Fourier multipliers, Leray projection and
//!   alias-free quadratic products.
//! * [`model`]: the Oldroyd-B right-hand side and its constitutive pieces.
//! * [`hookean`]: Hookean elasticity `(u, F)` and its conformation `G = FFᵀ − I`.
//! * [`integrator`]: integrating-factor RK4 time stepping.
//! * [`diagnostics`]: Sobolev norms, the time-weighted energies and decay fits.
//! * [`identities`]: round-off level checks of the algebraic identities.
//! * [`linear`]: closed-form per-mode solution of the linearized system.
//! * [`harness`]: run configuration, presets, output files and experiments.

pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod hookean;
pub mod identities;
pub mod integrator;
pub mod linear;
pub mod model;
pub mod spectral;

pub use error::{Error, Result};
