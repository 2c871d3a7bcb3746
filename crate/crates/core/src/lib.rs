//! Simulation and measurement toolkit for mixtures of experts trained by
//! gradient flow.
//!
//! The crate integrates the coupled N-particle dynamics of expert parameters
//! on the torus, runs a large reference ensemble standing in for the
//! mean-field law, and measures how fast the empirical parameter measure
//! approaches that law in exact Wasserstein-2 distance.
//!
//! Module map:
//!
//! - [`torus`] — geometry, the geodesic ℓ¹ metric, and seeded sampling on the
//!   d-dimensional torus with period 2π.
//! - [`qsim`] — dense statevector simulation of parametric quantum circuits
//!   with exact adjoint gradients.
//! - [`experts`] — the expert abstraction (Fourier and quantum realizations),
//!   the uniform mixture, the quadratic loss, and the mean-field drift.
//! - [`dynamics`] — fixed-step RK4 integration of the interacting particle
//!   system with trajectory recording.
//! - [`mckean`] — coupled reference ensembles and pathwise/pointwise chaos
//!   metrics.
//! - [`transport`] — exact Wasserstein-2 between uniform empirical measures
//!   (Hungarian matching and a transportation network simplex).
//! - [`experiments`] — sweep orchestration, rate-law fitting, and bound
//!   verification reports.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod experts;
pub mod mckean;
pub mod qsim;
pub mod torus;
pub mod transport;
pub mod util;

pub use error::{Error, Result};
