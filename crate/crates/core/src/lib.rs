//! Numerical laboratory for the quantum Curie-Weiss model: the transverse-field
//! Ising model on the complete graph, studied through its path-integral
//! representation on the time circle of circumference beta.
//!
//! The crate is organized around the stochastic-geometric picture:
//!
//! * [`circle`] - value types on the circle: Poisson puncture sets, piecewise
//!   constant spin trajectories, piecewise constant fields.
//! * [`single_spin`] - exact one-circle computations (log moment generating
//!   functional, correlation functions, Ursell functions) via ordered products
//!   of 2x2 matrix exponentials. The numerical oracle for everything else.
//! * [`fk`] - exact samplers for the Fortuin-Kasteleyn puncture marginal and
//!   the spin measure via Edwards-Sokal painting.
//! * [`mean_field`] - the one-dimensional variational problem: phase diagram,
//!   spontaneous magnetization, critical exponent, stability coefficients.
//! * [`ed`] - finite-N exact diagonalization, dense and total-spin-block.
//! * [`pimc`] - finite-N path-integral Monte Carlo (Trotter lattice and
//!   continuous-time heat bath) with Binder-cumulant scans.
//! * [`variational`] - verification of the duality/reduction chain: reflection
//!   positivity, constant-field optimality, rate-function lower bounds.

pub mod circle;
pub mod cli;
pub mod ed;
pub mod error;
pub mod fk;
pub mod mean_field;
pub mod numdiff;
pub mod params;
pub mod pimc;
pub mod quad;
pub mod single_spin;
pub mod stats;
pub mod variational;

mod mat2;

pub use error::QcwError;
pub use params::ModelParams;

/// Crate result alias.
pub type Result<T> = std::result::Result<T, QcwError>;
