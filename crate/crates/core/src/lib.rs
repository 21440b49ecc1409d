//! Finite-element solvers for steady viscoelastic flow under the Oldroyd
//! 3-parameter constitutive model.
//!
//! Two formulations are provided:
//!
//! * the SRTD decoupled iteration (a Navier-Stokes-like solve for velocity and
//!   an auxiliary pressure, a pressure transport solve, and a constitutive
//!   solve for the extra stress), see [`solvers::srtd_solve`];
//! * the EVSS coupled formulation solved monolithically with Newton's method,
//!   see [`solvers::evss_solve`].
//!
//! Both run on straight-edged triangulations ([`mesh`]) with Taylor-Hood
//! velocity/pressure pairs ([`fem`]). The [`benchmarks`] module holds the
//! lid-driven cavity and journal-bearing problems together with the
//! convergence, Weissenberg-limit, Newtonian-comparison and timing drivers.

pub mod benchmarks;
pub mod error;
pub mod fem;
pub mod forms;
pub mod linalg;
pub mod mesh;
pub mod solvers;

pub use error::{Error, Result};
