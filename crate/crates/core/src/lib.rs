//! Nonlinearly PT-symmetric dimer side-coupled to a discrete chain.
//!
//! The dimer pairs linear gain with nonlinear loss on one element and the
//! conjugate combination on the other. This crate provides:
//!
//! - closed-form eigenstates of the isolated dimer and its multistability
//!   census ([`dimer`]);
//! - the stationary scattering problem for chain waves hitting the dimer:
//!   dispersion, exact solution branches (perfect-transmission cubic, the
//!   transmission-zero family, the one-element-dark states), a Newton
//!   multistart solver and power sweeps with branch tracking ([`scattering`]);
//! - a time-domain integrator for the full chain with wave injection and
//!   absorbing edges, used to measure transmission dynamically and to
//!   classify the stability of stationary solutions ([`lattice`]);
//! - exact evanescent modes pinned to the dimer outside the band ([`pinned`]).

pub mod dimer;
pub mod error;
pub mod lattice;
pub mod model;
pub mod pinned;
pub mod poly;
pub mod rng;
pub mod scattering;

pub use error::{Error, Result};
pub use model::{DimerParams, DimerState};
