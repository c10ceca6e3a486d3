//! Numerical laboratory for a one-parameter family of polymatrix replicators.
//!
//! The population is split into three groups with two strategies each, so the
//! phase space is the prism `Δ¹ × Δ¹ × Δ¹`, which this crate identifies with
//! the unit cube `[0,1]³`. On top of the vector field the crate provides:
//!
//! * closed-form and Newton-based enumeration of equilibria with eigen data,
//! * detection and refinement of transcritical, Hopf and Belyakov events,
//! * an adaptive Dormand–Prince 5(4) integrator that keeps orbits in the cube,
//! * Lyapunov spectra by QR re-orthonormalisation of the tangent flow,
//! * invariant-manifold probes around the interior saddle-focus.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line front end and parallel sweeps live in the `polyrep` crate.

#![no_std]
#![warn(missing_debug_implementations)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bifurcation;
pub mod cube;
pub mod equilibria;
mod error;
pub mod flow;
pub mod game;
pub mod geometry;
pub mod linalg;
pub mod lyapunov;
pub mod ode;

pub use cube::{CubeState, ParameterRange, MU_MAX, MU_MIN};
pub use equilibria::{EigenData, Equilibrium, EquilibriumName, Stability};
pub use error::{Error, Result};
pub use num_complex::Complex64;
