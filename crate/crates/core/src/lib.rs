//! Numerical laboratory for free boundary constant-mean-curvature surfaces
//! of revolution in the unit ball.
//!
//! The crate builds the Delaunay family of CMC annuli (unduloids, the
//! catenoid, nodoids) as roulettes of conics and as solutions of the
//! tangent-angle profile ODE, locates their free-boundary contact with a
//! centered sphere, and verifies the linear theory around them:
//!
//! * [`profile`] builds planar generatrices: catenaries, conics, roulettes,
//!   the CMC profile ODE and the support function.
//! * [`delaunay`] assembles the two-parameter Delaunay family, the
//!   free-boundary radius, unit-ball annuli, and the critical catenoid.
//! * [`jacobi`] treats the separated Jacobi problem on surfaces of
//!   revolution: Robin shooting, nullity counts, Killing-induced Jacobi
//!   fields, and a finite-difference linearization check.
//! * [`disk`] covers the flat equatorial disk: Robin kernel, foliation
//!   solution, and radial reductions.
//! * [`foliation`] certifies the catenoid foliation solution: closed form,
//!   the constant `c1`, and a sign certificate.
//! * [`surface`] produces revolution meshes with quadrature weights,
//!   Killing-field flux integrals, and OBJ export.
//! * [`extension`] realizes a cube-average extension operator recovering
//!   prescribed normal derivatives at a boundary.
//!
//! All operations are pure functions of their inputs; returned values are
//! plain data and safe to share across threads.

// Domain checks use `!(x > 0.0)` so NaN parameters are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod delaunay;
pub mod disk;
pub mod error;
pub mod extension;
pub mod foliation;
pub mod jacobi;
pub mod ode;
pub mod profile;
pub mod rootfind;
pub mod surface;

pub use error::{Error, Result};
