//! Polyhedral chains with Cauchy-stress-tensor coefficients.
//!
//! The library implements simplicial chains whose coefficients are symmetric
//! n×n matrices, the boundary algebra on them, the split of a boundary face
//! coefficient into stress and external-force blocks, constructive balancing
//! of distributed force systems by stressed simplices, mass functionals and
//! their current duals, a minimum-mass truss solver for the one-dimensional
//! case, and a numerical verifier for the fan constructions that govern when
//! stretched and compressed members may meet at an angle other than 90°.

pub mod balance;
pub mod chains;
pub mod decompose;
pub mod exterior;
pub mod fans;
pub mod io;
pub mod linalg;
pub mod optimize;
pub mod stress;

mod error;

pub use error::Error;

/// Default absolute tolerance used where a contract does not name one.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Coefficients below this magnitude are dropped when chains are merged.
pub const DROP_TOL: f64 = 1e-12;
