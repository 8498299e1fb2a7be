//! Classical and quantum anisotropic oscillator on the sphere, the plane
//! and the hyperboloid.
//!
//! * [`ktrig`]: curvature-dependent cosine, sine and tangent.
//! * [`geometry`]: ambient, parallel and polar charts.
//! * [`classical`]: Hamiltonian, ladder/shift functions, constants of motion.
//! * [`dynamics`]: implicit midpoint integration and closed-orbit search.
//! * [`qspectra`]: closed-form quantum levels and degeneracy classes.
//! * [`qnumeric`]: finite-difference eigensolver and operator checks.
//! * [`cli`]: the `curvosc` command-line front end.

pub mod classical;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod ktrig;
pub mod qnumeric;
pub mod qspectra;

pub use error::{Error, Result};
