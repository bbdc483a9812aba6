//! Generalized Hilbert (Hankel moment) operators induced by positive
//! Borel measures on [0,1).
//!
//! The crate is organized as:
//! - [`measure`]: measures (power-log densities, atoms, mixtures), their
//!   moments, tails and Carleson-type ratio reports;
//! - [`analytic`]: power series, test-function families and Bloch / H^2 /
//!   BMOA norm estimation on sampling grids;
//! - [`operator`]: the operator itself — Hankel matrices, coefficient and
//!   integral application routes, essential-norm brackets;
//! - [`verify`]: scripted numerical suites exercising the relationships
//!   between tail conditions, norms and operator behavior;
//! - [`quad`] and [`par`]: adaptive quadrature and the parallel map layer.

pub mod error;
pub mod par;
pub mod quad;

pub mod analytic;
pub mod measure;
pub mod operator;
pub mod verify;

pub use error::{Error, Result};
pub use measure::{CarlesonGridSpec, CarlesonReport, Estimate, Measure, MomentTable};
