//! Truncated Picard iteration over Schauder-basis coefficient spaces.
//!
//! Points of the space are coefficient sequences `x = Σ xᵢeᵢ` stored as a
//! finite prefix plus an exact geometric tail, so norms, tail norms and
//! projections `[x]_m` are evaluated in closed form on the full
//! infinite-dimensional element rather than on an ambient truncation.
//!
//! The crate is organised bottom-up:
//!
//! * [`space`]: elements, bases, metrics, projections.
//! * [`operators`]: diagonal, affine finite-rank and componentwise
//!   nonlinear self-maps with a validated contraction class.
//! * [`iteration`]: truncated iterates, `(n, m)` trace grids and an
//!   adaptive fixed-point solver with an `ε/3` budget split.
//! * [`bounds`]: explicit constants and numeric checks of the distance,
//!   neighbourhood and fixed-point coincidence inequalities.
//! * [`delay_ode`]: a scalar delay differential equation integrated with a
//!   fixed-step exponential integrator, plus strip-contraction checks.
//!
//! Everything here is `no_std` + `alloc`; file formats and the CLI live in
//! the companion `schauder` crate.
#![no_std]
#![warn(missing_docs)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod check;
pub mod delay_ode;
mod error;
pub mod iteration;
pub mod linalg;
mod math;
pub mod operators;
pub mod sampling;
pub mod space;

pub use check::{BoundCheck, CheckContext, CheckStatus};
pub use error::Error;
pub use operators::{ContractionClass, OperatorKind, OperatorSpec};
pub use space::{BasisSpec, Element, MetricKind, Tail};

/// Result alias used across the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Absolute tolerance for identities that hold exactly in closed form.
pub const EXACT_TOL: f64 = 1e-12;
