//! Numerical laboratory for nonlocal boundary seminorms and trace operators
//! on irregular planar domains.
//!
//! The crate builds cusped wedges and a "prickly" snowflake attractor from an
//! infinite iterated function system, evaluates the distance-weighted
//! oscillation seminorm `ν^{s(·),p}` and its `(p,q)` variant, extracts
//! boundary traces by corkscrew-sequence averaging, and runs falsifiable
//! checks of the corkscrew, connectedness, oscillation, and Ahlfors-regularity
//! hypotheses that the trace theory rests on.
//!
//! Module map:
//!
//! * [`geometry`] — planar domains, boundary distance fields, inner balls,
//!   approach regions.
//! * [`fractal`] — index algebra, generator curves, similarity maps, the
//!   prickly snowflake boundary, and the Hausdorff dimension solver.
//! * [`measure`] — conformal masses on the attractor, Ahlfors-regularity
//!   scans, and a box-counting dimension oracle.
//! * [`fields`] — evaluable scalar and exponent fields, including the strict
//!   containment counterexample construction.
//! * [`seminorm`] — graded-mesh quadrature for the seminorm and the `α(s,θ)`
//!   exponent calculus.
//! * [`trace`] — corkscrew sequences, trace limits, Hölder-rate fits, Lebesgue
//!   point ladders, and admissibility-region grids.
//! * [`verify`] — hypothesis checkers and the counterexample series /
//!   quadrature comparison.

pub mod error;
pub mod fields;
pub mod fractal;
pub mod geometry;
pub mod measure;
pub mod sampling;
pub mod seminorm;
pub mod trace;
pub mod util;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{DomainApprox, Point2, Polyline};
