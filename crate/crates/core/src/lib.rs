//! Series solutions, continuation and value-distribution checks for the
//! q-shift differential equation
//!
//! ```text
//! f'(z) = A f(qz) + B f(z)^2 + C f(z) + D
//! ```
//!
//! The crate is organised bottom-up:
//!
//! * [`series`]: truncated Laurent/Taylor arithmetic.
//! * [`solver`]: coefficient recurrences for entire, linear and Laurent solutions.
//! * [`residual`]: substitution checks of candidate solutions.
//! * [`continuation`]: extending a local solution with the functional equation.
//! * [`exppoly`]: exponential polynomials and the leading-term witness.
//! * [`poles`]: pole-order propagation along q-orbits.
//! * [`nevanlinna`]: proximity, counting and characteristic functions.
//! * [`classifier`]: necessary conditions as a three-valued decision table.

pub mod classifier;
pub mod continuation;
pub mod exppoly;
pub mod nevanlinna;
pub mod poles;
pub mod poly;
pub mod residual;
pub mod series;
pub mod solver;

pub use num_complex::Complex64;
pub use series::{Extended, Precision, TruncatedSeries, DEFAULT_ORDER};
pub use solver::{EquationParams, SolutionSeries};
