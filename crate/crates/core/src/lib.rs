//! Exact-rational verification of correlation inequalities on the Boolean
//! hypercube `{0,1}^n`.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`]: points, dense point sets, the coordinatewise order and
//!   upset enumeration.
//! * [`measure`]: exact probability measures, the FKG lattice condition and
//!   positive association.
//! * [`strong`]: block partitions `A, C_1..C_k, B` and the inequality
//!   `mu(A) mu(B) >= e2(mu(C_1), .., mu(C_k))`, plus the fiber-by-fiber
//!   induction trace for product measures.
//! * [`realization`]: compiling FKG measures into monotone functions of
//!   independent Bernoulli bits and checking such witnesses.
//! * [`percolation`] and [`degree`]: the two applications.
//! * [`gen`]: seeded random generators used by the property batteries.
//!
//! No floating point enters a verdict. Floats only appear in Monte-Carlo
//! estimates and display values.

pub mod degree;
pub mod error;
pub mod gen;
pub mod lattice;
pub mod measure;
pub mod percolation;
pub mod rational;
pub mod realization;
pub mod strong;
mod unionfind;

pub use error::{Error, Result};
pub use lattice::{Point, PointSet};
pub use measure::{FkgViolation, Measure};
pub use rational::Rational;
pub use strong::{InequalityReport, Label, Partition, Verdict};
