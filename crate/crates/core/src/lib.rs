//! Digital nets over prime fields and the discrepancy measures that go with them.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the algorithmic
//! core:
//!
//! * [`field`]: arithmetic and rank computations over `Z_b`, including the
//!   `(t, m, d)`-net property check.
//! * [`nets`]: generating matrices, point generation, digital shifts of depth
//!   `m` and symmetrization.
//! * [`metrics`]: exact O(N²) star / extreme / periodic L2 discrepancy and
//!   diaphony, plus grid-quadrature and Monte-Carlo estimators for general `p`.
//! * [`exact`]: the same L2 formulas evaluated in exact rational arithmetic for
//!   point sets on a `b`-adic grid.
//! * [`haar`]: dyadic Haar coefficients of the anchored discrepancy function.
//! * [`walsh`]: base-`b` Walsh analysis, dual nets and shift expectations.
//! * [`formulas`]: closed-form extreme L2 values of the two-dimensional net
//!   families.
//!
//! File formats, threading and the command-line driver live in the `dnet`
//! crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod exact;
pub mod field;
pub mod formulas;
pub mod haar;
pub mod metrics;
pub mod nets;
pub mod quadrature;
pub mod sum;
pub mod walsh;

mod error;

pub use error::Error;
pub use field::{MatrixZb, PrimeBase};
pub use metrics::{DiscrepancyReport, Method, Metric};
pub use nets::{DigitalShift, GeneratorSet, PointSet};
pub use sum::{Executor, Sequential};

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Exact rational numbers used by the rational evaluation mode.
pub type Rational = num_rational::BigRational;
