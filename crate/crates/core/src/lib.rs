//! Steady-state phonon occupation of EIT cooling of a single trapped ion.
//!
//! Three independent routes to the same number are provided:
//!
//! * [`liouvillian`]: the exact Lindblad steady state on a truncated Fock space,
//! * [`subspace`]: the stationary state of the 7-level model projected around `|d,0⟩`,
//! * [`analytic`]: closed-form expressions up to second order in the Lamb-Dicke parameter.
//!
//! [`sweep`] ties them together into parameter sweeps and writes CSV, JSON and SVG reports.
//! All frequencies are in units of the trap frequency ν.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod hilbert;
pub mod liouvillian;
pub mod linalg;
pub mod physics;
pub mod report;
pub mod subspace;
pub mod sweep;

pub use error::{Error, Result};
pub use hilbert::{ComplexMatrix, FockCutoff};
pub use physics::{Basis, CoolingParams, DerivedEit};
