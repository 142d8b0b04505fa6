//! Two-point quadrature rules with verified error bounds.
//!
//! This crate implements the generalized two-point rule
//! `(x-a) f(y) + (b-x) f(z)` for `a <= y <= x <= z <= b`, its full
//! derivative expansion with an exact Peano-kernel remainder, a
//! harmonic-sequence (Appell) representation of the same deficit, the
//! symmetric rule averaging mirrored nodes, and the family of remainder
//! bounds these representations support: total p-variation,
//! Lebesgue-norm, Hoelder, kernel-factored, and Chebyshev-functional
//! (Gruess-type) estimates, with sharp constants probed by extremal
//! functions.
//!
//! Everything is checked at runtime against an independent adaptive
//! Gauss-Kronrod oracle: each identity carries a residual contract and
//! each bound a dominance contract, exercised by the [`verify`] suites,
//! the acceptance test target, and the `twopoint` CLI.
//!
//! ```
//! use twopoint::functions::TestFunction;
//! use twopoint::quadrature::expansion;
//! use twopoint::{Interval, NodeTriple};
//!
//! let iv = Interval::new(0.0, 1.0)?;
//! let nodes = NodeTriple::new(0.2, 0.5, 0.9, iv)?;
//! let result = expansion(&TestFunction::exp(), 3, nodes, iv)?;
//! assert!(result.within_tolerance(1e-8));
//! # Ok::<(), twopoint::Error>(())
//! ```
//!
//! The narrative documentation lives in [`guide`], whose chapters are the
//! mdbook under `book/`; its code blocks run as doc-tests.

pub mod algebra;
pub mod bounds;
pub mod error;
pub mod fink;
pub mod functions;
pub mod gruss;
pub mod guide;
pub mod kernels;
pub mod oracle;
pub mod quadrature;
pub(crate) mod rng;
pub mod verify;

pub use error::{Error, Result};
pub use kernels::{Interval, KernelMode, NodeTriple};
