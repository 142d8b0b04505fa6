//! The user guide, chapter by chapter.
//!
//! Each module below embeds one chapter of the mdbook under `book/` as its
//! documentation, so the book renders here as rustdoc and, more
//! importantly, every code block in the book compiles and runs as a
//! doc-test. The guide cannot drift from the library: `cargo test` fails
//! if a snippet stops being true.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/two-point-rule.md")]
pub mod two_point_rule {}

#[doc = include_str!("../../../book/src/kernels.md")]
pub mod kernels {}

#[doc = include_str!("../../../book/src/error-bounds.md")]
pub mod error_bounds {}

#[doc = include_str!("../../../book/src/harmonic-sequences.md")]
pub mod harmonic_sequences {}

#[doc = include_str!("../../../book/src/symmetric-rule.md")]
pub mod symmetric_rule {}

#[doc = include_str!("../../../book/src/chebyshev-functional.md")]
pub mod chebyshev_functional {}

#[doc = include_str!("../../../book/src/oracle-and-verification.md")]
pub mod oracle_and_verification {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
