//! Exact lifted (weighted) first-order model counting for the two-variable
//! fragment with counting quantifiers and cardinality constraints.
//!
//! The pipeline parses a [`formula::Problem`], compiles it into a pure
//! universal [`transform::CountingProgram`], tabulates 1-types and 2-types in
//! [`celltypes`], and sums closed-form terms over k-vectors in [`engine`].
//! [`oracle`] counts the same problems by enumeration on small domains.

pub mod celltypes;
pub mod engine;
pub mod error;
pub mod formula;
pub mod oracle;
pub mod scalar;
pub mod transform;
pub mod weights;

pub use error::{Error, ParseError, ParseErrorKind, Result};

/// Exact integers used for counts.
pub type Integer = num_bigint::BigInt;
/// Exact rationals used for weights and probabilities.
pub type Rational = num_rational::BigRational;
