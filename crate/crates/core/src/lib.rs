//! Analysis of primitive substitution subshifts.
//!
//! The crate computes return words and derived substitutions, builds an
//! equivalent proper substitution, and decides with exact integer linear
//! algebra whether the subshift has finitely many Cantor factors and
//! finitely many non-periodic Cantor factors. It also generates S-adic and
//! Sturmian sequences and measures linear recurrence on finite prefixes.

pub mod analysis;
pub mod arith;
pub mod error;
pub mod linalg;
pub mod morphism;
pub mod properize;
pub mod returnwords;
pub mod sadic;
pub mod words;

pub use error::{Error, Result};
pub use linalg::{IntPolynomial, IntegerMatrix, RationalVector};
pub use morphism::{Morphism, Periodicity, Substitution};
pub use words::{Alphabet, Letter, Word};
