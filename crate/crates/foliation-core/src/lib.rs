//! Exact-arithmetic engine for foliated surface models.
//!
//! The crate represents a projective surface together with a foliation as a
//! finite combinatorial object: curves with exact rational invariants, a
//! symmetric intersection form, and tagged singularities. On top of that it
//! computes adjunction indices, detects and contracts chains, runs the
//! directed minimal model loop, produces Zariski decompositions by two
//! independent algorithms, and classifies the curves orthogonal to the
//! positive part. All arithmetic is exact; no floating point anywhere.

// Error variants keep the refuting witness (chain, determinants, degrees)
// because reports serialize them verbatim.
#![allow(clippy::result_large_err)]

pub mod batch;
pub mod chains;
pub mod classify;
pub mod contraction;
pub mod corpus;
pub mod divisor;
pub mod indices;
pub mod linalg;
pub mod mmp;
pub mod model;
pub mod rational;
pub mod zariski;

pub use rational::Rat;
