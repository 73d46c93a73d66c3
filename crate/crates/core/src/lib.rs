//! Exact-arithmetic engine for the correspondence between type-A quiver
//! varieties and Slodowy slices of nilpotent orbit closures.
//!
//! The crate works at the level of representative data: ADHM tuples over the
//! doubled `A_{n-1}` quiver, their path-algebra invariants, the embedding
//! `Φ` into transversal data for the framing `(N, 0, …, 0)`, and the
//! combinatorial dictionary between dimension vectors and flag types.

pub mod flags;
pub mod harness;
pub mod linalg;
pub mod matrix;
pub mod par;
pub mod partition;
pub mod phi;
pub mod paths;
pub mod quiver;
pub mod rational;
pub mod sample;
pub mod weight;

pub use matrix::{LinalgError, Matrix};
pub use partition::Partition;
pub use rational::Rational;
