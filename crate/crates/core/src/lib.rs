//! Exact rational models for classifying spaces of gauge groups and
//! bundle automorphisms.
//!
//! The crate builds dg Lie algebras from structure constants, Quillen
//! models of simply connected spaces, Chevalley–Eilenberg coalgebras,
//! convolution algebras with their twists, and assembles them into the
//! full and simplified models of `Baut(p)`. All arithmetic is exact.

pub mod ce;
pub mod dgla;
pub mod error;
pub mod exactla;
pub mod freelie;
pub mod graded;
pub mod models;
pub mod rational;
pub mod scalar;
pub mod twist;

pub use error::{Error, Result};
pub use graded::{BasisElement, GradedMap, GradedSpace, Window};
pub use scalar::Scalar;

pub use rational::Rational;

/// Exact rationals, the default coefficient field.
pub type Q = Rational;
pub type RationalMatrix = exactla::Matrix<Q>;
pub type RationalDgLie = dgla::DgLie<Q>;
