//! Invariants of small covers over products of polygons.
//!
//! A small cover over `P = P_{m_1} x ... x P_{m_n}` is given by a `2n x m`
//! characteristic matrix over GF(2). This crate decides validity,
//! orientability and factor-compatibility, computes rational and mod-2
//! Betti numbers, the Hodge diamond of the projective model of a
//! factor-compatible cover, and the block lower-triangular normal form
//! with its tower of surface fibrations.

pub mod betti;
pub mod charmap;
pub mod enumerate;
pub mod error;
pub mod gf2;
pub mod hodge;
pub mod instance;
pub mod obstruct;
pub mod polytope;
pub mod samples;
pub mod triangular;

pub use betti::GradedDims;
pub use charmap::{CharMatrix, Compatibility, CompatibilityCertificate, Refusal, Validity};
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector};
pub use hodge::{HodgeAnalysis, HodgePolynomial};
pub use instance::InstanceFile;
pub use polytope::PolygonProduct;
pub use triangular::TriangularForm;
