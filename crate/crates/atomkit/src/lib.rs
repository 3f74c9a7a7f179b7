//! atomkit: finite atom structures of relation and cylindric algebras,
//! blur systems, basic-matrix bases, graph and vector-space structures,
//! and exhaustive bounded game deciders with replayable certificates.

pub mod basisblur;
pub mod cylalg;
pub mod error;
pub mod fincof;
pub mod games;
pub mod relalg;
pub mod structures;
pub mod textio;

pub use error::{Error, Result};

/// Exact scalar used by the rational vector-space structures.
pub type Rational = num_rational::BigRational;

/// Finite-support rational vector atom.
pub type RationalVecAtom = structures::vecatom::VecAtom<Rational>;
