//! Formal complexes of MOY graphs and the level-n Khovanov-Rozansky
//! polynomial of 2-strand braid links.
//!
//! The layers build on each other: [`laurent`] polynomials, the [`graphcat`]
//! object registry, [`morphism`] words with their rewrite rules, formal
//! [`complex`]es with Gaussian elimination, the [`simplify`] decomposition
//! engine and finally the [`invariant`] pipeline.

pub mod complex;
pub mod error;
pub mod graphcat;
pub mod invariant;
pub mod laurent;
pub mod morphism;
pub mod simplify;

pub use complex::{FormalComplex, ReducedComplex};
pub use error::{Error, LaurentError, Result};
pub use graphcat::{BoundarySeq, FormalSum, GradedVS, GraphName, GraphTerm, Orientation};
pub use invariant::{BraidSpec, InvariantResult};
pub use laurent::{quantum_int, LaurentPoly};
pub use morphism::{IsoKind, IsoLetter, Letter, MorphExpr, MorphMatrix, Site, Word};
pub use simplify::{CatalogReport, Trace, TraceEvent};
