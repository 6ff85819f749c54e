//! Finitely presented graded commutative algebras over an exact field.
//!
//! A [`Presentation`] lists degree-one generators, homogeneous relations and a
//! socle monomial. [`GradedRing`] computes each graded piece by plain linear
//! algebra on the span of relation-times-monomial products, then answers
//! normal-form, product, Hilbert-function and pairing queries from the cached
//! bases.

mod basis;
pub mod cache;
mod presentation;
mod ring;

pub use basis::{build_basis, monomial_count, GradedBasis, IndexMonomial, MonomialIndexer, DEFAULT_SIZE_CEILING};
pub use presentation::{Presentation, PRESENTATION_FORMAT_VERSION};
pub use ring::{CacheStats, DegreePairing, EngineConfig, GradedRing, PairingReport};
