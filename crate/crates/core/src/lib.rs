//! Exact computations in tautological rings of configuration spaces of a
//! genus-two curve.
//!
//! * [`linalg`]: sparse exact linear algebra (rank, kernel, echelon forms).
//! * [`algebra`]: graded quotient rings of polynomial rings, with normal
//!   forms, Hilbert functions, socle evaluation and pairing checks.
//! * [`xn`]: the ring of the `n`-fold product `X^n`.
//! * [`fm`]: the ring of the Fulton-MacPherson compactification `X[n]`.
//! * [`hodge`]: `psi`/`lambda` integrals on the moduli of curves.
//!
//! Everything is generic over an exact field implementing [`Scalar`]; the
//! aliases below fix it to the rationals.

pub mod algebra;
pub mod error;
pub mod fm;
pub mod hodge;
pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod subset;
pub mod xn;

pub use error::{Error, Result};
pub use poly::{Generator, Monomial, Poly};
pub use scalar::{Fp, Scalar};
pub use subset::Subset;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

/// The rationals.
pub type Rational = BigRational;
/// Polynomials over the rationals.
pub type QPoly = Poly<Rational>;
pub type QMatrix = linalg::SparseMatrix<Rational>;
pub type QPresentation = algebra::Presentation<Rational>;
pub type QRing = algebra::GradedRing<Rational>;

/// Integer to rational.
pub fn rat(v: i64) -> Rational {
    Rational::from_integer(v.into())
}
