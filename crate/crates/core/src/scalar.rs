//! Coefficient fields.
//!
//! Everything in the engine is generic over [`Scalar`], an exact field. The
//! production instance is [`BigRational`]; [`Fp`] is a word-sized prime field
//! used for fast rank cross-checks in tests.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// An exact field usable as the coefficient type of matrices and polynomials.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// Short tag written into serialized artifacts so caches never mix fields.
    const TAG: &'static str;

    fn from_i64(v: i64) -> Self;

    fn parse(s: &str) -> Option<Self>;

    /// Rescale a vector to a canonical representative of its line.
    ///
    /// The rescaling must be by a nonzero unit so the row space is unchanged.
    /// The default leaves the entries alone.
    fn make_primitive(_values: &mut [Self]) {}
}

impl Scalar for BigRational {
    const TAG: &'static str = "Q";

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn parse(s: &str) -> Option<Self> {
        BigRational::from_str(s.trim()).ok()
    }

    /// Clears denominators and divides out the content, leaving coprime
    /// integers with a positive first entry.
    fn make_primitive(values: &mut [Self]) {
        if values.is_empty() {
            return;
        }
        let mut lcm = BigInt::one();
        for v in values.iter() {
            if !v.denom().is_one() {
                lcm = lcm.lcm(v.denom());
            }
        }
        let mut gcd = BigInt::zero();
        for v in values.iter() {
            let n = v.numer() * (&lcm / v.denom());
            gcd = gcd.gcd(&n);
            if gcd.is_one() {
                break;
            }
        }
        if gcd.is_zero() {
            return;
        }
        if values[0].is_negative() {
            gcd = -gcd;
        }
        if lcm.is_one() && gcd.is_one() {
            return;
        }
        let scale = BigRational::new(lcm, gcd);
        for v in values.iter_mut() {
            *v = &*v * &scale;
        }
    }
}

/// Integers modulo a prime `P < 2^32`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Fp<const P: u64>(u64);

impl<const P: u64> Fp<P> {
    pub fn new(v: i64) -> Self {
        Fp(v.rem_euclid(P as i64) as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self.0;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % P;
            }
            base = base * base % P;
            e >>= 1;
        }
        Fp(acc)
    }

    pub fn inverse(self) -> Self {
        assert!(self.0 != 0, "inverse of zero in Fp");
        self.pow(P - 2)
    }
}

impl<const P: u64> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Zero for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u64> One for Fp<P> {
    fn one() -> Self {
        Fp(1)
    }
}

impl<const P: u64> Add for Fp<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Fp((self.0 + rhs.0) % P)
    }
}

impl<const P: u64> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Fp((self.0 + P - rhs.0) % P)
    }
}

impl<const P: u64> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Fp(self.0 * rhs.0 % P)
    }
}

impl<const P: u64> Div for Fp<P> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.inverse()
    }
}

impl<const P: u64> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Fp((P - self.0) % P)
    }
}

impl<const P: u64> Scalar for Fp<P> {
    const TAG: &'static str = "Fp";

    fn from_i64(v: i64) -> Self {
        Fp::new(v)
    }

    fn parse(s: &str) -> Option<Self> {
        s.trim().parse::<i64>().ok().map(Fp::new)
    }

    fn make_primitive(values: &mut [Self]) {
        if let Some(first) = values.first().copied() {
            if !first.is_zero() && first.0 != 1 {
                let inv = first.inverse();
                for v in values.iter_mut() {
                    *v = *v * inv;
                }
            }
        }
    }
}

/// `#[serde(serialize_with = "...")]` helper writing a value through `Display`.
pub fn serialize_display<T: fmt::Display, Z: serde::Serializer>(
    v: &T,
    s: Z,
) -> std::result::Result<Z::Ok, Z::Error> {
    s.collect_str(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    type F = Fp<1_000_000_007>;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn primitive_rational_rows() {
        let mut v = vec![q(-1, 2), q(3, 4), q(0, 1)];
        BigRational::make_primitive(&mut v);
        assert_eq!(v, vec![q(2, 1), q(-3, 1), q(0, 1)]);

        let mut w = vec![q(4, 1), q(8, 1)];
        BigRational::make_primitive(&mut w);
        assert_eq!(w, vec![q(1, 1), q(2, 1)]);
    }

    #[test]
    fn prime_field_inverse() {
        let a = F::new(-4);
        assert_eq!(a * a.inverse(), F::one());
        assert_eq!(F::new(-1) + F::new(1), F::zero());
    }

    #[test]
    fn parse_round_trip() {
        let x = q(-691, 2730);
        assert_eq!(BigRational::parse(&x.to_string()), Some(x));
        assert_eq!(F::parse("12"), Some(F::new(12)));
    }
}
