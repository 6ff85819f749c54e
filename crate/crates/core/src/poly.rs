//! Generators, monomials and sparse polynomials with exact coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

use crate::scalar::Scalar;
use crate::subset::Subset;

/// A degree-one ring generator.
///
/// The derived order is the fixed generator order of the engine:
/// `A(1) < ... < A(n) < B(1,2) < B(1,3) < ... < D(I)`, divisors sorted by the
/// [`Subset`] order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    /// The point class `a_i`.
    A(u8),
    /// The primitive diagonal class `b_{i,j}`, always with `i < j`.
    B(u8, u8),
    /// The exceptional divisor `D_I`, `|I| >= 3`.
    D(Subset),
}

impl Generator {
    pub fn a(i: usize) -> Self {
        assert!(i >= 1, "point indices start at 1");
        Generator::A(i as u8)
    }

    /// `b_{i,j}` with the indices put in order.
    pub fn b(i: usize, j: usize) -> Self {
        assert!(i != j && i >= 1 && j >= 1, "b needs two distinct points");
        Generator::B(i.min(j) as u8, i.max(j) as u8)
    }

    pub fn d(set: Subset) -> Self {
        assert!(set.len() >= 3, "exceptional divisors need |I| >= 3");
        Generator::D(set)
    }

    /// Every point index the generator mentions.
    pub fn support(&self) -> Subset {
        match *self {
            Generator::A(i) => Subset::singleton(i as usize),
            Generator::B(i, j) => Subset::singleton(i as usize) | Subset::singleton(j as usize),
            Generator::D(s) => s,
        }
    }

    /// Applies a relabeling of points (`perm[i]` is the image of `i`, 1-based).
    pub fn relabel(&self, perm: &[usize]) -> Self {
        match *self {
            Generator::A(i) => Generator::a(perm[i as usize]),
            Generator::B(i, j) => Generator::b(perm[i as usize], perm[j as usize]),
            Generator::D(s) => Generator::D(s.iter().map(|i| perm[i]).collect()),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::A(i) => write!(f, "a{i}"),
            Generator::B(i, j) => write!(f, "b{i},{j}"),
            Generator::D(s) => write!(f, "D{s}"),
        }
    }
}

impl FromStr for Generator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("cannot parse generator {s:?}");
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('a') {
            let i: usize = rest.parse().map_err(|_| bad())?;
            if i == 0 {
                return Err(bad());
            }
            Ok(Generator::a(i))
        } else if let Some(rest) = s.strip_prefix('b') {
            let (i, j) = rest.split_once(',').ok_or_else(bad)?;
            let i: usize = i.parse().map_err(|_| bad())?;
            let j: usize = j.parse().map_err(|_| bad())?;
            if i == j || i == 0 || j == 0 {
                return Err(bad());
            }
            Ok(Generator::b(i, j))
        } else if let Some(rest) = s.strip_prefix('D') {
            let inner = rest
                .strip_prefix('{')
                .and_then(|r| r.strip_suffix('}'))
                .ok_or_else(bad)?;
            let mut set = Subset::EMPTY;
            for part in inner.split(',') {
                let i: usize = part.trim().parse().map_err(|_| bad())?;
                if i == 0 || i > crate::subset::MAX_POINTS {
                    return Err(bad());
                }
                set.insert(i);
            }
            if set.len() < 3 {
                return Err(bad());
            }
            Ok(Generator::D(set))
        } else {
            Err(bad())
        }
    }
}

impl Serialize for Generator {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Generator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A commutative monomial: a sorted multiset of generators.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(SmallVec<[Generator; 6]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn from_gens<I: IntoIterator<Item = Generator>>(gens: I) -> Self {
        let mut v: SmallVec<[Generator; 6]> = gens.into_iter().collect();
        v.sort_unstable();
        Monomial(v)
    }

    pub fn gen(g: Generator) -> Self {
        Monomial(smallvec::smallvec![g])
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Factors with multiplicity, in generator order.
    pub fn factors(&self) -> &[Generator] {
        &self.0
    }

    /// `(generator, exponent)` pairs, in generator order.
    pub fn exponents(&self) -> Vec<(Generator, usize)> {
        let mut out: Vec<(Generator, usize)> = Vec::new();
        for &g in &self.0 {
            match out.last_mut() {
                Some((h, e)) if *h == g => *e += 1,
                _ => out.push((g, 1)),
            }
        }
        out
    }

    pub fn exponent(&self, g: Generator) -> usize {
        self.0.iter().filter(|&&h| h == g).count()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut v = SmallVec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            if j >= other.0.len() || (i < self.0.len() && self.0[i] <= other.0[j]) {
                v.push(self.0[i]);
                i += 1;
            } else {
                v.push(other.0[j]);
                j += 1;
            }
        }
        Monomial(v)
    }

    pub fn relabel(&self, perm: &[usize]) -> Monomial {
        Monomial::from_gens(self.0.iter().map(|g| g.relabel(perm)))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, (g, e)) in self.exponents().into_iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if e == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A finite linear combination of monomials; never stores a zero coefficient.
#[derive(Clone, PartialEq)]
pub struct Poly<S> {
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> Default for Poly<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> Poly<S> {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::monomial(Monomial::one(), S::one())
    }

    pub fn constant(c: S) -> Self {
        Self::monomial(Monomial::one(), c)
    }

    pub fn monomial(m: Monomial, c: S) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn gen(g: Generator) -> Self {
        Self::monomial(Monomial::gen(g), S::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, S)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().clone() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &S)> + '_ {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, S)> {
        self.terms.into_iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    /// `Some(d)` if every term has degree `d`; the zero polynomial is
    /// homogeneous of every degree and reports `None`.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(Monomial::degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous_of(&self, d: usize) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Terms of degree exactly `d`.
    pub fn degree_part(&self, d: usize) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Drops every term of degree above `d`.
    pub fn truncate(&self, d: usize) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.mul(m), v.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Every generator mentioned by some term.
    pub fn generators(&self) -> Vec<Generator> {
        let mut v: Vec<Generator> = self
            .terms
            .keys()
            .flat_map(|m| m.factors().iter().copied())
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn relabel(&self, perm: &[usize]) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(m, c)| (m.relabel(perm), c.clone())),
        )
    }

    /// Applies a linear substitution monomial by monomial.
    pub fn map_monomials<F: FnMut(&Monomial) -> Poly<S>>(&self, mut f: F) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            for (k, v) in f(m).terms {
                out.add_term(k, v * c.clone());
            }
        }
        out
    }
}

impl<S: Scalar> fmt::Debug for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<S: Scalar> fmt::Display for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "({c})")?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "({c})*{m}")?;
            }
        }
        Ok(())
    }
}

impl<S: Scalar> Add for &Poly<S> {
    type Output = Poly<S>;
    fn add(self, rhs: &Poly<S>) -> Poly<S> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<S: Scalar> Sub for &Poly<S> {
    type Output = Poly<S>;
    fn sub(self, rhs: &Poly<S>) -> Poly<S> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<S: Scalar> Mul for &Poly<S> {
    type Output = Poly<S>;
    fn mul(self, rhs: &Poly<S>) -> Poly<S> {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<S: Scalar> Neg for &Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        self.scale(&-S::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl<S: Scalar> $tr for Poly<S> {
            type Output = Poly<S>;
            fn $method(self, rhs: Poly<S>) -> Poly<S> {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<S: Scalar> Neg for Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        -&self
    }
}

/// Shorthand constructors for the classes used throughout.
pub mod build {
    use super::*;

    pub fn int<S: Scalar>(v: i64) -> Poly<S> {
        Poly::constant(S::from_i64(v))
    }

    pub fn a<S: Scalar>(i: usize) -> Poly<S> {
        Poly::gen(Generator::a(i))
    }

    pub fn b<S: Scalar>(i: usize, j: usize) -> Poly<S> {
        Poly::gen(Generator::b(i, j))
    }

    pub fn dd<S: Scalar>(set: Subset) -> Poly<S> {
        Poly::gen(Generator::d(set))
    }

    /// The big diagonal `d_{j,k} = a_j + a_k + b_{j,k}`.
    pub fn diag<S: Scalar>(j: usize, k: usize) -> Poly<S> {
        &(&a(j) + &a(k)) + &b(j, k)
    }

    /// The canonical class `K_i = 2 a_i`.
    pub fn canonical<S: Scalar>(i: usize) -> Poly<S> {
        a(i).scale(&S::from_i64(2))
    }

    pub fn product<S: Scalar, I: IntoIterator<Item = Poly<S>>>(factors: I) -> Poly<S> {
        factors
            .into_iter()
            .fold(Poly::one(), |acc, f| &acc * &f)
    }

    pub fn sum<S: Scalar, I: IntoIterator<Item = Poly<S>>>(terms: I) -> Poly<S> {
        terms.into_iter().fold(Poly::zero(), |acc, t| &acc + &t)
    }
}

#[cfg(test)]
mod tests {
    use super::build::*;
    use super::*;
    use num_rational::BigRational;

    type P = Poly<BigRational>;

    #[test]
    fn generator_order_and_parsing() {
        let d = Generator::d(Subset::range(1, 3));
        assert!(Generator::a(5) < Generator::b(1, 2));
        assert!(Generator::b(1, 3) < Generator::b(2, 3));
        assert!(Generator::b(4, 5) < d);
        for g in [Generator::a(3), Generator::b(2, 7), d] {
            assert_eq!(g.to_string().parse::<Generator>().unwrap(), g);
        }
        assert!("D{1,2}".parse::<Generator>().is_err());
        assert!("b3,3".parse::<Generator>().is_err());
    }

    #[test]
    fn diagonal_square_expansion() {
        let d: P = diag(1, 2);
        let sq = d.pow(2);
        assert_eq!(sq.len(), 6);
        assert_eq!(sq.homogeneous_degree(), Some(2));
        assert_eq!(
            sq.coefficient(&Monomial::from_gens([Generator::a(1), Generator::a(2)])),
            BigRational::from_integer(2.into())
        );
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let p: P = &a(1) - &a(1);
        assert!(p.is_zero());
        assert_eq!(p.homogeneous_degree(), None);
    }
}
