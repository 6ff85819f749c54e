use std::collections::HashSet;

use serde_json::json;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::poly::{Generator, Monomial, Poly};
use crate::scalar::Scalar;

/// Version of the canonical presentation serialization.
pub const PRESENTATION_FORMAT_VERSION: u32 = 1;

/// A finitely presented graded commutative algebra with all generators in
/// degree one and a one-dimensional top degree spanned by `socle_monomial`.
#[derive(Clone, Debug)]
pub struct Presentation<S: Scalar> {
    name: String,
    n: usize,
    generators: Vec<Generator>,
    relations: Vec<Poly<S>>,
    socle_monomial: Monomial,
}

impl<S: Scalar> Presentation<S> {
    /// Validates and normalizes a presentation.
    ///
    /// Generators are sorted into engine order. Zero relations are dropped and
    /// relations equal up to a scalar are kept once.
    pub fn new(
        name: impl Into<String>,
        n: usize,
        generators: Vec<Generator>,
        relations: Vec<Poly<S>>,
        socle_monomial: Monomial,
    ) -> Result<Self> {
        let mut generators = generators;
        generators.sort_unstable();
        generators.dedup();
        let known: HashSet<Generator> = generators.iter().copied().collect();
        if let Some(g) = socle_monomial.factors().iter().find(|g| !known.contains(g)) {
            return Err(Error::UnknownGenerator(*g));
        }
        if socle_monomial.degree() != n {
            return Err(Error::DegreeMismatch {
                expected: n,
                found: socle_monomial.degree(),
            });
        }
        let mut seen: HashSet<Vec<(Monomial, String)>> = HashSet::new();
        let mut kept = Vec::new();
        for r in relations {
            if r.is_zero() {
                continue;
            }
            let Some(deg) = r.homogeneous_degree() else {
                return Err(Error::Invalid(format!("relation {r} is not homogeneous")));
            };
            if deg < 2 {
                return Err(Error::Invalid(format!("relation {r} has degree {deg} < 2")));
            }
            if let Some(g) = r.generators().into_iter().find(|g| !known.contains(g)) {
                return Err(Error::UnknownGenerator(g));
            }
            let mut coeffs: Vec<S> = r.terms().map(|(_, c)| c.clone()).collect();
            S::make_primitive(&mut coeffs);
            let key: Vec<(Monomial, String)> = r
                .terms()
                .map(|(m, _)| m.clone())
                .zip(coeffs.iter().map(|c| c.to_string()))
                .collect();
            if seen.insert(key) {
                kept.push(r);
            }
        }
        Ok(Presentation {
            name: name.into(),
            n,
            generators,
            relations: kept,
            socle_monomial,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of marked points; also the socle degree.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn socle_degree(&self) -> usize {
        self.n
    }

    pub fn socle_monomial(&self) -> &Monomial {
        &self.socle_monomial
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn relations(&self) -> &[Poly<S>] {
        &self.relations
    }

    /// Canonical JSON text; identical presentations give identical bytes.
    pub fn canonical_json(&self) -> String {
        let relations: Vec<Vec<(String, String)>> = self
            .relations
            .iter()
            .map(|r| r.terms().map(|(m, c)| (m.to_string(), c.to_string())).collect())
            .collect();
        json!({
            "format": "tautring-presentation",
            "version": PRESENTATION_FORMAT_VERSION,
            "field": S::TAG,
            "n": self.n,
            "generators": self.generators,
            "relations": relations,
            "socle_degree": self.n,
            "socle_monomial": self.socle_monomial.to_string(),
        })
        .to_string()
    }

    /// Hex SHA-256 of [`Presentation::canonical_json`].
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::build::*;
    use num_rational::BigRational;

    type P = Poly<BigRational>;

    fn toy(relations: Vec<P>) -> Result<Presentation<BigRational>> {
        Presentation::new(
            "toy",
            1,
            vec![Generator::a(1)],
            relations,
            Monomial::gen(Generator::a(1)),
        )
    }

    #[test]
    fn rejects_bad_relations() {
        assert!(toy(vec![a(1)]).is_err());
        assert!(toy(vec![&a(1).pow(2) + &a(1)]).is_err());
        assert!(matches!(
            toy(vec![&a(1) * &a(2)]),
            Err(Error::UnknownGenerator(_))
        ));
    }

    #[test]
    fn deduplicates_scalar_multiples() {
        let r = a(1).pow(2);
        let p = toy(vec![r.clone(), r.scale(&BigRational::from_integer((-3).into())), P::zero()])
            .unwrap();
        assert_eq!(p.relations().len(), 1);
    }

    #[test]
    fn hash_is_stable() {
        let p = toy(vec![a(1).pow(2)]).unwrap();
        let q = toy(vec![a(1).pow(2)]).unwrap();
        assert_eq!(p.content_hash(), q.content_hash());
        assert_eq!(p.content_hash().len(), 64);
    }
}
