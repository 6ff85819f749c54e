//! Degree-wise quotient bases.
//!
//! The degree-`d` piece of the ideal is spanned by products `r * m` of a
//! relation `r` with a monomial `m` of degree `d - deg r`. Columns are the
//! degree-`d` monomials in increasing lexicographic order of their exponent
//! vectors, so monomials rich in late generators come first and are the ones
//! eliminated; the surviving (non-pivot) columns form the quotient basis.

use std::collections::HashMap;

use rayon::prelude::*;
use smallvec::SmallVec;

use super::presentation::Presentation;
use crate::error::{Error, Result};
use crate::linalg::{Echelon, SparseMatrix, SparseRow};
use crate::poly::{Generator, Monomial};
use crate::scalar::Scalar;

/// Default ceiling on enumerated monomials per degree.
pub const DEFAULT_SIZE_CEILING: usize = 5_000_000;

/// A monomial as a sorted list of generator indices.
pub type IndexMonomial = SmallVec<[u16; 8]>;

/// Number of monomials of degree `k` in `m` variables, saturating.
pub fn monomial_count(m: usize, k: usize) -> u128 {
    if m == 0 {
        return u128::from(k == 0);
    }
    // C(m + k - 1, k)
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc.saturating_mul(m as u128 + i) / (i + 1);
    }
    acc
}

/// Ranks and enumerates the monomials of one degree.
#[derive(Clone, Debug)]
pub struct MonomialIndexer {
    ngens: usize,
    degree: usize,
    // counts[m][k] = monomials of degree k in m variables
    counts: Vec<Vec<u64>>,
}

impl MonomialIndexer {
    pub fn new(ngens: usize, degree: usize) -> Self {
        let counts = (0..=ngens)
            .map(|m| {
                (0..=degree)
                    .map(|k| monomial_count(m, k).min(u64::MAX as u128) as u64)
                    .collect()
            })
            .collect();
        MonomialIndexer {
            ngens,
            degree,
            counts,
        }
    }

    pub fn len(&self) -> u64 {
        self.counts[self.ngens][self.degree]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Position of a sorted index monomial of this degree.
    pub fn rank(&self, mono: &[u16]) -> u64 {
        debug_assert_eq!(mono.len(), self.degree);
        let mut idx = 0u64;
        let mut remaining = self.degree;
        let mut pos = 0;
        for g in 0..self.ngens {
            if remaining == 0 {
                break;
            }
            let mut e = 0;
            while pos < mono.len() && mono[pos] as usize == g {
                e += 1;
                pos += 1;
            }
            let rest = self.ngens - g - 1;
            for j in 0..e {
                idx += self.counts[rest][remaining - j];
            }
            remaining -= e;
        }
        idx
    }

    /// All monomials of this degree, in rank order.
    pub fn enumerate(&self) -> Vec<IndexMonomial> {
        let mut out = Vec::with_capacity(self.len() as usize);
        let mut cur = IndexMonomial::new();
        fn rec(g: usize, ngens: usize, remaining: usize, cur: &mut IndexMonomial, out: &mut Vec<IndexMonomial>) {
            if remaining == 0 {
                out.push(cur.clone());
                return;
            }
            if g == ngens {
                return;
            }
            if g == ngens - 1 {
                let len = cur.len();
                cur.extend(std::iter::repeat_n(g as u16, remaining));
                out.push(cur.clone());
                cur.truncate(len);
                return;
            }
            // exponent of g ascending: 0 first
            for e in 0..=remaining {
                let len = cur.len();
                cur.extend(std::iter::repeat_n(g as u16, e));
                rec(g + 1, ngens, remaining - e, cur, out);
                cur.truncate(len);
            }
        }
        rec(0, self.ngens, self.degree, &mut cur, &mut out);
        out
    }
}

pub(crate) fn merge(a: &[u16], b: &[u16]) -> IndexMonomial {
    let mut v = IndexMonomial::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i] <= b[j]) {
            v.push(a[i]);
            i += 1;
        } else {
            v.push(b[j]);
            j += 1;
        }
    }
    v
}

/// Relations rewritten over generator indices.
#[derive(Clone, Debug)]
pub(crate) struct CompiledPresentation<S> {
    pub generators: Vec<Generator>,
    pub index: HashMap<Generator, u16>,
    /// `(degree, terms)`, simplest relations first.
    pub relations: Vec<(usize, Vec<(IndexMonomial, S)>)>,
}

impl<S: Scalar> CompiledPresentation<S> {
    pub fn new(p: &Presentation<S>) -> Self {
        let generators = p.generators().to_vec();
        let index: HashMap<Generator, u16> = generators
            .iter()
            .enumerate()
            .map(|(i, g)| (*g, i as u16))
            .collect();
        let mut relations: Vec<(usize, Vec<(IndexMonomial, S)>)> = p
            .relations()
            .iter()
            .map(|r| {
                let terms: Vec<(IndexMonomial, S)> = r
                    .terms()
                    .map(|(m, c)| (to_index(&index, m).expect("validated"), c.clone()))
                    .collect();
                (r.homogeneous_degree().expect("validated"), terms)
            })
            .collect();
        // stable: keeps presentation order among equally simple relations
        relations.sort_by_key(|(deg, terms)| (terms.len(), *deg));
        CompiledPresentation {
            generators,
            index,
            relations,
        }
    }

    pub fn to_index(&self, m: &Monomial) -> Result<IndexMonomial> {
        to_index(&self.index, m)
    }

    pub fn to_monomial(&self, m: &[u16]) -> Monomial {
        Monomial::from_gens(m.iter().map(|&i| self.generators[i as usize]))
    }
}

fn to_index(index: &HashMap<Generator, u16>, m: &Monomial) -> Result<IndexMonomial> {
    let mut v: IndexMonomial = m
        .factors()
        .iter()
        .map(|g| index.get(g).copied().ok_or(Error::UnknownGenerator(*g)))
        .collect::<Result<_>>()?;
    v.sort_unstable();
    Ok(v)
}

/// The degree-`d` piece of a presented algebra.
#[derive(Clone, Debug)]
pub struct GradedBasis<S> {
    pub(crate) degree: usize,
    pub(crate) ngens: usize,
    pub(crate) monomial_count: u64,
    pub(crate) rank: usize,
    /// Columns (monomial ranks) of the basis monomials, increasing.
    pub(crate) quotient_basis: Vec<u32>,
    pub(crate) position: HashMap<u32, u32>,
    /// Nonzero normal forms of pivot columns, over quotient positions.
    pub(crate) normal_forms: HashMap<u32, Vec<(u32, S)>>,
}

impl<S: Scalar> GradedBasis<S> {
    pub(crate) fn from_parts(
        degree: usize,
        ngens: usize,
        monomial_count: u64,
        quotient_basis: Vec<u32>,
        normal_forms: HashMap<u32, Vec<(u32, S)>>,
    ) -> Self {
        let position = quotient_basis
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i as u32))
            .collect();
        GradedBasis {
            degree,
            ngens,
            monomial_count,
            rank: monomial_count as usize - quotient_basis.len(),
            quotient_basis,
            position,
            normal_forms,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dimension(&self) -> usize {
        self.quotient_basis.len()
    }

    pub fn monomial_count(&self) -> u64 {
        self.monomial_count
    }

    /// Rank of the degree-`d` relation span.
    pub fn relation_rank(&self) -> usize {
        self.rank
    }

    /// Monomial ranks of the quotient basis (the non-pivot columns).
    pub fn quotient_columns(&self) -> &[u32] {
        &self.quotient_basis
    }

    /// Coordinates of one monomial column in the quotient basis.
    pub fn column_coordinates(&self, col: u32) -> Vec<(u32, S)> {
        if let Some(&p) = self.position.get(&col) {
            vec![(p, S::one())]
        } else {
            self.normal_forms.get(&col).cloned().unwrap_or_default()
        }
    }

    /// All degree-`d` monomials as index lists, in column order.
    pub fn monomial_list(&self) -> Vec<IndexMonomial> {
        MonomialIndexer::new(self.ngens, self.degree).enumerate()
    }

    /// The reduced echelon form of the relation span: one row
    /// `e_pivot - normal_form(pivot)` per pivot column.
    pub fn relation_echelon(&self) -> SparseMatrix<S> {
        let ncols = self.monomial_count as usize;
        let rows = (0..ncols as u32)
            .filter(|c| !self.position.contains_key(c))
            .map(|c| {
                let mut entries = vec![(c, S::one())];
                if let Some(nf) = self.normal_forms.get(&c) {
                    entries.extend(
                        nf.iter()
                            .map(|(p, v)| (self.quotient_basis[*p as usize], -v.clone())),
                    );
                }
                SparseRow::from_entries(entries)
            })
            .collect();
        SparseMatrix::from_rows(ncols, rows)
    }
}

/// Computes the degree-`d` quotient of `p` from scratch.
pub fn build_basis<S: Scalar>(
    p: &Presentation<S>,
    d: usize,
    size_ceiling: usize,
) -> Result<GradedBasis<S>> {
    build_compiled(&CompiledPresentation::new(p), d, size_ceiling)
}

pub(crate) fn build_compiled<S: Scalar>(
    cp: &CompiledPresentation<S>,
    d: usize,
    size_ceiling: usize,
) -> Result<GradedBasis<S>> {
    let ngens = cp.generators.len();
    let count = monomial_count(ngens, d);
    if count > size_ceiling as u128 || count > u32::MAX as u128 {
        return Err(Error::SizeCeiling {
            degree: d,
            count,
            ceiling: size_ceiling,
        });
    }
    let ncols = count as usize;
    let indexer = MonomialIndexer::new(ngens, d);
    let mut ech: Echelon<S> = Echelon::new(ncols);
    let mut multipliers: HashMap<usize, Vec<IndexMonomial>> = HashMap::new();

    'relations: for (deg, terms) in &cp.relations {
        if *deg > d {
            continue;
        }
        let k = d - deg;
        let mults = multipliers
            .entry(k)
            .or_insert_with(|| MonomialIndexer::new(ngens, k).enumerate());
        for chunk in mults.chunks(4096) {
            let rows: Vec<SparseRow<S>> = chunk
                .par_iter()
                .map(|m| {
                    SparseRow::from_entries(terms.iter().map(|(t, c)| {
                        (indexer.rank(&merge(t, m)) as u32, c.clone())
                    }))
                })
                .collect();
            for row in rows {
                ech.insert(row);
            }
            if ech.rank() == ncols {
                break 'relations;
            }
        }
    }

    let reduced = ech.into_reduced();
    let quotient_basis: Vec<u32> = reduced.free_cols().collect();
    let position: HashMap<u32, u32> = quotient_basis
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i as u32))
        .collect();
    let mut normal_forms = HashMap::new();
    for (c, row) in reduced.into_rows().into_iter().enumerate() {
        let Some(row) = row else { continue };
        if row.len() > 1 {
            let nf: Vec<(u32, S)> = row
                .iter()
                .skip(1)
                .map(|(k, v)| (position[&k], -v.clone()))
                .collect();
            normal_forms.insert(c as u32, nf);
        }
    }
    Ok(GradedBasis::from_parts(
        d,
        ngens,
        count as u64,
        quotient_basis,
        normal_forms,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(monomial_count(3, 2), 6);
        assert_eq!(monomial_count(6, 2), 21);
        assert_eq!(monomial_count(0, 0), 1);
        assert_eq!(monomial_count(0, 3), 0);
        assert_eq!(monomial_count(5, 0), 1);
    }

    #[test]
    fn rank_matches_enumeration_order() {
        for (m, k) in [(1, 3), (3, 2), (4, 3), (6, 4)] {
            let ix = MonomialIndexer::new(m, k);
            let all = ix.enumerate();
            assert_eq!(all.len() as u64, ix.len());
            for (i, mono) in all.iter().enumerate() {
                assert_eq!(ix.rank(mono), i as u64);
            }
        }
    }

    #[test]
    fn enumeration_is_ascending_lex_in_exponents() {
        // generators (g0, g1, g2): g2^2 comes before g0*g1
        let all = MonomialIndexer::new(3, 2).enumerate();
        assert_eq!(all[0].as_slice(), &[2, 2]);
        assert_eq!(all.last().unwrap().as_slice(), &[0, 0]);
    }
}
