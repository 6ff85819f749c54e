//! The tautological ring of the Fulton-MacPherson space `X[n]`.
//!
//! Generators are those of `X^n` plus one exceptional divisor `D_I` for every
//! `I` with `|I| >= 3`. This module builds the presentation, the standard
//! monomials with their forests and duals, the `p`-filtration, and the
//! block-by-block pairing check.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{GradedRing, Presentation, DEFAULT_SIZE_CEILING};
use crate::error::{Error, Result};
use crate::linalg::{self, SparseMatrix, SparseRow};
use crate::poly::build::{a, dd, diag, int, product, sum};
use crate::poly::{Generator, Monomial, Poly};
use crate::scalar::Scalar;
use crate::subset::Subset;
use crate::xn::{self, StandardMonomialXn};

/// The five relation families, in the order they enter the presentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Every relation of `X^n`.
    Product,
    /// `D_I D_J = 0` for overlapping, non-nested `I`, `J`.
    Overlap,
    /// `(d_jk + 2 a_j) D_I` and `(d_ij - d_ik) D_I`.
    Normal,
    /// Chern polynomial of a nested polydiagonal against its blocks.
    Chern,
    /// `prod_{j != i} (d_ij - sum_{J >= I} D_J)` for `i` in `I`.
    SelfIntersection,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Product,
        Family::Overlap,
        Family::Normal,
        Family::Chern,
        Family::SelfIntersection,
    ];
}

pub fn fm_generators(n: usize) -> Vec<Generator> {
    let mut gens: Vec<Generator> = (1..=n).map(Generator::a).collect();
    for i in 1..=n {
        for j in i + 1..=n {
            gens.push(Generator::b(i, j));
        }
    }
    gens.extend(Subset::divisor_sets(n).into_iter().map(Generator::d));
    gens
}

/// `sum_{J >= I} D_J` over divisor sets of `{1..n}`.
fn supersets_sum<S: Scalar>(n: usize, i: Subset) -> Poly<S> {
    sum(Subset::divisor_sets(n)
        .into_iter()
        .filter(|j| i.is_subset(*j))
        .map(dd))
}

/// The relations of one family.
pub fn fm_family<S: Scalar>(n: usize, family: Family) -> Vec<Poly<S>> {
    let divisors = Subset::divisor_sets(n);
    let mut rels = Vec::new();
    match family {
        Family::Product => rels = xn::xn_relations(n),
        Family::Overlap => {
            for (x, &i) in divisors.iter().enumerate() {
                for &j in &divisors[x + 1..] {
                    if !i.compatible(j) {
                        rels.push(&dd(i) * &dd(j));
                    }
                }
            }
        }
        Family::Normal => {
            for &set in &divisors {
                let d_i = dd::<S>(set);
                for j in set.iter() {
                    for k in set.iter().filter(|&k| k != j) {
                        let f = &diag::<S>(j, k) + &a(j).scale(&S::from_i64(2));
                        rels.push(&f * &d_i);
                    }
                }
                for i in (1..=n).filter(|&i| !set.contains(i)) {
                    for j in set.iter() {
                        for k in set.iter().filter(|&k| k > j) {
                            let f = &diag::<S>(i, j) - &diag::<S>(i, k);
                            rels.push(&f * &d_i);
                        }
                    }
                }
            }
        }
        Family::Chern => rels = chern_relations(n, &divisors),
        Family::SelfIntersection => {
            for &set in &divisors {
                let tail = supersets_sum::<S>(n, set);
                for i in set.iter() {
                    rels.push(product(
                        set.iter()
                            .filter(|&j| j != i)
                            .map(|j| &diag::<S>(i, j) - &tail),
                    ));
                }
            }
        }
    }
    rels
}

/// Family (4): for a polydiagonal `I_0`, disjoint blocks `I_1..I_k` inside it
/// (each of size at least three) leaving a nonempty remainder `R`, a base
/// point `p` in `R` and a representative `c_j` of each block,
/// `P(-sum_{J >= I_0} D_J) prod D_{I_j} = 0` with
/// `P(t) = prod_{i in R - p} (t + d_{p,i}) prod_j (t + d_{p,c_j})`.
fn chern_relations<S: Scalar>(n: usize, divisors: &[Subset]) -> Vec<Poly<S>> {
    let mut rels = Vec::new();
    for &i0 in divisors {
        let inside: Vec<Subset> = divisors
            .iter()
            .copied()
            .filter(|s| s.is_proper_subset(i0))
            .collect();
        let t = -supersets_sum::<S>(n, i0);
        for blocks in disjoint_families(&inside, i0) {
            let covered = blocks.iter().fold(Subset::EMPTY, |u, &b| u | b);
            let rest = i0 - covered;
            let blocks_product = product(blocks.iter().map(|&b| dd::<S>(b)));
            for p in rest.iter() {
                let base: Vec<Poly<S>> = rest
                    .iter()
                    .filter(|&i| i != p)
                    .map(|i| &t + &diag::<S>(p, i))
                    .collect();
                let reps: Vec<Vec<usize>> = blocks.iter().map(|b| b.to_vec()).collect();
                for choice in cartesian(&reps) {
                    let factors = base
                        .iter()
                        .cloned()
                        .chain(choice.iter().map(|&c| &t + &diag::<S>(p, c)));
                    rels.push(&product(factors) * &blocks_product);
                }
            }
        }
    }
    rels
}

/// Nonempty families of pairwise disjoint sets from `cands` whose union
/// misses at least one point of `within`.
fn disjoint_families(cands: &[Subset], within: Subset) -> Vec<Vec<Subset>> {
    fn rec(
        cands: &[Subset],
        start: usize,
        used: Subset,
        within: Subset,
        cur: &mut Vec<Subset>,
        out: &mut Vec<Vec<Subset>>,
    ) {
        if !cur.is_empty() && used != within {
            out.push(cur.clone());
        }
        for x in start..cands.len() {
            if cands[x].is_disjoint(used) {
                cur.push(cands[x]);
                rec(cands, x + 1, used | cands[x], within, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(cands, 0, Subset::EMPTY, within, &mut Vec::new(), &mut out);
    out
}

fn cartesian(lists: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for l in lists {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                l.iter().map(move |&x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

/// The presentation of `R*(X[n])`.
pub fn fm_presentation<S: Scalar>(n: usize) -> Result<Presentation<S>> {
    if n == 0 {
        return Err(Error::Invalid("X[n] needs n >= 1".into()));
    }
    let rels = Family::ALL
        .iter()
        .flat_map(|&f| fm_family::<S>(n, f))
        .collect();
    Presentation::new(
        format!("X[{n}]"),
        n,
        fm_generators(n),
        rels,
        Monomial::from_gens((1..=n).map(Generator::a)),
    )
}

/// The pull-back of `psi_i` from the moduli side:
/// `2 a_i + sum_{j != i} (d_ij - sum_{J >= {i,j}} D_J) + sum_{I containing i} D_I`.
pub fn psi_pullback<S: Scalar>(n: usize, i: usize) -> Result<Poly<S>> {
    if i == 0 || i > n {
        return Err(Error::Invalid(format!("psi index {i} outside 1..{n}")));
    }
    let mut out = a::<S>(i).scale(&S::from_i64(2));
    for j in (1..=n).filter(|&j| j != i) {
        let pair: Subset = [i, j].into_iter().collect();
        out = &out + &(&diag::<S>(i, j) - &supersets_sum::<S>(n, pair));
    }
    for set in Subset::divisor_sets(n).into_iter().filter(|s| s.contains(i)) {
        out = &out + &dd::<S>(set);
    }
    Ok(out)
}

/// The exceptional part `prod D_I^{i_I}` of a monomial, sorted ascending in
/// the divisor order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DPart(Vec<(Subset, u32)>);

impl DPart {
    pub fn new<I: IntoIterator<Item = (Subset, u32)>>(factors: I) -> Result<Self> {
        let mut map: BTreeMap<Subset, u32> = BTreeMap::new();
        for (s, e) in factors {
            if s.len() < 3 {
                return Err(Error::Invalid(format!("D_{s} needs at least three points")));
            }
            if e > 0 {
                *map.entry(s).or_default() += e;
            }
        }
        Ok(DPart(map.into_iter().collect()))
    }

    pub fn empty() -> Self {
        DPart(Vec::new())
    }

    pub fn factors(&self) -> &[(Subset, u32)] {
        &self.0
    }

    pub fn subsets(&self) -> Vec<Subset> {
        self.0.iter().map(|(s, _)| *s).collect()
    }

    pub fn exponent(&self, s: Subset) -> u32 {
        self.0
            .binary_search_by(|(t, _)| t.cmp(&s))
            .map(|k| self.0[k].1)
            .unwrap_or(0)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|(_, e)| *e as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn monomial(&self) -> Monomial {
        Monomial::from_gens(
            self.0
                .iter()
                .flat_map(|&(s, e)| std::iter::repeat_n(Generator::d(s), e as usize)),
        )
    }
}

impl std::fmt::Display for DPart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, (s, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "D{s}")?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Scan the subsets in increasing order; at the first one where the exponents
/// differ, the smaller exponent is the smaller D-part.
pub fn compare_dparts(d1: &DPart, d2: &DPart) -> Ordering {
    let keys: BTreeSet<Subset> = d1.subsets().into_iter().chain(d2.subsets()).collect();
    for s in keys {
        match d1.exponent(s).cmp(&d2.exponent(s)) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// The monomial order: D-parts first, then the `a`/`b` part.
pub fn compare_fm(v1: &StandardMonomialFM, v2: &StandardMonomialFM) -> Ordering {
    compare_dparts(&v1.d, &v2.d).then_with(|| v1.ab.cmp(&v2.ab))
}

/// `v1 << v2`: `v1 < D_I` for every factor `D_I` of `v2`.
pub fn much_less(v1: &StandardMonomialFM, v2: &StandardMonomialFM) -> bool {
    v2.d.subsets().into_iter().all(|s| {
        let single = StandardMonomialFM {
            ab: StandardMonomialXn::one(),
            d: DPart(vec![(s, 1)]),
        };
        compare_fm(v1, &single) == Ordering::Less
    })
}

/// The nesting forest of a laminar family of divisor sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Forest {
    vertices: Vec<Subset>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

/// Builds the forest of the distinct subsets of `sets`; rejects overlapping,
/// non-nested pairs.
pub fn forest_of(sets: &[Subset]) -> Result<Forest> {
    let mut vertices: Vec<Subset> = sets.to_vec();
    vertices.sort();
    vertices.dedup();
    for (x, &i) in vertices.iter().enumerate() {
        if i.len() < 3 {
            return Err(Error::Invalid(format!("D_{i} needs at least three points")));
        }
        if let Some(&j) = vertices[x + 1..].iter().find(|&&j| !i.compatible(j)) {
            return Err(Error::NotLaminar(i, j));
        }
    }
    let parent: Vec<Option<usize>> = vertices
        .iter()
        .map(|&v| {
            vertices
                .iter()
                .enumerate()
                .filter(|(_, &w)| v.is_proper_subset(w))
                .min_by_key(|(_, w)| w.len())
                .map(|(k, _)| k)
        })
        .collect();
    let mut children = vec![Vec::new(); vertices.len()];
    for (k, p) in parent.iter().enumerate() {
        if let Some(p) = p {
            children[*p].push(k);
        }
    }
    Ok(Forest {
        vertices,
        parent,
        children,
    })
}

impl Forest {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Vertex sets, ascending in the divisor order.
    pub fn vertices(&self) -> &[Subset] {
        &self.vertices
    }

    pub fn index_of(&self, s: Subset) -> Option<usize> {
        self.vertices.iter().position(|&v| v == s)
    }

    /// `(parent, child)` pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.map(|p| (p, c)))
            .collect()
    }

    pub fn parent(&self, r: usize) -> Option<usize> {
        self.parent[r]
    }

    pub fn children(&self, r: usize) -> &[usize] {
        &self.children[r]
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.len()).filter(|&r| self.parent[r].is_none()).collect()
    }

    pub fn is_root(&self, r: usize) -> bool {
        self.parent[r].is_none()
    }

    pub fn is_external(&self, r: usize) -> bool {
        self.children[r].is_empty()
    }

    pub fn degree(&self, r: usize) -> usize {
        self.children[r].len()
    }

    pub fn children_union(&self, r: usize) -> Subset {
        self.children[r]
            .iter()
            .fold(Subset::EMPTY, |u, &c| u | self.vertices[c])
    }

    pub fn union(&self) -> Subset {
        self.vertices.iter().fold(Subset::EMPTY, |u, &v| u | v)
    }

    /// `min(|I|-2, |I| - |union of children| + deg - 2)`; may be negative.
    pub fn exponent_bound(&self, r: usize) -> i64 {
        let size = self.vertices[r].len() as i64;
        let inner = size - self.children_union(r).len() as i64 + self.degree(r) as i64 - 2;
        inner.min(size - 2)
    }

    /// The minima of the roots together with the points outside every set.
    pub fn s_set(&self, n: usize) -> Subset {
        let mins: Subset = self
            .roots()
            .into_iter()
            .filter_map(|r| self.vertices[r].min())
            .collect();
        mins | (Subset::full(n) - self.union())
    }

    /// `|union of all sets| + sum of degrees`.
    pub fn sign_exponent(&self) -> usize {
        self.union().len() + self.edges().len()
    }
}

/// A standard monomial `a(v) b(v) D(v)` of `R*(X[n])`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StandardMonomialFM {
    ab: StandardMonomialXn,
    d: DPart,
}

#[derive(Serialize, Deserialize)]
struct FmWire {
    #[serde(rename = "A")]
    a: Subset,
    #[serde(rename = "B")]
    b: Vec<(usize, usize)>,
    #[serde(rename = "D")]
    d: Vec<(Subset, u32)>,
}

impl Serialize for StandardMonomialFM {
    fn serialize<Z: serde::Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        FmWire {
            a: self.ab.a_set(),
            b: self
                .ab
                .pairs()
                .iter()
                .map(|&(i, j)| (i as usize, j as usize))
                .collect(),
            d: self.d.0.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StandardMonomialFM {
    /// Parses the shape only; standardness is checked by [`check_standard`].
    fn deserialize<Z: serde::Deserializer<'de>>(de: Z) -> std::result::Result<Self, Z::Error> {
        use serde::de::Error as _;
        let w = FmWire::deserialize(de)?;
        let ab = StandardMonomialXn::new(w.a, w.b).map_err(Z::Error::custom)?;
        let d = DPart::new(w.d).map_err(Z::Error::custom)?;
        Ok(StandardMonomialFM { ab, d })
    }
}

impl StandardMonomialFM {
    pub fn ab(&self) -> &StandardMonomialXn {
        &self.ab
    }

    pub fn dpart(&self) -> &DPart {
        &self.d
    }

    pub fn degree(&self) -> usize {
        self.ab.degree() + self.d.degree()
    }

    pub fn forest(&self) -> Forest {
        forest_of(&self.d.subsets()).expect("standard monomials have laminar D-parts")
    }

    pub fn monomial(&self) -> Monomial {
        self.ab.monomial().mul(&self.d.monomial())
    }

    pub fn poly<S: Scalar>(&self) -> Poly<S> {
        Poly::monomial(self.monomial(), S::one())
    }
}

impl std::fmt::Display for StandardMonomialFM {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.monomial())
    }
}

/// Validates `a(v) b(v) D(v)` as a standard monomial on `{1..n}`.
pub fn check_standard(ab: StandardMonomialXn, d: DPart, n: usize) -> Result<StandardMonomialFM> {
    let forest = forest_of(&d.subsets())?;
    if (ab.support() | forest.union()).max().is_some_and(|m| m > n) {
        return Err(Error::Invalid(format!("indices exceed n = {n}")));
    }
    let s = forest.s_set(n);
    if !ab.support().is_subset(s) {
        return Err(Error::NotStandard(format!(
            "a/b support {} is not inside S = {}",
            ab.support(),
            s
        )));
    }
    for (r, &set) in forest.vertices().iter().enumerate() {
        let e = d.exponent(set) as i64;
        if e > forest.exponent_bound(r) {
            return Err(Error::NotStandard(format!(
                "exponent {e} of D{set} exceeds the bound {}",
                forest.exponent_bound(r)
            )));
        }
    }
    Ok(StandardMonomialFM { ab, d })
}

/// Splits a monomial into `a`, `b` and `D` parts and validates it.
pub fn parse_standard(m: &Monomial, n: usize) -> Result<StandardMonomialFM> {
    let mut abgens = Vec::new();
    let mut dfac = Vec::new();
    for g in m.factors() {
        match *g {
            Generator::D(s) => dfac.push((s, 1)),
            other => abgens.push(other),
        }
    }
    let ab = StandardMonomialXn::from_monomial(&Monomial::from_gens(abgens))?;
    check_standard(ab, DPart::new(dfac)?, n)
}

pub fn is_standard_fm(m: &Monomial, n: usize) -> bool {
    parse_standard(m, n).is_ok()
}

/// Laminar families of divisor sets of `{1..n}` with at most `max` members.
pub fn laminar_families(n: usize, max: usize) -> Vec<Vec<Subset>> {
    fn rec(
        cands: &[Subset],
        start: usize,
        max: usize,
        cur: &mut Vec<Subset>,
        out: &mut Vec<Vec<Subset>>,
    ) {
        out.push(cur.clone());
        if cur.len() == max {
            return;
        }
        for x in start..cands.len() {
            if cur.iter().all(|c| c.compatible(cands[x])) {
                cur.push(cands[x]);
                rec(cands, x + 1, max, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(&Subset::divisor_sets(n), 0, max, &mut Vec::new(), &mut out);
    out
}

/// Exponent vectors `1 <= e_r <= bound_r` with sum at most `cap`.
fn exponent_vectors(bounds: &[i64], cap: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    fn rec(bounds: &[i64], cap: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let k = cur.len();
        if k == bounds.len() {
            out.push(cur.clone());
            return;
        }
        let used: usize = cur.iter().map(|&e| e as usize).sum();
        let need_rest = bounds.len() - k - 1;
        for e in 1..=bounds[k].max(0) as usize {
            if used + e + need_rest > cap {
                break;
            }
            cur.push(e as u32);
            rec(bounds, cap, cur, out);
            cur.pop();
        }
    }
    if bounds.iter().all(|&b| b >= 1) {
        rec(bounds, cap, &mut Vec::new(), &mut out);
    }
    out
}

/// All standard monomials of degree `d`, sorted by [`compare_fm`].
pub fn enumerate_standard_fm(n: usize, d: usize) -> Result<Vec<StandardMonomialFM>> {
    enumerate_standard_fm_with(n, d, DEFAULT_SIZE_CEILING)
}

pub fn enumerate_standard_fm_with(n: usize, d: usize, ceiling: usize) -> Result<Vec<StandardMonomialFM>> {
    if n == 0 || n > crate::subset::MAX_POINTS {
        return Err(Error::Invalid(format!("n = {n} out of range")));
    }
    if d > n {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for family in laminar_families(n, d) {
        let forest = forest_of(&family)?;
        let bounds: Vec<i64> = (0..forest.len()).map(|r| forest.exponent_bound(r)).collect();
        let s = forest.s_set(n);
        for exps in exponent_vectors(&bounds, d) {
            let dd_deg: usize = exps.iter().map(|&e| e as usize).sum();
            let dpart = DPart(forest.vertices().iter().copied().zip(exps).collect());
            for ab in xn::enumerate_standard_on(s, d - dd_deg) {
                out.push(StandardMonomialFM {
                    ab,
                    d: dpart.clone(),
                });
                if out.len() > ceiling {
                    return Err(Error::SizeCeiling {
                        degree: d,
                        count: out.len() as u128,
                        ceiling,
                    });
                }
            }
        }
    }
    out.sort_by(compare_fm);
    Ok(out)
}

/// The dual standard monomial of complementary degree.
pub fn dual_fm(v: &StandardMonomialFM, n: usize) -> Result<StandardMonomialFM> {
    let v = check_standard(v.ab.clone(), v.d.clone(), n)?;
    let forest = v.forest();
    let s = forest.s_set(n);
    let ab = xn::dual_on(&v.ab, s);
    let d = DPart(
        forest
            .vertices()
            .iter()
            .enumerate()
            .map(|(r, &set)| {
                let i = v.d.exponent(set) as i64;
                let j = if forest.is_external(r) {
                    set.len() as i64 - 1 - i
                } else {
                    set.len() as i64 - forest.children_union(r).len() as i64
                        + forest.degree(r) as i64
                        - 1
                        - i
                };
                (set, j as u32)
            })
            .collect(),
    );
    Ok(StandardMonomialFM { ab, d })
}

/// `deg a(v) b(v) + sum over roots (|J| - 1)`.
pub fn filtration_p(v: &StandardMonomialFM) -> usize {
    let forest = v.forest();
    v.ab.degree()
        + forest
            .roots()
            .into_iter()
            .map(|r| forest.vertices()[r].len() - 1)
            .sum::<usize>()
}

/// One diagonal block of the pairing between standard monomials and duals.
#[derive(Clone, Debug, Serialize)]
pub struct BlockReport<S> {
    pub key: String,
    #[serde(skip)]
    pub dpart: DPart,
    pub degree: usize,
    pub s_set: Subset,
    pub epsilon: usize,
    /// Number of standard monomials in the block.
    pub size: usize,
    /// `dim R^{d - deg D}(X^S)`.
    pub xs_dimension: usize,
    pub rank: usize,
    pub verdict: bool,
    #[serde(skip)]
    pub members: Vec<StandardMonomialFM>,
    /// The `X^S`-side values `a(v_i) b(v_i) * a(v_j*) b(v_j*)`, unsigned.
    #[serde(skip)]
    pub xs_gram: Vec<Vec<S>>,
}

impl<S: Scalar> BlockReport<S> {
    pub fn signed_entry(&self, i: usize, j: usize) -> S {
        let x = self.xs_gram[i][j].clone();
        if self.epsilon.is_multiple_of(2) {
            x
        } else {
            -x
        }
    }
}

/// Groups standard monomials of degree `d` by D-part and checks each block's
/// `X^S`-side pairing has the rank of `R(X^S)` in that degree.
pub fn block_pairing<S: Scalar>(n: usize, d: usize) -> Result<Vec<BlockReport<S>>> {
    let std = enumerate_standard_fm(n, d)?;
    let mut groups: Vec<(DPart, Vec<StandardMonomialFM>)> = Vec::new();
    for v in std {
        match groups.last_mut() {
            Some((k, members)) if *k == v.d => members.push(v),
            _ => groups.push((v.d.clone(), vec![v])),
        }
    }
    groups
        .into_par_iter()
        .map(|(dpart, members)| block_report::<S>(n, d, dpart, members))
        .collect()
}

fn block_report<S: Scalar>(
    n: usize,
    d: usize,
    dpart: DPart,
    members: Vec<StandardMonomialFM>,
) -> Result<BlockReport<S>> {
    let forest = forest_of(&dpart.subsets())?;
    let s = forest.s_set(n);
    let duals: Vec<StandardMonomialFM> = members
        .iter()
        .map(|v| dual_fm(v, n))
        .collect::<Result<_>>()?;
    let mut xs_gram = Vec::with_capacity(members.len());
    let mut rows = Vec::with_capacity(members.len());
    for v in &members {
        let mut line = Vec::with_capacity(duals.len());
        for w in &duals {
            let q: Poly<S> = Poly::monomial(v.ab.monomial().mul(&w.ab.monomial()), S::one());
            line.push(xs_value(&q, s)?);
        }
        rows.push(SparseRow::from_entries(
            line.iter()
                .enumerate()
                .map(|(j, x)| (j as u32, x.clone()))
                .collect::<Vec<_>>(),
        ));
        xs_gram.push(line);
    }
    let rank = linalg::rank(&SparseMatrix::from_rows(duals.len(), rows));
    let ab_degree = d - dpart.degree();
    let xs_dimension = xs_dim::<S>(s.len(), ab_degree)?;
    Ok(BlockReport {
        key: dpart.to_string(),
        degree: d,
        s_set: s,
        epsilon: forest.sign_exponent(),
        size: members.len(),
        xs_dimension,
        rank,
        verdict: rank == xs_dimension,
        dpart,
        members,
        xs_gram,
    })
}

/// Socle value on `X^S` of a class of degree `|S|` supported in `S`.
fn xs_value<S: Scalar>(q: &Poly<S>, s: Subset) -> Result<S> {
    let points = s.to_vec();
    let mut map = vec![0usize; crate::subset::MAX_POINTS + 1];
    for (k, &p) in points.iter().enumerate() {
        map[p] = k + 1;
    }
    xn::xn_socle_value(&q.relabel(&map), points.len())
}

fn xs_dim<S: Scalar>(m: usize, k: usize) -> Result<usize> {
    if k > m {
        return Ok(0);
    }
    xn::standard_dimension::<S>(m, k)
}

/// Exhaustive comparison of the block predictions against a full engine.
#[derive(Clone, Debug, Default, Serialize)]
pub struct EngineCrossCheck {
    pub triangularity_pairs: usize,
    pub triangularity_failures: Vec<String>,
    pub sign_pairs: usize,
    pub sign_failures: Vec<String>,
    pub filtration_pairs: usize,
    pub filtration_failures: Vec<String>,
}

impl EngineCrossCheck {
    pub fn passed(&self) -> bool {
        self.triangularity_failures.is_empty()
            && self.sign_failures.is_empty()
            && self.filtration_failures.is_empty()
    }
}

/// Checks, against `ring` (the full presentation of `X[n]`):
/// triangularity `D(v1) < D(v2) => v1 v2* = 0`; the sign rule inside each
/// block; and `w << v, p(v) + deg w > n => v w = 0`.
pub fn engine_cross_check<S: Scalar>(ring: &GradedRing<S>) -> Result<EngineCrossCheck> {
    let n = ring.n();
    let mut report = EngineCrossCheck::default();
    let mut all = Vec::new();
    for d in 0..=n {
        let std = enumerate_standard_fm(n, d)?;
        let duals: Vec<StandardMonomialFM> =
            std.iter().map(|v| dual_fm(v, n)).collect::<Result<_>>()?;
        let rows: Vec<Poly<S>> = std.iter().map(|v| v.poly()).collect();
        let cols: Vec<Poly<S>> = duals.iter().map(|v| v.poly()).collect();
        let gram = ring.gram_matrix(d, &rows, &cols)?;
        let blocks: BTreeMap<String, BlockReport<S>> = block_pairing::<S>(n, d)?
            .into_iter()
            .map(|b| (b.key.clone(), b))
            .collect();
        for (i, v1) in std.iter().enumerate() {
            for (j, v2) in std.iter().enumerate() {
                let value = gram.get(i, j);
                match compare_dparts(&v1.d, &v2.d) {
                    Ordering::Less => {
                        report.triangularity_pairs += 1;
                        if !value.is_zero() {
                            report
                                .triangularity_failures
                                .push(format!("{v1} * ({})* = {value}", v2));
                        }
                    }
                    Ordering::Equal => {
                        report.sign_pairs += 1;
                        let b = &blocks[&v1.d.to_string()];
                        let bi = b.members.iter().position(|x| x == v1).expect("member");
                        let bj = b.members.iter().position(|x| x == v2).expect("member");
                        let predicted = b.signed_entry(bi, bj);
                        if predicted != value {
                            report.sign_failures.push(format!(
                                "{v1} * ({v2})*: engine {value}, block {predicted}"
                            ));
                        }
                    }
                    Ordering::Greater => {}
                }
            }
        }
        all.extend(std);
    }
    let above_top = ring.dimension(n + 1)?;
    for v in &all {
        let p = filtration_p(v);
        for w in &all {
            if !(much_less(w, v) && p + w.degree() > n) {
                continue;
            }
            report.filtration_pairs += 1;
            let total = v.degree() + w.degree();
            let vanishes = if total > n {
                above_top == 0
            } else {
                ring.multiply(&v.poly(), &w.poly())?.is_zero()
            };
            if !vanishes {
                report
                    .filtration_failures
                    .push(format!("p({v}) = {p}, {w} << {v}, product nonzero"));
            }
        }
    }
    Ok(report)
}

/// The whole block route for `X[n]`: every degree's blocks, the resulting
/// Hilbert function and its symmetry.
#[derive(Clone, Debug, Serialize)]
pub struct BlockCheck<S> {
    pub n: usize,
    pub blocks: Vec<BlockReport<S>>,
    pub hilbert: Vec<usize>,
    pub involution: bool,
    pub symmetric: bool,
    pub socle_dim: usize,
    /// True when the sign rule was not verified against a full engine here.
    pub conditional_on_sign_rule: bool,
}

impl<S> BlockCheck<S> {
    pub fn passed(&self) -> bool {
        self.blocks.iter().all(|b| b.verdict)
            && self.involution
            && self.symmetric
            && self.socle_dim == 1
    }
}

pub fn block_check<S: Scalar>(n: usize) -> Result<BlockCheck<S>> {
    let mut blocks = Vec::new();
    let mut hilbert = Vec::with_capacity(n + 1);
    let mut involution = true;
    for d in 0..=n {
        let bs = block_pairing::<S>(n, d)?;
        hilbert.push(bs.iter().map(|b| b.xs_dimension).sum());
        for b in &bs {
            for v in &b.members {
                let w = dual_fm(v, n)?;
                involution &= w.degree() == n - d && dual_fm(&w, n)? == *v;
            }
        }
        blocks.extend(bs);
    }
    let symmetric = (0..=n).all(|d| hilbert[d] == hilbert[n - d]);
    Ok(BlockCheck {
        n,
        socle_dim: hilbert[n],
        blocks,
        hilbert,
        involution,
        symmetric,
        conditional_on_sign_rule: n > 4,
    })
}

/// `prod_i psi_pullback(n, i)^{alphas[i]}`.
pub fn psi_monomial<S: Scalar>(n: usize, alphas: &[usize]) -> Result<Poly<S>> {
    if alphas.len() != n {
        return Err(Error::Invalid(format!(
            "expected {n} exponents, got {}",
            alphas.len()
        )));
    }
    let mut out = int::<S>(1);
    for (k, &e) in alphas.iter().enumerate() {
        out = &out * &psi_pullback::<S>(n, k + 1)?.pow(e);
    }
    Ok(out)
}
