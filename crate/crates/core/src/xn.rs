//! The tautological ring of `X^n` for a genus-two curve `X`.
//!
//! Generators are the point classes `a_i` and the primitive diagonal classes
//! `b_{j,k} = d_{j,k} - a_j - a_k`. The quadratic rules
//!
//! ```text
//! a_i^2 = 0,  a_i b_{i,j} = 0,  b_{i,j}^2 = -4 a_i a_j,  b_{i,j} b_{i,k} = a_i b_{j,k}
//! ```
//!
//! rewrite any monomial to a multiple of a standard one (disjoint `a`-support
//! and `b`-matching); the cubic six-point relations are the only further
//! relations.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::algebra::Presentation;
use crate::error::{Error, Result};
use crate::linalg::{self, SparseMatrix, SparseRow};
use crate::poly::build::{a, b, canonical, diag, int, product, sum};
use crate::poly::{Generator, Monomial, Poly};
use crate::scalar::Scalar;
use crate::subset::Subset;

/// Largest `m` accepted by [`matching_gram`].
pub const MATCHING_GRAM_MAX_M: usize = 5;

/// The presentation of `R*(X^n)`: five relation families, socle `a_1...a_n`.
pub fn xn_presentation<S: Scalar>(n: usize) -> Result<Presentation<S>> {
    if n == 0 {
        return Err(Error::Invalid("X^n needs n >= 1".into()));
    }
    let mut gens: Vec<Generator> = (1..=n).map(Generator::a).collect();
    for i in 1..=n {
        for j in i + 1..=n {
            gens.push(Generator::b(i, j));
        }
    }
    Presentation::new(
        format!("X^{n}"),
        n,
        gens,
        xn_relations(n),
        Monomial::from_gens((1..=n).map(Generator::a)),
    )
}

/// Every relation of `R*(X^n)`, family by family.
pub fn xn_relations<S: Scalar>(n: usize) -> Vec<Poly<S>> {
    let mut rels = Vec::new();
    for i in 1..=n {
        rels.push(a(i).pow(2));
    }
    for i in 1..=n {
        for j in (1..=n).filter(|&j| j != i) {
            rels.push(&a(i) * &b(i, j));
        }
    }
    for i in 1..=n {
        for j in i + 1..=n {
            rels.push(&b(i, j).pow(2) + &(&a(i) * &a(j)).scale(&S::from_i64(4)));
        }
    }
    for i in 1..=n {
        let others: Vec<usize> = (1..=n).filter(|&j| j != i).collect();
        for (x, &j) in others.iter().enumerate() {
            for &k in &others[x + 1..] {
                rels.push(&(&b(i, j) * &b(i, k)) - &(&a(i) * &b(j, k)));
            }
        }
    }
    for set in Subset::of_size(n, 6) {
        rels.push(six_point_polynomial(set));
    }
    rels
}

/// A perfect matching of an even set of points, stored as sorted pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Matching {
    pairs: Vec<(u8, u8)>,
}

impl Matching {
    /// Validates that `pairs` is a perfect matching of its support.
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = Subset::EMPTY;
        let mut out = Vec::with_capacity(pairs.len());
        for (i, j) in pairs {
            if i == j || seen.contains(i) || seen.contains(j) {
                return Err(Error::Invalid("pairs of a matching must be disjoint".into()));
            }
            seen.insert(i);
            seen.insert(j);
            out.push((i.min(j) as u8, i.max(j) as u8));
        }
        out.sort_unstable();
        Ok(Matching { pairs: out })
    }

    pub fn pairs(&self) -> &[(u8, u8)] {
        &self.pairs
    }

    pub fn support(&self) -> Subset {
        self.pairs
            .iter()
            .flat_map(|&(i, j)| [i as usize, j as usize])
            .collect()
    }

    pub fn monomial(&self) -> Monomial {
        Monomial::from_gens(
            self.pairs
                .iter()
                .map(|&(i, j)| Generator::b(i as usize, j as usize)),
        )
    }
}

/// All perfect matchings of `points` (which must have even size), in
/// lexicographic order.
pub fn perfect_matchings(points: Subset) -> Vec<Matching> {
    fn rec(rest: Subset, cur: &mut Vec<(u8, u8)>, out: &mut Vec<Matching>) {
        let Some(first) = rest.min() else {
            out.push(Matching { pairs: cur.clone() });
            return;
        };
        let mut others = rest;
        others.remove(first);
        for partner in others.iter() {
            cur.push((first as u8, partner as u8));
            let mut next = others;
            next.remove(partner);
            rec(next, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if points.len().is_multiple_of(2) {
        rec(points, &mut Vec::new(), &mut out);
    }
    out
}

/// The 15-term relation `sum b b b` over the pair-partitions of a 6-set.
pub fn six_point_polynomial<S: Scalar>(set: Subset) -> Poly<S> {
    assert_eq!(set.len(), 6, "six-point relations live on 6-element sets");
    Poly::from_terms(
        perfect_matchings(set)
            .into_iter()
            .map(|m| (m.monomial(), S::one())),
    )
}

/// A standard monomial `a(v) b(v)` of `R*(X^n)`: an `a`-support disjoint
/// from the support of a matching.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StandardMonomialXn {
    #[serde(rename = "A")]
    a: Subset,
    #[serde(rename = "B")]
    b: Vec<(u8, u8)>,
}

impl StandardMonomialXn {
    pub fn new(a: Subset, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let m = Matching::new(pairs)?;
        if !m.support().is_disjoint(a) {
            return Err(Error::NotStandard(
                "a-support meets the b-support".into(),
            ));
        }
        Ok(StandardMonomialXn { a, b: m.pairs })
    }

    pub fn one() -> Self {
        StandardMonomialXn {
            a: Subset::EMPTY,
            b: Vec::new(),
        }
    }

    pub fn a_set(&self) -> Subset {
        self.a
    }

    pub fn pairs(&self) -> &[(u8, u8)] {
        &self.b
    }

    pub fn b_support(&self) -> Subset {
        self.b
            .iter()
            .flat_map(|&(i, j)| [i as usize, j as usize])
            .collect()
    }

    pub fn support(&self) -> Subset {
        self.a | self.b_support()
    }

    pub fn degree(&self) -> usize {
        self.a.len() + self.b.len()
    }

    pub fn monomial(&self) -> Monomial {
        Monomial::from_gens(
            self.a.iter().map(Generator::a).chain(
                self.b
                    .iter()
                    .map(|&(i, j)| Generator::b(i as usize, j as usize)),
            ),
        )
    }

    /// Recognizes a monomial that already has standard shape.
    pub fn from_monomial(m: &Monomial) -> Result<Self> {
        let mut a_set = Subset::EMPTY;
        let mut pairs = Vec::new();
        for g in m.factors() {
            match *g {
                Generator::A(i) => {
                    if a_set.contains(i as usize) {
                        return Err(Error::NotStandard(m.to_string()));
                    }
                    a_set.insert(i as usize);
                }
                Generator::B(i, j) => pairs.push((i as usize, j as usize)),
                Generator::D(_) => return Err(Error::NotStandard(m.to_string())),
            }
        }
        Self::new(a_set, pairs).map_err(|_| Error::NotStandard(m.to_string()))
    }

    /// Relabels points through `map` (`map[i]` is the new label of `i`).
    pub fn relabel(&self, map: &[usize]) -> Self {
        let a_set = self.a.iter().map(|i| map[i]).collect();
        let pairs = self
            .b
            .iter()
            .map(|&(i, j)| (map[i as usize], map[j as usize]))
            .collect();
        Self::new(a_set, pairs).expect("relabeling preserves standardness")
    }
}

impl Ord for StandardMonomialXn {
    /// Lexicographic on the sorted `a`-support, then on the sorted pairs.
    fn cmp(&self, other: &Self) -> Ordering {
        self.a
            .to_vec()
            .cmp(&other.a.to_vec())
            .then_with(|| self.b.cmp(&other.b))
    }
}

impl PartialOrd for StandardMonomialXn {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All standard monomials of degree `d` on the point set `{1..n}`.
pub fn enumerate_standard_xn(n: usize, d: usize) -> Vec<StandardMonomialXn> {
    enumerate_standard_on(Subset::full(n), d)
}

/// All standard monomials of degree `d` supported on `points`, sorted.
pub fn enumerate_standard_on(points: Subset, d: usize) -> Vec<StandardMonomialXn> {
    let elems = points.to_vec();
    let mut out = Vec::new();
    for na in 0..=d.min(elems.len()) {
        let npairs = d - na;
        if na + 2 * npairs > elems.len() {
            continue;
        }
        for amask in Subset::of_size(elems.len(), na) {
            let a_set: Subset = amask.iter().map(|k| elems[k - 1]).collect();
            let rest = points - a_set;
            for bsupp_mask in Subset::of_size(rest.len(), 2 * npairs) {
                let rest_elems = rest.to_vec();
                let bsupp: Subset = bsupp_mask.iter().map(|k| rest_elems[k - 1]).collect();
                for m in perfect_matchings(bsupp) {
                    out.push(StandardMonomialXn { a: a_set, b: m.pairs });
                }
            }
        }
    }
    out.sort();
    out
}

/// `v*`: the `a`'s on the points `v` does not touch, times `b(v)`.
pub fn dual_xn(v: &StandardMonomialXn, n: usize) -> StandardMonomialXn {
    dual_on(v, Subset::full(n))
}

/// The dual relative to an arbitrary point set containing the support of `v`.
pub fn dual_on(v: &StandardMonomialXn, points: Subset) -> StandardMonomialXn {
    debug_assert!(v.support().is_subset(points));
    StandardMonomialXn {
        a: points - v.support(),
        b: v.b.clone(),
    }
}

/// Which rules the rewriting may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleSet {
    /// All four quadratic families.
    Full,
    /// Only `a_i^2 = 0`, `a_i b_{i,j} = 0` and `b_{i,j}^2 = -4 a_i a_j`.
    Elementary,
}

/// One applicable rewriting step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Redex {
    SquareA(u8),
    AnnihilateAB(u8, (u8, u8)),
    SquareB((u8, u8)),
    SharedIndex((u8, u8), (u8, u8), u8),
}

struct RewriteState {
    a_counts: HashMap<u8, u8>,
    edges: Vec<(u8, u8)>,
    others: Vec<Generator>,
    neg4: u32,
}

impl RewriteState {
    fn new(m: &Monomial) -> Self {
        let mut st = RewriteState {
            a_counts: HashMap::new(),
            edges: Vec::new(),
            others: Vec::new(),
            neg4: 0,
        };
        for g in m.factors() {
            match *g {
                Generator::A(i) => *st.a_counts.entry(i).or_default() += 1,
                Generator::B(i, j) => st.edges.push((i, j)),
                Generator::D(_) => st.others.push(*g),
            }
        }
        st.edges.sort_unstable();
        st
    }

    fn redexes(&self, rules: RuleSet) -> Vec<Redex> {
        let mut out = Vec::new();
        let mut a_sorted: Vec<(u8, u8)> = self.a_counts.iter().map(|(&i, &c)| (i, c)).collect();
        a_sorted.sort_unstable();
        for &(i, c) in &a_sorted {
            if c >= 2 {
                out.push(Redex::SquareA(i));
            }
            for &e in &self.edges {
                if c >= 1 && (e.0 == i || e.1 == i) {
                    out.push(Redex::AnnihilateAB(i, e));
                }
            }
        }
        for w in self.edges.windows(2) {
            if w[0] == w[1] && !out.contains(&Redex::SquareB(w[0])) {
                out.push(Redex::SquareB(w[0]));
            }
        }
        if rules == RuleSet::Full {
            for (x, &e) in self.edges.iter().enumerate() {
                for &f in &self.edges[x + 1..] {
                    if e == f {
                        continue;
                    }
                    let shared = [e.0, e.1].into_iter().find(|&p| p == f.0 || p == f.1);
                    if let Some(p) = shared {
                        let r = Redex::SharedIndex(e, f, p);
                        if !out.contains(&r) {
                            out.push(r);
                        }
                    }
                }
            }
        }
        out
    }

    fn remove_edge(&mut self, e: (u8, u8)) {
        let pos = self.edges.iter().position(|&x| x == e).expect("edge present");
        self.edges.remove(pos);
    }

    /// Applies a step; false means the monomial became zero.
    fn apply(&mut self, r: Redex) -> bool {
        match r {
            Redex::SquareA(_) | Redex::AnnihilateAB(..) => false,
            Redex::SquareB(e) => {
                self.remove_edge(e);
                self.remove_edge(e);
                *self.a_counts.entry(e.0).or_default() += 1;
                *self.a_counts.entry(e.1).or_default() += 1;
                self.neg4 += 1;
                true
            }
            Redex::SharedIndex(e, f, p) => {
                self.remove_edge(e);
                self.remove_edge(f);
                let x = if e.0 == p { e.1 } else { e.0 };
                let y = if f.0 == p { f.1 } else { f.0 };
                *self.a_counts.entry(p).or_default() += 1;
                self.edges.push((x.min(y), x.max(y)));
                self.edges.sort_unstable();
                true
            }
        }
    }

    fn finish(self) -> (u32, Monomial) {
        let gens = self
            .a_counts
            .into_iter()
            .flat_map(|(i, c)| std::iter::repeat_n(Generator::A(i), c as usize))
            .chain(self.edges.into_iter().map(|(i, j)| Generator::B(i, j)))
            .chain(self.others);
        (self.neg4, Monomial::from_gens(gens))
    }
}

/// Rewrites one monomial, letting `choose` pick among the applicable steps.
///
/// Returns `None` for zero, else `(k, m)` meaning `(-4)^k m`. Generators other
/// than `a` and `b` ride along untouched.
pub fn rewrite_monomial<F>(m: &Monomial, rules: RuleSet, mut choose: F) -> Option<(u32, Monomial)>
where
    F: FnMut(&[Redex]) -> usize,
{
    let mut st = RewriteState::new(m);
    loop {
        let redexes = st.redexes(rules);
        if redexes.is_empty() {
            return Some(st.finish());
        }
        let pick = choose(&redexes).min(redexes.len() - 1);
        if !st.apply(redexes[pick]) {
            return None;
        }
    }
}

fn rewrite_poly<S: Scalar, F>(q: &Poly<S>, rules: RuleSet, mut choose: F) -> Poly<S>
where
    F: FnMut(&[Redex]) -> usize,
{
    let neg4 = S::from_i64(-4);
    let mut out = Poly::zero();
    for (m, c) in q.terms() {
        if let Some((k, std)) = rewrite_monomial(m, rules, &mut choose) {
            let mut coef = c.clone();
            for _ in 0..k {
                coef = coef * neg4.clone();
            }
            out.add_term(std, coef);
        }
    }
    out
}

/// Exhaustive quadratic rewriting to a combination of standard monomials.
/// The six-point relations are not applied.
pub fn quadratic_normal_form<S: Scalar>(q: &Poly<S>) -> Poly<S> {
    rewrite_poly(q, RuleSet::Full, |_| 0)
}

/// Quadratic rewriting with a caller-chosen reduction order.
pub fn quadratic_normal_form_with<S: Scalar, F>(q: &Poly<S>, choose: F) -> Poly<S>
where
    F: FnMut(&[Redex]) -> usize,
{
    rewrite_poly(q, RuleSet::Full, choose)
}

/// Rewriting with only the three elementary families.
pub fn elementary_reduce<S: Scalar>(q: &Poly<S>) -> Poly<S> {
    rewrite_poly(q, RuleSet::Elementary, |_| 0)
}

/// Coefficient of `a_1...a_n` after quadratic rewriting of a degree-`n` class.
///
/// In top degree the only standard monomial is `a_1...a_n`, so this is the
/// socle evaluation on `X^n`.
pub fn xn_socle_value<S: Scalar>(q: &Poly<S>, n: usize) -> Result<S> {
    if !q.is_homogeneous_of(n) {
        return Err(Error::NotHomogeneous { expected: n });
    }
    let nf = quadratic_normal_form(q);
    let top = Monomial::from_gens((1..=n).map(Generator::a));
    if let Some((m, _)) = nf.terms().find(|(m, _)| **m != top) {
        return Err(Error::Invalid(format!(
            "{m} survives in top degree; input is not a class on X^{n}"
        )));
    }
    Ok(nf.coefficient(&top))
}

/// Coordinates of a standard combination over an indexed standard list.
fn coordinates<S: Scalar>(
    q: &Poly<S>,
    index: &HashMap<Monomial, usize>,
) -> Result<Vec<(usize, S)>> {
    q.terms()
        .map(|(m, c)| {
            index
                .get(m)
                .map(|&i| (i, c.clone()))
                .ok_or_else(|| Error::NotStandard(m.to_string()))
        })
        .collect()
}

/// The pairing matrix of pure-`b` monomials on `{1..2m}`.
#[derive(Clone, Debug)]
pub struct MatchingGram<S> {
    pub matchings: Vec<Matching>,
    pub matrix: SparseMatrix<S>,
}

/// `entry(m1, m2) = socle value on X^{2m} of m1 * m2`, over all matchings.
pub fn matching_gram<S: Scalar>(m: usize) -> Result<MatchingGram<S>> {
    if m == 0 {
        return Err(Error::Invalid("matching_gram needs m >= 1".into()));
    }
    if m > MATCHING_GRAM_MAX_M {
        return Err(Error::SizeCeiling {
            degree: m,
            count: perfect_matchings(Subset::full(2 * m)).len() as u128,
            ceiling: MATCHING_GRAM_MAX_M,
        });
    }
    use rayon::prelude::*;
    let matchings = perfect_matchings(Subset::full(2 * m));
    let monos: Vec<Poly<S>> = matchings
        .iter()
        .map(|x| Poly::monomial(x.monomial(), S::one()))
        .collect();
    let rows: Vec<SparseRow<S>> = monos
        .par_iter()
        .map(|u| {
            let entries: Vec<(u32, S)> = monos
                .iter()
                .enumerate()
                .map(|(j, v)| Ok((j as u32, xn_socle_value(&(u * v), 2 * m)?)))
                .collect::<Result<_>>()?;
            Ok(SparseRow::from_entries(entries))
        })
        .collect::<Result<_>>()?;
    Ok(MatchingGram {
        matrix: SparseMatrix::from_rows(matchings.len(), rows),
        matchings,
    })
}

/// Six-point relations times every standard monomial of degree `d - 3`,
/// rewritten and written in [`enumerate_standard_xn`]`(n, d)` coordinates.
/// Products that rewrite to zero are skipped.
pub fn six_point_relations<S: Scalar>(n: usize, d: usize) -> Result<Vec<Vec<S>>> {
    if n < 6 || d < 3 {
        return Ok(Vec::new());
    }
    let target = enumerate_standard_xn(n, d);
    let index: HashMap<Monomial, usize> = target
        .iter()
        .enumerate()
        .map(|(i, v)| (v.monomial(), i))
        .collect();
    let multipliers = enumerate_standard_xn(n, d - 3);
    let mut out = Vec::new();
    for set in Subset::of_size(n, 6) {
        let rel: Poly<S> = six_point_polynomial(set);
        for w in &multipliers {
            let nf = quadratic_normal_form(&rel.mul_monomial(&w.monomial()));
            if nf.is_zero() {
                continue;
            }
            let mut v = vec![S::zero(); target.len()];
            for (i, c) in coordinates(&nf, &index)? {
                v[i] = c;
            }
            out.push(v);
        }
    }
    Ok(out)
}

/// `dim R^d(X^n)` as the standard-monomial count minus the rank of the
/// six-point relation span.
pub fn standard_dimension<S: Scalar>(n: usize, d: usize) -> Result<usize> {
    let count = enumerate_standard_xn(n, d).len();
    let rels = six_point_relations::<S>(n, d)?;
    if rels.is_empty() {
        return Ok(count);
    }
    let m = SparseMatrix::from_dense(&rels);
    Ok(count - linalg::rank(&m))
}

/// Pulls back the classical codimension-two relation on the threefold product
/// (`K_i = 2 a_i`, `D_{j,k} = d_{j,k}`) and simplifies it with the elementary
/// rules; the result is `2 (b12 b13 - a1 b23)`.
pub fn verify_faber_relation<S: Scalar>() -> Poly<S> {
    let k = |i| canonical::<S>(i);
    let d = |i, j| diag::<S>(i, j);
    let lhs = sum([
        &k(1) * &d(1, 2),
        &k(1) * &d(1, 3),
        &k(2) * &d(2, 3),
        -(&k(1) * &d(2, 3)),
        -(&k(2) * &d(1, 3)),
        -(&k(3) * &d(1, 2)),
        (&d(1, 2) * &d(1, 3)).scale(&S::from_i64(2)),
    ]);
    elementary_reduce(&lhs)
}

/// Push-forward along the projection `X^{m+1} -> X^m` forgetting the last point.
///
/// On standard monomials: a factor `a_{m+1}` is dropped, anything else
/// touching or missing the point `m+1` maps to zero.
pub fn fiber_pushforward<S: Scalar>(q: &Poly<S>, m: usize) -> Result<Poly<S>> {
    let last = m + 1;
    let nf = quadratic_normal_form(q);
    let mut out = Poly::zero();
    for (mono, c) in nf.terms() {
        let v = StandardMonomialXn::from_monomial(mono)?;
        if v.support().max().is_some_and(|x| x > last) {
            return Err(Error::Invalid(format!("{mono} lives beyond X^{last}")));
        }
        if v.a_set().contains(last) {
            let mut a_set = v.a_set();
            a_set.remove(last);
            let w = StandardMonomialXn { a: a_set, b: v.b };
            out.add_term(w.monomial(), c.clone());
        }
    }
    Ok(out)
}

/// Recomputes the six-point relation from the Chern classes of the
/// evaluation bundle: take the degree-3 part of
/// `prod_{i=1..7} (1 + 6 a_i - Delta_i)`, multiply by `a_7`, push forward to
/// `X^6` and rewrite. The result is minus the six-point sum.
pub fn derive_six_point<S: Scalar>() -> Result<Poly<S>> {
    let mut total: Poly<S> = Poly::one();
    for i in 1..=7usize {
        let delta = sum((1..i).map(|j| diag::<S>(j, i)));
        let factor = &(&int(1) + &a(i).scale(&S::from_i64(6))) - &delta;
        total = quadratic_normal_form(&(&total * &factor).truncate(3));
    }
    let c3 = total.degree_part(3);
    let lifted = quadratic_normal_form(&(&c3 * &a(7)));
    fiber_pushforward(&lifted, 6)
}

/// `sum over the 15 matchings of {1..6} of b b b`.
pub fn six_point_sum<S: Scalar>() -> Poly<S> {
    six_point_polynomial(Subset::full(6))
}

/// `prod` of the pure-`b` monomial of a matching times `a`'s: convenience for
/// tests and the CLI.
pub fn matching_poly<S: Scalar>(m: &Matching) -> Poly<S> {
    product(
        m.pairs()
            .iter()
            .map(|&(i, j)| b::<S>(i as usize, j as usize)),
    )
}
