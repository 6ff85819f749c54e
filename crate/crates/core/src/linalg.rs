//! Exact sparse linear algebra: echelon forms, ranks and kernels.
//!
//! Elimination is fraction-free: a row is reduced against a pivot row by
//! `lead(p) * row - lead(row) * p` and then rescaled with
//! [`Scalar::make_primitive`], so over the rationals every stored row stays a
//! primitive integer vector until the final back substitution.

use std::collections::BTreeMap;

use crate::scalar::Scalar;

/// Dense elimination takes over above this fill ratio (nonzeros / cells).
const DENSE_FILL_RATIO: f64 = 0.30;
/// Dense fallback is only attempted for matrices up to this many cells.
const DENSE_MAX_CELLS: usize = 1 << 22;

/// A sparse vector with strictly increasing column indices and no zero entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseRow<S> {
    cols: Vec<u32>,
    vals: Vec<S>,
}

impl<S: Scalar> Default for SparseRow<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> SparseRow<S> {
    pub fn new() -> Self {
        SparseRow {
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    /// Builds a row from arbitrary `(col, value)` pairs, summing duplicates and
    /// dropping zeros.
    pub fn from_entries<I: IntoIterator<Item = (u32, S)>>(entries: I) -> Self {
        let mut items: Vec<(u32, S)> = entries.into_iter().collect();
        items.sort_by_key(|(c, _)| *c);
        let mut cols = Vec::with_capacity(items.len());
        let mut vals: Vec<S> = Vec::with_capacity(items.len());
        for (c, v) in items {
            if cols.last() == Some(&c) {
                let last = vals.last_mut().unwrap();
                *last = last.clone() + v;
            } else {
                cols.push(c);
                vals.push(v);
            }
        }
        let mut row = SparseRow { cols, vals };
        row.drop_zeros();
        row
    }

    /// Builds a row from entries already sorted by strictly increasing column
    /// with no zero values.
    pub(crate) fn from_sorted(cols: Vec<u32>, vals: Vec<S>) -> Self {
        debug_assert!(cols.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(vals.iter().all(|v| !v.is_zero()));
        SparseRow { cols, vals }
    }

    fn drop_zeros(&mut self) {
        if self.vals.iter().any(|v| v.is_zero()) {
            let (cols, vals): (Vec<u32>, Vec<S>) = self
                .cols
                .drain(..)
                .zip(self.vals.drain(..))
                .filter(|(_, v)| !v.is_zero())
                .unzip();
            self.cols = cols;
            self.vals = vals;
        }
    }

    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    pub fn lead(&self) -> Option<u32> {
        self.cols.first().copied()
    }

    pub fn lead_value(&self) -> Option<&S> {
        self.vals.first()
    }

    pub fn cols(&self) -> &[u32] {
        &self.cols
    }

    pub fn values(&self) -> &[S] {
        &self.vals
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &S)> + '_ {
        self.cols.iter().copied().zip(self.vals.iter())
    }

    pub fn get(&self, col: u32) -> Option<&S> {
        self.cols.binary_search(&col).ok().map(|i| &self.vals[i])
    }

    pub fn scale(&mut self, factor: &S) {
        for v in &mut self.vals {
            *v = v.clone() * factor.clone();
        }
        self.drop_zeros();
    }

    pub fn make_primitive(&mut self) {
        S::make_primitive(&mut self.vals);
    }

    /// `ca * a + cb * b`, skipping the first `skip_a`/`skip_b` entries of each.
    fn combine(a: &Self, ca: &S, skip_a: usize, b: &Self, cb: &S, skip_b: usize) -> Self {
        let cap = a.len() + b.len();
        let mut cols = Vec::with_capacity(cap);
        let mut vals = Vec::with_capacity(cap);
        let (mut i, mut j) = (skip_a, skip_b);
        while i < a.len() || j < b.len() {
            let take_a = j >= b.len() || (i < a.len() && a.cols[i] < b.cols[j]);
            let take_b = i >= a.len() || (j < b.len() && b.cols[j] < a.cols[i]);
            if take_a {
                cols.push(a.cols[i]);
                vals.push(a.vals[i].clone() * ca.clone());
                i += 1;
            } else if take_b {
                cols.push(b.cols[j]);
                vals.push(b.vals[j].clone() * cb.clone());
                j += 1;
            } else {
                let v = a.vals[i].clone() * ca.clone() + b.vals[j].clone() * cb.clone();
                if !v.is_zero() {
                    cols.push(a.cols[i]);
                    vals.push(v);
                }
                i += 1;
                j += 1;
            }
        }
        SparseRow { cols, vals }
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, factor: &S, other: &Self) -> Self {
        Self::combine(self, &S::one(), 0, other, factor, 0)
    }

    /// Cancels the shared leading entry of `self` against `pivot`.
    fn eliminate(&self, pivot: &Self) -> Self {
        debug_assert_eq!(self.lead(), pivot.lead());
        let ca = pivot.vals[0].clone();
        let cb = -self.vals[0].clone();
        let mut out = Self::combine(self, &ca, 1, pivot, &cb, 1);
        out.make_primitive();
        out
    }

    pub fn dot(&self, dense: &[S]) -> S {
        let mut acc = S::zero();
        for (c, v) in self.iter() {
            acc = acc + v.clone() * dense[c as usize].clone();
        }
        acc
    }
}

/// Incremental row echelon form keyed by leading column.
///
/// Pivot rule: a row's pivot is its smallest column; when two rows compete for
/// a column the sparser one keeps it.
#[derive(Clone, Debug)]
pub struct Echelon<S> {
    ncols: usize,
    pivots: Vec<Option<SparseRow<S>>>,
    rank: usize,
}

impl<S: Scalar> Echelon<S> {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            pivots: vec![None; ncols],
            rank: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_pivot(&self, col: u32) -> bool {
        self.pivots[col as usize].is_some()
    }

    /// Inserts a row; returns true if it was independent of the rows so far.
    pub fn insert(&mut self, mut row: SparseRow<S>) -> bool {
        row.make_primitive();
        loop {
            let Some(lead) = row.lead() else {
                return false;
            };
            assert!((lead as usize) < self.ncols, "column {lead} out of bounds");
            match &mut self.pivots[lead as usize] {
                slot @ None => {
                    *slot = Some(row);
                    self.rank += 1;
                    return true;
                }
                Some(pivot) => {
                    if row.len() < pivot.len() {
                        std::mem::swap(&mut row, pivot);
                    }
                    row = row.eliminate(pivot);
                }
            }
        }
    }

    /// Back substitution into reduced row echelon form.
    pub fn into_reduced(self) -> ReducedEchelon<S> {
        let Echelon {
            ncols,
            mut pivots,
            rank,
        } = self;
        for c in (0..ncols).rev() {
            let Some(row) = pivots[c].take() else {
                continue;
            };
            let lead = row.vals[0].clone();
            let needs_substitution = row.cols[1..]
                .iter()
                .any(|&k| pivots[k as usize].is_some());
            let mut reduced = if needs_substitution {
                let mut acc: BTreeMap<u32, S> = BTreeMap::new();
                for (k, v) in row.iter().skip(1) {
                    match &pivots[k as usize] {
                        None => {
                            let e = acc.entry(k).or_insert_with(S::zero);
                            *e = e.clone() + v.clone();
                        }
                        Some(sub) => {
                            // sub is already reduced with unit lead
                            for (kk, w) in sub.iter().skip(1) {
                                let e = acc.entry(kk).or_insert_with(S::zero);
                                *e = e.clone() - v.clone() * w.clone();
                            }
                        }
                    }
                }
                let mut cols = vec![c as u32];
                let mut vals = vec![lead.clone()];
                for (k, v) in acc {
                    if !v.is_zero() {
                        cols.push(k);
                        vals.push(v);
                    }
                }
                SparseRow { cols, vals }
            } else {
                row
            };
            let inv = S::one() / lead;
            reduced.scale(&inv);
            pivots[c] = Some(reduced);
        }
        ReducedEchelon {
            ncols,
            rows: pivots,
            rank,
        }
    }
}

/// Reduced row echelon form: every pivot row has lead 1 and no other entry in
/// a pivot column.
#[derive(Clone, Debug)]
pub struct ReducedEchelon<S> {
    ncols: usize,
    rows: Vec<Option<SparseRow<S>>>,
    rank: usize,
}

impl<S: Scalar> ReducedEchelon<S> {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, col: u32) -> Option<&SparseRow<S>> {
        self.rows[col as usize].as_ref()
    }

    pub fn pivot_cols(&self) -> impl Iterator<Item = u32> + '_ {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_some())
            .map(|(c, _)| c as u32)
    }

    pub fn free_cols(&self) -> impl Iterator<Item = u32> + '_ {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_none())
            .map(|(c, _)| c as u32)
    }

    pub fn into_rows(self) -> Vec<Option<SparseRow<S>>> {
        self.rows
    }
}

/// A sparse matrix stored by rows.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<S> {
    nrows: usize,
    ncols: usize,
    rows: Vec<SparseRow<S>>,
}

impl<S: Scalar> SparseMatrix<S> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            rows: vec![SparseRow::new(); nrows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| SparseRow::from_sorted(vec![i as u32], vec![S::one()]))
            .collect();
        SparseMatrix {
            nrows: n,
            ncols: n,
            rows,
        }
    }

    pub fn from_rows(ncols: usize, rows: Vec<SparseRow<S>>) -> Self {
        for r in &rows {
            if let Some(&last) = r.cols.last() {
                assert!((last as usize) < ncols, "column {last} out of bounds");
            }
        }
        SparseMatrix {
            nrows: rows.len(),
            ncols,
            rows,
        }
    }

    pub fn from_dense(dense: &[Vec<S>]) -> Self {
        let ncols = dense.first().map_or(0, Vec::len);
        let rows = dense
            .iter()
            .map(|r| {
                assert_eq!(r.len(), ncols, "ragged dense matrix");
                SparseRow::from_entries(
                    r.iter()
                        .enumerate()
                        .filter(|(_, v)| !v.is_zero())
                        .map(|(c, v)| (c as u32, v.clone())),
                )
            })
            .collect();
        SparseMatrix {
            nrows: dense.len(),
            ncols,
            rows,
        }
    }

    pub fn from_i64(dense: &[Vec<i64>]) -> Self {
        let conv: Vec<Vec<S>> = dense
            .iter()
            .map(|r| r.iter().map(|&v| S::from_i64(v)).collect())
            .collect();
        let mut m = Self::from_dense(&conv);
        if dense.is_empty() {
            m.ncols = 0;
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[SparseRow<S>] {
        &self.rows
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(SparseRow::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.rows[i].get(j as u32).cloned().unwrap_or_else(S::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        assert!(i < self.nrows && j < self.ncols);
        let row = &mut self.rows[i];
        match row.cols.binary_search(&(j as u32)) {
            Ok(k) => {
                if v.is_zero() {
                    row.cols.remove(k);
                    row.vals.remove(k);
                } else {
                    row.vals[k] = v;
                }
            }
            Err(k) => {
                if !v.is_zero() {
                    row.cols.insert(k, j as u32);
                    row.vals.insert(k, v);
                }
            }
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<S>> {
        self.rows
            .iter()
            .map(|r| {
                let mut d = vec![S::zero(); self.ncols];
                for (c, v) in r.iter() {
                    d[c as usize] = v.clone();
                }
                d
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut buckets: Vec<Vec<(u32, S)>> = vec![Vec::new(); self.ncols];
        for (i, r) in self.rows.iter().enumerate() {
            for (c, v) in r.iter() {
                buckets[c as usize].push((i as u32, v.clone()));
            }
        }
        let rows = buckets
            .into_iter()
            .map(|b| {
                let (cols, vals) = b.into_iter().unzip();
                SparseRow::from_sorted(cols, vals)
            })
            .collect();
        SparseMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            rows,
        }
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.ncols);
        self.rows.iter().map(|r| r.dot(v)).collect()
    }
}

/// Result of [`echelonize`].
#[derive(Clone, Debug, PartialEq)]
pub struct EchelonForm<S> {
    /// Reduced row echelon form, one row per pivot, ordered by pivot column.
    pub echelon: SparseMatrix<S>,
    /// `(row in echelon, column)` of every leading entry.
    pub pivots: Vec<(usize, usize)>,
    pub rank: usize,
}

fn use_dense<S: Scalar>(m: &SparseMatrix<S>) -> bool {
    let cells = m.nrows * m.ncols;
    cells > 0 && cells <= DENSE_MAX_CELLS && m.nnz() as f64 > DENSE_FILL_RATIO * cells as f64
}

/// Row-reduces `m` to its (unique) reduced row echelon form.
pub fn echelonize<S: Scalar>(m: &SparseMatrix<S>) -> EchelonForm<S> {
    let rows: Vec<SparseRow<S>> = if use_dense(m) {
        dense_rref(m)
    } else {
        let mut ech = Echelon::new(m.ncols);
        for r in &m.rows {
            ech.insert(r.clone());
        }
        ech.into_reduced().into_rows().into_iter().flatten().collect()
    };
    let pivots = rows
        .iter()
        .enumerate()
        .map(|(i, r)| (i, r.lead().unwrap() as usize))
        .collect();
    let rank = rows.len();
    EchelonForm {
        echelon: SparseMatrix::from_rows(m.ncols, rows),
        pivots,
        rank,
    }
}

/// Gauss-Jordan on a dense copy; same pivot rule as the sparse path.
fn dense_rref<S: Scalar>(m: &SparseMatrix<S>) -> Vec<SparseRow<S>> {
    let mut a = m.to_dense();
    let ncols = m.ncols;
    let mut top = 0;
    for c in 0..ncols {
        if top == a.len() {
            break;
        }
        let best = (top..a.len())
            .filter(|&r| !a[r][c].is_zero())
            .min_by_key(|&r| (a[r].iter().filter(|v| !v.is_zero()).count(), r));
        let Some(best) = best else {
            continue;
        };
        a.swap(top, best);
        let inv = S::one() / a[top][c].clone();
        for v in a[top].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        let pivot_row = a[top].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == top || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(pivot_row.iter()) {
                if !p.is_zero() {
                    *x = x.clone() - f.clone() * p.clone();
                }
            }
        }
        top += 1;
    }
    a.truncate(top);
    a.into_iter()
        .map(|r| {
            SparseRow::from_entries(
                r.into_iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(c, v)| (c as u32, v)),
            )
        })
        .collect()
}

/// Rank and a basis of the right null space `{x : m x = 0}`.
pub fn rank_and_kernel<S: Scalar>(m: &SparseMatrix<S>) -> (usize, Vec<Vec<S>>) {
    let form = echelonize(m);
    let ncols = m.ncols;
    let mut is_pivot = vec![false; ncols];
    for &(_, c) in &form.pivots {
        is_pivot[c] = true;
    }
    let mut kernel = Vec::new();
    for f in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![S::zero(); ncols];
        v[f] = S::one();
        for (row, &(_, pc)) in form.echelon.rows.iter().zip(&form.pivots) {
            if let Some(x) = row.get(f as u32) {
                v[pc] = -x.clone();
            }
        }
        kernel.push(v);
    }
    (form.rank, kernel)
}

pub fn rank<S: Scalar>(m: &SparseMatrix<S>) -> usize {
    if use_dense(m) {
        return dense_rref(m).len();
    }
    let mut ech = Echelon::new(m.ncols);
    for r in &m.rows {
        ech.insert(r.clone());
    }
    ech.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Fp;
    use num_rational::BigRational;
    use proptest::prelude::*;
    use num_traits::Zero;

    type Q = BigRational;
    type F = Fp<1_000_000_007>;

    fn mat(d: &[Vec<i64>]) -> SparseMatrix<Q> {
        SparseMatrix::from_i64(d)
    }

    #[test]
    fn small_ranks() {
        assert_eq!(echelonize(&mat(&[vec![1, 2], vec![2, 4]])).rank, 1);
        assert_eq!(echelonize(&mat(&[vec![0, 1], vec![1, 0]])).rank, 2);
        assert_eq!(echelonize(&mat(&[vec![-4]])).rank, 1);
    }

    #[test]
    fn empty_matrix_has_rank_zero() {
        let m: SparseMatrix<Q> = SparseMatrix::zeros(0, 0);
        let f = echelonize(&m);
        assert_eq!(f.rank, 0);
        assert!(f.pivots.is_empty());
    }

    #[test]
    fn identity_and_zero_kernels() {
        let (r, k) = rank_and_kernel(&SparseMatrix::<Q>::identity(3));
        assert_eq!((r, k.len()), (3, 0));
        let (r, k) = rank_and_kernel(&SparseMatrix::<Q>::zeros(2, 3));
        assert_eq!((r, k.len()), (0, 3));
    }

    #[test]
    fn sparse_and_dense_paths_agree() {
        // one-nonzero-per-row forces the sparse path; the dense copy is filled
        let m = mat(&[
            vec![2, 0, 0, 0, 0, 0, 0, 0],
            vec![0, 0, 0, 0, 0, 0, 0, 3],
            vec![0, 5, 0, 0, 0, 0, 0, 0],
            vec![0, 0, 0, 0, 0, 0, 0, 0],
        ]);
        assert!(!use_dense(&m));
        let sparse = echelonize(&m);
        let dense_rows = dense_rref(&m);
        assert_eq!(sparse.echelon.rows, dense_rows);
    }

    fn arb_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
            prop::collection::vec(
                prop::collection::vec(prop_oneof![3 => Just(0i64), 2 => -5i64..6], c),
                r,
            )
        })
    }

    proptest! {
        #[test]
        fn rank_of_transpose(d in arb_matrix()) {
            let m = mat(&d);
            prop_assert_eq!(rank(&m), rank(&m.transpose()));
        }

        #[test]
        fn kernel_vectors_are_annihilated(d in arb_matrix()) {
            let m = mat(&d);
            let (r, kernel) = rank_and_kernel(&m);
            prop_assert_eq!(r + kernel.len(), m.ncols());
            for v in &kernel {
                prop_assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
            }
        }

        #[test]
        fn echelonize_is_idempotent(d in arb_matrix()) {
            let m = mat(&d);
            let once = echelonize(&m);
            let twice = echelonize(&once.echelon);
            prop_assert_eq!(once.rank, twice.rank);
            prop_assert_eq!(once.echelon, twice.echelon);
        }

        #[test]
        fn modular_rank_never_exceeds_rational_rank(d in arb_matrix()) {
            let q = mat(&d);
            let f: SparseMatrix<F> = SparseMatrix::from_i64(&d);
            prop_assert!(rank(&f) <= rank(&q));
        }
    }
}
