use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::Serialize;

use super::basis::{build_compiled, CompiledPresentation, GradedBasis, MonomialIndexer, DEFAULT_SIZE_CEILING};
use super::cache::{BasisStore, Lookup};
use super::presentation::Presentation;
use crate::error::{Error, Result};
use crate::linalg::{self, SparseMatrix, SparseRow};
use crate::poly::{Monomial, Poly};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub size_ceiling: usize,
    pub cache_dir: Option<PathBuf>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            size_ceiling: DEFAULT_SIZE_CEILING,
            cache_dir: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub memory_hits: u64,
    pub disk_hits: u64,
    pub computed: u64,
    pub disk_writes: u64,
    pub corrupt_entries: u64,
}

#[derive(Default)]
struct Counters {
    memory_hits: AtomicU64,
    disk_hits: AtomicU64,
    computed: AtomicU64,
    disk_writes: AtomicU64,
    corrupt_entries: AtomicU64,
}

type Cell<S> = Arc<Mutex<Option<Arc<GradedBasis<S>>>>>;

/// A presented algebra together with its per-degree basis cache.
///
/// Each degree is computed at most once: concurrent requests for the same
/// degree wait on that degree's lock.
pub struct GradedRing<S: Scalar> {
    presentation: Presentation<S>,
    compiled: CompiledPresentation<S>,
    hash: String,
    config: EngineConfig,
    cells: Mutex<BTreeMap<usize, Cell<S>>>,
    counters: Counters,
}

/// Per-degree record of a pairing check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreePairing {
    pub degree: usize,
    pub dim: usize,
    pub dim_complement: usize,
    pub gram_rank: usize,
    pub perfect: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairingReport {
    pub degrees: Vec<DegreePairing>,
    pub hilbert: Vec<usize>,
    pub socle_dim: usize,
    pub above_socle_dims: Vec<usize>,
    pub verdict: bool,
}

impl<S: Scalar> GradedRing<S> {
    pub fn new(presentation: Presentation<S>) -> Self {
        Self::with_config(presentation, EngineConfig::default())
    }

    pub fn with_config(presentation: Presentation<S>, config: EngineConfig) -> Self {
        let compiled = CompiledPresentation::new(&presentation);
        let hash = presentation.content_hash();
        GradedRing {
            presentation,
            compiled,
            hash,
            config,
            cells: Mutex::new(BTreeMap::new()),
            counters: Counters::default(),
        }
    }

    pub fn presentation(&self) -> &Presentation<S> {
        &self.presentation
    }

    pub fn n(&self) -> usize {
        self.presentation.n()
    }

    pub fn cache_stats(&self) -> CacheStats {
        let c = &self.counters;
        CacheStats {
            memory_hits: c.memory_hits.load(Ordering::Relaxed),
            disk_hits: c.disk_hits.load(Ordering::Relaxed),
            computed: c.computed.load(Ordering::Relaxed),
            disk_writes: c.disk_writes.load(Ordering::Relaxed),
            corrupt_entries: c.corrupt_entries.load(Ordering::Relaxed),
        }
    }

    /// The degree-`d` quotient basis, from memory, disk, or computed.
    pub fn basis(&self, d: usize) -> Result<Arc<GradedBasis<S>>> {
        let cell = {
            let mut cells = self.cells.lock().unwrap();
            cells.entry(d).or_default().clone()
        };
        let mut slot = cell.lock().unwrap();
        if let Some(b) = slot.as_ref() {
            self.counters.memory_hits.fetch_add(1, Ordering::Relaxed);
            return Ok(b.clone());
        }
        let store = self.config.cache_dir.as_ref().map(BasisStore::new);
        let key = BasisStore::key::<S>(&self.hash, d);
        if let Some(store) = &store {
            match store.load::<S>(&key, &self.hash, d) {
                Lookup::Hit(b) => {
                    self.counters.disk_hits.fetch_add(1, Ordering::Relaxed);
                    let b = Arc::new(b);
                    *slot = Some(b.clone());
                    return Ok(b);
                }
                Lookup::Corrupt(_) => {
                    self.counters.corrupt_entries.fetch_add(1, Ordering::Relaxed);
                }
                Lookup::Missing => {}
            }
        }
        let b = build_compiled(&self.compiled, d, self.config.size_ceiling)?;
        self.counters.computed.fetch_add(1, Ordering::Relaxed);
        if let Some(store) = &store {
            store.store(&key, &self.hash, &b)?;
            self.counters.disk_writes.fetch_add(1, Ordering::Relaxed);
        }
        let b = Arc::new(b);
        *slot = Some(b.clone());
        Ok(b)
    }

    pub fn dimension(&self, d: usize) -> Result<usize> {
        Ok(self.basis(d)?.dimension())
    }

    /// `[dim R^0, ..., dim R^dmax]`.
    pub fn hilbert(&self, dmax: usize) -> Result<Vec<usize>> {
        (0..=dmax).map(|d| self.dimension(d)).collect()
    }

    /// The basis monomials of degree `d`, in basis order.
    pub fn basis_monomials(&self, d: usize) -> Result<Vec<Monomial>> {
        let b = self.basis(d)?;
        if b.dimension() == 0 {
            return Ok(Vec::new());
        }
        let all = b.monomial_list();
        Ok(b
            .quotient_columns()
            .iter()
            .map(|&c| self.compiled.to_monomial(&all[c as usize]))
            .collect())
    }

    fn column(&self, m: &Monomial, d: usize) -> Result<u32> {
        let idx = self.compiled.to_index(m)?;
        let ix = MonomialIndexer::new(self.compiled.generators.len(), d);
        Ok(ix.rank(&idx) as u32)
    }

    /// Coordinates of `q` in the degree-`d` quotient basis.
    pub fn normal_form(&self, q: &Poly<S>, d: usize) -> Result<Vec<S>> {
        if !q.is_homogeneous_of(d) {
            return Err(Error::NotHomogeneous { expected: d });
        }
        let b = self.basis(d)?;
        let mut out = vec![S::zero(); b.dimension()];
        for (m, c) in q.terms() {
            let col = self.column(m, d)?;
            for (p, v) in b.column_coordinates(col) {
                out[p as usize] = out[p as usize].clone() + v * c.clone();
            }
        }
        Ok(out)
    }

    /// Turns basis coordinates back into a polynomial on basis monomials.
    pub fn class_of(&self, coords: &[S], d: usize) -> Result<Poly<S>> {
        let mons = self.basis_monomials(d)?;
        if mons.len() != coords.len() {
            return Err(Error::DegreeMismatch {
                expected: mons.len(),
                found: coords.len(),
            });
        }
        Ok(Poly::from_terms(mons.into_iter().zip(coords.iter().cloned())))
    }

    /// Canonical representative of `q` (homogeneous of degree `d`).
    pub fn reduce(&self, q: &Poly<S>, d: usize) -> Result<Poly<S>> {
        let coords = self.normal_form(q, d)?;
        self.class_of(&coords, d)
    }

    fn degree_of(q: &Poly<S>) -> Result<usize> {
        match q.homogeneous_degree() {
            Some(d) => Ok(d),
            None if q.is_zero() => Ok(0),
            None => Err(Error::NotHomogeneous {
                expected: q.max_degree().unwrap_or(0),
            }),
        }
    }

    /// The class of `u * v`, written on basis monomials.
    pub fn multiply(&self, u: &Poly<S>, v: &Poly<S>) -> Result<Poly<S>> {
        let du = Self::degree_of(u)?;
        let dv = Self::degree_of(v)?;
        if u.is_zero() || v.is_zero() {
            return Ok(Poly::zero());
        }
        self.reduce(&(u * v), du + dv)
    }

    /// The scalar `c` with `[q] = c [socle monomial]`.
    pub fn socle_eval(&self, q: &Poly<S>) -> Result<S> {
        let functional = self.socle_functional()?;
        let n = self.n();
        if !q.is_homogeneous_of(n) {
            return Err(Error::NotHomogeneous { expected: n });
        }
        let mut acc = S::zero();
        for (m, c) in q.terms() {
            acc = acc + functional.eval_column(self.column(m, n)?) * c.clone();
        }
        Ok(acc)
    }

    fn socle_functional(&self) -> Result<SocleFunctional<S>> {
        let n = self.n();
        let b = self.basis(n)?;
        if b.dimension() != 1 {
            return Err(Error::SocleDimension {
                degree: n,
                dim: b.dimension(),
            });
        }
        let col = self.column(self.presentation.socle_monomial(), n)?;
        let coords = b.column_coordinates(col);
        let Some((_, s)) = coords.first() else {
            return Err(Error::Invalid(format!(
                "socle monomial {} vanishes in {}",
                self.presentation.socle_monomial(),
                self.presentation.name()
            )));
        };
        Ok(SocleFunctional {
            basis: b.clone(),
            scale: S::one() / s.clone(),
        })
    }

    /// `entry(i, j) = socle_eval(rows[i] * cols[j])`.
    pub fn gram_matrix(&self, d: usize, rows: &[Poly<S>], cols: &[Poly<S>]) -> Result<SparseMatrix<S>> {
        let n = self.n();
        if d > n {
            return Err(Error::DegreeMismatch { expected: n, found: d });
        }
        for r in rows {
            if !r.is_homogeneous_of(d) {
                return Err(Error::DegreeMismatch {
                    expected: d,
                    found: r.max_degree().unwrap_or(0),
                });
            }
        }
        for c in cols {
            if !c.is_homogeneous_of(n - d) {
                return Err(Error::DegreeMismatch {
                    expected: n - d,
                    found: c.max_degree().unwrap_or(0),
                });
            }
        }
        let functional = self.socle_functional()?;
        let ix = MonomialIndexer::new(self.compiled.generators.len(), n);
        let compiled_cols: Vec<Vec<(super::basis::IndexMonomial, S)>> = cols
            .iter()
            .map(|p| {
                p.terms()
                    .map(|(m, c)| Ok((self.compiled.to_index(m)?, c.clone())))
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;
        let sparse_rows: Vec<SparseRow<S>> = rows
            .par_iter()
            .map(|r| {
                let terms: Vec<(super::basis::IndexMonomial, S)> = r
                    .terms()
                    .map(|(m, c)| Ok((self.compiled.to_index(m)?, c.clone())))
                    .collect::<Result<_>>()?;
                let entries = compiled_cols.iter().enumerate().map(|(j, col)| {
                    let mut acc = S::zero();
                    for (m1, c1) in &terms {
                        for (m2, c2) in col {
                            let k = ix.rank(&super::basis::merge(m1, m2)) as u32;
                            acc = acc + functional.eval_column(k) * c1.clone() * c2.clone();
                        }
                    }
                    (j as u32, acc)
                });
                Ok(SparseRow::from_entries(entries.collect::<Vec<_>>()))
            })
            .collect::<Result<_>>()?;
        Ok(SparseMatrix::from_rows(cols.len(), sparse_rows))
    }

    /// Checks the Poincaré pairing in every degree, the top dimension and the
    /// vanishing just above it.
    pub fn gorenstein_check(&self) -> Result<PairingReport> {
        let n = self.n();
        let hilbert = self.hilbert(n + 1)?;
        let socle_dim = hilbert[n];
        let above = vec![hilbert[n + 1]];
        let mut degrees = Vec::with_capacity(n + 1);
        for d in 0..=n {
            let (dim, dim_c) = (hilbert[d], hilbert[n - d]);
            let gram_rank = if socle_dim == 1 {
                let rows: Vec<Poly<S>> = self
                    .basis_monomials(d)?
                    .into_iter()
                    .map(|m| Poly::monomial(m, S::one()))
                    .collect();
                let cols: Vec<Poly<S>> = self
                    .basis_monomials(n - d)?
                    .into_iter()
                    .map(|m| Poly::monomial(m, S::one()))
                    .collect();
                linalg::rank(&self.gram_matrix(d, &rows, &cols)?)
            } else {
                0
            };
            degrees.push(DegreePairing {
                degree: d,
                dim,
                dim_complement: dim_c,
                gram_rank,
                perfect: gram_rank == dim && dim == dim_c,
            });
        }
        let verdict =
            degrees.iter().all(|r| r.perfect) && socle_dim == 1 && above.iter().all(|&x| x == 0);
        Ok(PairingReport {
            degrees,
            hilbert: hilbert[..=n].to_vec(),
            socle_dim,
            above_socle_dims: above,
            verdict,
        })
    }
}

struct SocleFunctional<S> {
    basis: Arc<GradedBasis<S>>,
    scale: S,
}

impl<S: Scalar> SocleFunctional<S> {
    fn eval_column(&self, col: u32) -> S {
        match self.basis.column_coordinates(col).first() {
            Some((_, v)) => v.clone() * self.scale.clone(),
            None => S::zero(),
        }
    }
}
