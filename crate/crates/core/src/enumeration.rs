//! Counting engines for multiplicative sublattices.
//!
//! Two independent routes are provided: a brute-force scan over echelon
//! bases of `Z^{n+k}` that knows nothing about acceptable maps, and the
//! closed formula `S(n+k+1, n+1) · φ_n(r)`. [`verify_main_theorem`] runs both
//! and checks every witness lattice along the way.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::independent;
use crate::lattice::{Lattice, LatticeError};
use crate::linalg::LinalgError;
use crate::partition::{self, apply_map, stirling2, AcceptableMap, PartitionError};
use crate::search::{self, Budget, LowerScan, ScanError, SearchConfig};

pub const ENGINE_VERSION: &str = concat!("sublattice-", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("search budget of {0} steps exhausted; result would be incomplete")]
    BudgetExhausted(u64),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

impl From<LinalgError> for EnumerationError {
    fn from(e: LinalgError) -> Self {
        EnumerationError::Lattice(e.into())
    }
}

impl From<ScanError> for EnumerationError {
    fn from(e: ScanError) -> Self {
        match e {
            ScanError::Budget(limit) => EnumerationError::BudgetExhausted(limit),
            ScanError::Arithmetic(e) => e.into(),
            ScanError::Pool(msg) => EnumerationError::ThreadPool(msg),
        }
    }
}

pub type Result<T> = std::result::Result<T, EnumerationError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Oracle,
    Formula,
    Unital,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::Formula => "formula",
            Method::Unital => "unital",
        }
    }
}

/// One computed count: `φ_{n+k,k}(r)` for oracle/formula, `f_n(r)` for unital.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub n: usize,
    pub k: usize,
    pub r: u64,
    pub count: u128,
    pub method: Method,
    pub engine_version: String,
}

impl CountRecord {
    pub fn new(n: usize, k: usize, r: u64, count: u128, method: Method) -> Self {
        CountRecord {
            n,
            k,
            r,
            count,
            method,
            engine_version: ENGINE_VERSION.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub n: usize,
    pub k: usize,
    pub r: u64,
    pub oracle_count: u128,
    pub formula_count: u128,
    pub stirling_factor: u128,
    pub phi_base: u64,
    pub witnesses_checked: usize,
    pub status: Status,
    /// First witness that failed a check, if any.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counterexample: Option<Lattice>,
}

fn check_index(r: u64) -> Result<()> {
    if r == 0 {
        return Err(EnumerationError::InvalidParameters(
            "r must be at least 1".into(),
        ));
    }
    if r > i64::MAX as u64 / 4 {
        return Err(EnumerationError::InvalidParameters(format!(
            "r = {r} is too large"
        )));
    }
    Ok(())
}

fn verify_post_hoc(l: &Lattice, expected_torsion: u64) -> Result<()> {
    if !independent::is_multiplicative_by_extension(l)? {
        return Err(EnumerationError::Inconsistent(format!(
            "{l:?} passed the search filter but is not multiplicative"
        )));
    }
    let t = independent::torsion_by_minors(l)?;
    if t != expected_torsion {
        return Err(EnumerationError::Inconsistent(format!(
            "{l:?} has torsion {t} by minors, expected {expected_torsion}"
        )));
    }
    Ok(())
}

/// Canonicalizes, filters, dedupes and sorts raw bases.
fn finish(ambient: usize, rank: usize, r: u64, bases: Vec<Vec<Vec<i64>>>) -> Result<Vec<Lattice>> {
    let mut set = BTreeSet::new();
    for rows in bases {
        let l = Lattice::from_rows(ambient, &rows)?;
        if l.rank() == rank && l.torsion_size()? == r && l.is_multiplicative()? {
            set.insert(l);
        }
    }
    for l in &set {
        verify_post_hoc(l, r)?;
    }
    Ok(set.into_iter().collect())
}

/// Full-rank multiplicative sublattices of `Z^n` of index `r`, sorted by
/// canonical basis.
pub fn enumerate_full_rank_multiplicative(
    n: usize,
    r: u64,
    cfg: &SearchConfig,
) -> Result<Vec<Lattice>> {
    check_index(r)?;
    let budget = Budget::new(cfg.max_steps);
    let shards = search::ordered_factorizations(r, n);
    let bases = search::run_shards(cfg, shards, |diag| search::scan_full_rank(diag, &budget))?;
    finish(n, n, r, bases)
}

/// `φ_n(r)`; `φ_0(1) = 1` and `φ_0(r) = 0` otherwise.
pub fn phi(n: usize, r: u64, cfg: &SearchConfig) -> Result<u64> {
    Ok(enumerate_full_rank_multiplicative(n, r, cfg)?.len() as u64)
}

/// `f_n(r)`: subrings of index `r` containing `(1, …, 1)`.
pub fn f_count(n: usize, r: u64, cfg: &SearchConfig) -> Result<u64> {
    if n == 0 {
        return Err(EnumerationError::InvalidParameters(
            "f_n needs n >= 1".into(),
        ));
    }
    let ones = vec![1i64; n];
    let mut count = 0;
    for l in enumerate_full_rank_multiplicative(n, r, cfg)? {
        if l.contains(&ones)? {
            count += 1;
        }
    }
    Ok(count)
}

/// Multiplicative sublattices of `Z^ambient` of co-rank `corank` and torsion
/// size `r`, by exhaustive scan of reduced lower-echelon bases with entries in
/// `[0, bound_multiplier · r]`.
pub fn enumerate_corank_oracle(
    ambient: usize,
    corank: usize,
    r: u64,
    bound_multiplier: u64,
    cfg: &SearchConfig,
) -> Result<Vec<Lattice>> {
    check_index(r)?;
    if corank > ambient {
        return Err(EnumerationError::InvalidParameters(format!(
            "co-rank {corank} exceeds ambient dimension {ambient}"
        )));
    }
    if bound_multiplier == 0 {
        return Err(EnumerationError::InvalidParameters(
            "bound multiplier must be at least 1".into(),
        ));
    }
    let rank = ambient - corank;
    if rank == 0 {
        return Ok(if r == 1 {
            vec![Lattice::zero(ambient)]
        } else {
            Vec::new()
        });
    }
    let bound = r
        .checked_mul(bound_multiplier)
        .and_then(|b| i64::try_from(b).ok())
        .ok_or_else(|| EnumerationError::InvalidParameters("entry bound too large".into()))?;
    let scan = LowerScan {
        ambient,
        rank,
        bound,
    };
    let budget = Budget::new(cfg.max_steps);
    let seeds = scan.seeds(&budget)?;
    let bases = search::run_shards(cfg, seeds, |seed| scan.complete(seed, &budget))?;
    finish(ambient, rank, r, bases)
}

/// `S(n+k+1, n+1) · φ_n(r)`.
pub fn phi_corank_formula(n: usize, k: usize, r: u64, cfg: &SearchConfig) -> Result<u128> {
    let base = phi(n, r, cfg)?;
    stirling2(n + k + 1, n + 1)
        .checked_mul(base as u128)
        .ok_or_else(|| EnumerationError::InvalidParameters("count overflows u128".into()))
}

/// The unique ordered acceptable map `g` and full-rank multiplicative `L'`
/// with `g(L') = l`.
///
/// Target coordinates are grouped by their column in the canonical basis:
/// zero columns are the zero coordinates, equal nonzero columns copy the
/// same source coordinate, and sources are numbered by first appearance.
pub fn decompose(l: &Lattice) -> Result<(AcceptableMap, Lattice)> {
    if !l.is_multiplicative()? {
        return Err(LatticeError::NotMultiplicative.into());
    }
    let basis = l.basis();
    let mut reps: Vec<(Vec<i64>, usize)> = Vec::new();
    let mut assignment = Vec::with_capacity(l.ambient_dim());
    for j in 0..l.ambient_dim() {
        let col = basis.column(j);
        if col.iter().all(|&x| x == 0) {
            assignment.push(None);
            continue;
        }
        match reps.iter().position(|(c, _)| *c == col) {
            Some(i) => assignment.push(Some(i)),
            None => {
                assignment.push(Some(reps.len()));
                reps.push((col, j));
            }
        }
    }
    let n = reps.len();
    if n != l.rank() {
        return Err(EnumerationError::Inconsistent(format!(
            "{l:?} has {n} distinct nonzero columns but rank {}",
            l.rank()
        )));
    }
    let g = AcceptableMap::new(n, assignment)?;
    let rows: Vec<Vec<i64>> = basis
        .row_iter()
        .map(|row| reps.iter().map(|&(_, j)| row[j]).collect())
        .collect();
    let base = Lattice::from_rows(n, &rows)?;
    if base.rank() != n || apply_map(&g, &base)? != *l {
        return Err(EnumerationError::Inconsistent(format!(
            "pull-back of {l:?} along {g} does not map back"
        )));
    }
    Ok((g, base))
}

fn witness_ok(w: &Lattice, n: usize, r: u64) -> Result<bool> {
    if !w.rigidity_check()? {
        return Ok(false);
    }
    let (g, base) = match decompose(w) {
        Ok(pair) => pair,
        Err(EnumerationError::Inconsistent(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    Ok(g.is_ordered()
        && g.source_dim() == n
        && base.is_multiplicative()?
        && apply_map(&g, &base)? == *w
        && w.torsion_size()? == r
        && base.torsion_size()? == r)
}

/// Oracle count against the closed formula, with every witness checked for
/// rigidity, decomposition round-trip and torsion preservation.
pub fn verify_main_theorem(
    n: usize,
    k: usize,
    r: u64,
    bound_multiplier: u64,
    cfg: &SearchConfig,
) -> Result<VerificationReport> {
    let witnesses = enumerate_corank_oracle(n + k, k, r, bound_multiplier, cfg)?;
    let phi_base = phi(n, r, cfg)?;
    let stirling_factor = stirling2(n + k + 1, n + 1);
    let formula_count = stirling_factor * phi_base as u128;
    let mut counterexample = None;
    for w in &witnesses {
        if !witness_ok(w, n, r)? {
            counterexample = Some(w.clone());
            break;
        }
    }
    let oracle_count = witnesses.len() as u128;
    let status = if oracle_count == formula_count && counterexample.is_none() {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(VerificationReport {
        n,
        k,
        r,
        oracle_count,
        formula_count,
        stirling_factor,
        phi_base,
        witnesses_checked: witnesses.len(),
        status,
        counterexample,
    })
}

/// Images `g(L)` over all ordered maps `Z^n → Z^{n+k}` and all index-`r`
/// multiplicative `L`, compared with the oracle's witness set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageComparison {
    pub images: usize,
    pub distinct_images: usize,
    pub oracle: usize,
    pub identical: bool,
}

pub fn compare_images_with_oracle(
    n: usize,
    k: usize,
    r: u64,
    bound_multiplier: u64,
    cfg: &SearchConfig,
) -> Result<ImageComparison> {
    let bases = enumerate_full_rank_multiplicative(n, r, cfg)?;
    let maps = partition::enumerate_ordered_maps(n, n + k);
    let mut images = Vec::with_capacity(bases.len() * maps.len());
    for g in &maps {
        for l in &bases {
            images.push(apply_map(g, l)?);
        }
    }
    let total = images.len();
    let distinct: BTreeSet<Lattice> = images.into_iter().collect();
    let oracle: BTreeSet<Lattice> = enumerate_corank_oracle(n + k, k, r, bound_multiplier, cfg)?
        .into_iter()
        .collect();
    Ok(ImageComparison {
        images: total,
        distinct_images: distinct.len(),
        oracle: oracle.len(),
        identical: distinct == oracle,
    })
}
