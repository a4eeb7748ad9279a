//! Pruned exhaustive scans over echelon-shaped bases.
//!
//! Both scans grow a basis one row at a time and discard a prefix as soon as
//! the rows placed so far fail to span a multiplicative lattice. A prefix of
//! an echelon basis spans the intersection of the full lattice with a
//! coordinate subspace, which is itself closed under multiplication, so the
//! cut is exact. Survivors are re-checked by the callers on their canonical
//! form; the pruning test here uses its own elimination routine.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::linalg::{self, LinalgError};

/// Work limits for an enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Worker threads; `1` runs on the calling thread.
    pub jobs: usize,
    /// Maximum number of candidate rows examined across all workers.
    pub max_steps: u64,
}

pub const DEFAULT_MAX_STEPS: u64 = 5_000_000_000;

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            max_steps: DEFAULT_MAX_STEPS,
        }
    }
}

impl SearchConfig {
    pub fn with_jobs(jobs: usize) -> Self {
        SearchConfig {
            jobs: jobs.max(1),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum ScanError {
    Budget(u64),
    Arithmetic(LinalgError),
    Pool(String),
}

impl From<LinalgError> for ScanError {
    fn from(e: LinalgError) -> Self {
        ScanError::Arithmetic(e)
    }
}

pub(crate) struct Budget {
    used: AtomicU64,
    limit: u64,
}

impl Budget {
    pub(crate) fn new(limit: u64) -> Self {
        Budget {
            used: AtomicU64::new(0),
            limit,
        }
    }

    fn spend(&self, steps: u64) -> Result<(), ScanError> {
        let before = self.used.fetch_add(steps, Ordering::Relaxed);
        if before.saturating_add(steps) > self.limit {
            Err(ScanError::Budget(self.limit))
        } else {
            Ok(())
        }
    }
}

/// Runs `work` on every shard and concatenates the outputs in shard order.
pub(crate) fn run_shards<S, T, F>(
    cfg: &SearchConfig,
    shards: Vec<S>,
    work: F,
) -> Result<Vec<T>, ScanError>
where
    S: Send + Sync,
    T: Send,
    F: Fn(&S) -> Result<Vec<T>, ScanError> + Send + Sync,
{
    if cfg.jobs <= 1 || shards.len() <= 1 {
        let mut out = Vec::new();
        for s in &shards {
            out.extend(work(s)?);
        }
        return Ok(out);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| ScanError::Pool(e.to_string()))?;
    let parts: Vec<Result<Vec<T>, ScanError>> =
        pool.install(|| shards.par_iter().map(&work).collect());
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Rows with designated pivot columns, listed so that each row vanishes on
/// the pivot columns of every row after it.
struct EchelonSpan<'a> {
    rows: Vec<(&'a [i64], usize)>,
}

impl EchelonSpan<'_> {
    fn contains(&self, v: &[i64]) -> Result<bool, LinalgError> {
        let mut residual = v.to_vec();
        for &(row, p) in &self.rows {
            let x = residual[p];
            if x == 0 {
                continue;
            }
            if x % row[p] != 0 {
                return Ok(false);
            }
            let c = x / row[p];
            for (r, &b) in residual.iter_mut().zip(row) {
                *r = linalg::sub(*r, linalg::mul(c, b)?)?;
            }
        }
        Ok(residual.iter().all(|&x| x == 0))
    }

    /// Products of `new` with itself and with every row already present.
    fn closed_with(&self, new: &[i64], others: &[&[i64]]) -> Result<bool, LinalgError> {
        let mut prod = vec![0i64; new.len()];
        for other in std::iter::once(&new).chain(others) {
            for ((p, &a), &b) in prod.iter_mut().zip(new).zip(other.iter()) {
                *p = linalg::mul(a, b)?;
            }
            if !self.contains(&prod)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Ordered factorizations of `r` into `parts` positive factors.
pub(crate) fn ordered_factorizations(r: u64, parts: usize) -> Vec<Vec<u64>> {
    fn go(r: u64, parts: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if parts == 0 {
            if r == 1 {
                out.push(cur.clone());
            }
            return;
        }
        for d in (1..=r).filter(|d| r.is_multiple_of(*d)) {
            cur.push(d);
            go(r / d, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(r, parts, &mut Vec::new(), &mut out);
    out
}

/// Advances an odometer over `digits[i] ∈ [lo[i], hi[i]]`; false when exhausted.
fn advance(digits: &mut [i64], lo: &[i64], hi: &[i64]) -> bool {
    for i in (0..digits.len()).rev() {
        if digits[i] < hi[i] {
            digits[i] += 1;
            return true;
        }
        digits[i] = lo[i];
    }
    false
}

/// Upper-triangular Hermite bases with the given diagonal whose rows span a
/// multiplicative lattice. Rows are filled from the bottom up.
pub(crate) fn scan_full_rank(
    diag: &[u64],
    budget: &Budget,
) -> Result<Vec<Vec<Vec<i64>>>, ScanError> {
    let n = diag.len();
    let diag: Vec<i64> = diag.iter().map(|&d| d as i64).collect();
    let mut rows: Vec<Vec<i64>> = vec![vec![0; n]; n];
    let mut out = Vec::new();

    fn place(
        i: usize,
        diag: &[i64],
        rows: &mut Vec<Vec<i64>>,
        budget: &Budget,
        out: &mut Vec<Vec<Vec<i64>>>,
    ) -> Result<(), ScanError> {
        let n = diag.len();
        // slots j > i with a[i][j] ∈ [0, d_j)
        let lo = vec![0i64; n - i - 1];
        let hi: Vec<i64> = (i + 1..n).map(|j| diag[j] - 1).collect();
        let mut digits = lo.clone();
        loop {
            budget.spend(1)?;
            let mut row = vec![0i64; n];
            row[i] = diag[i];
            row[i + 1..].copy_from_slice(&digits);
            let span = EchelonSpan {
                rows: std::iter::once((row.as_slice(), i))
                    .chain((i + 1..n).map(|t| (rows[t].as_slice(), t)))
                    .collect(),
            };
            let below: Vec<&[i64]> = (i + 1..n).map(|t| rows[t].as_slice()).collect();
            if span.closed_with(&row, &below)? {
                drop(span);
                rows[i] = row;
                if i == 0 {
                    out.push(rows.clone());
                } else {
                    place(i - 1, diag, rows, budget, out)?;
                }
            }
            if !advance(&mut digits, &lo, &hi) {
                break;
            }
        }
        Ok(())
    }

    if n == 0 {
        out.push(Vec::new());
        return Ok(out);
    }
    place(n - 1, &diag, &mut rows, budget, &mut out)?;
    Ok(out)
}

/// One lower-echelon row: its last nonzero column and entries.
#[derive(Debug, Clone)]
pub(crate) struct LowerRow {
    pivot_col: usize,
    entries: Vec<i64>,
}

/// Shape of a reduced lower-echelon basis: row `i` ends at pivot column
/// `q_i` with a positive pivot, entries in earlier rows' pivot columns are
/// reduced into `[0, pivot)`, all other entries range over `[0, bound]`.
pub(crate) struct LowerScan {
    pub ambient: usize,
    pub rank: usize,
    pub bound: i64,
}

impl LowerScan {
    /// Candidate rows at position `i` after `prefix`, in a fixed order.
    fn candidates(
        &self,
        prefix: &[LowerRow],
        budget: &Budget,
        mut visit: impl FnMut(LowerRow) -> Result<(), ScanError>,
    ) -> Result<(), ScanError> {
        let i = prefix.len();
        let first = prefix.last().map_or(0, |r| r.pivot_col + 1);
        let last = self.ambient - self.rank + i;
        for q in first..=last {
            let mut lo = vec![0i64; q + 1];
            let mut hi = vec![self.bound; q + 1];
            for r in prefix {
                hi[r.pivot_col] = r.entries[r.pivot_col] - 1;
            }
            lo[q] = 1;
            let mut digits = lo.clone();
            loop {
                budget.spend(1)?;
                let mut entries = vec![0i64; self.ambient];
                entries[..=q].copy_from_slice(&digits);
                visit(LowerRow {
                    pivot_col: q,
                    entries,
                })?;
                if !advance(&mut digits, &lo, &hi) {
                    break;
                }
            }
        }
        Ok(())
    }

    fn admissible(prefix: &[LowerRow], row: &LowerRow) -> Result<bool, ScanError> {
        // processing order: newest row first, each later row vanishes on earlier pivots
        let span = EchelonSpan {
            rows: std::iter::once((row.entries.as_slice(), row.pivot_col))
                .chain(
                    prefix
                        .iter()
                        .rev()
                        .map(|r| (r.entries.as_slice(), r.pivot_col)),
                )
                .collect(),
        };
        let others: Vec<&[i64]> = prefix.iter().map(|r| r.entries.as_slice()).collect();
        Ok(span.closed_with(&row.entries, &others)?)
    }

    /// Admissible first rows; each seeds one shard.
    pub(crate) fn seeds(&self, budget: &Budget) -> Result<Vec<LowerRow>, ScanError> {
        let mut out = Vec::new();
        if self.rank == 0 {
            return Ok(out);
        }
        self.candidates(&[], budget, |row| {
            if Self::admissible(&[], &row)? {
                out.push(row);
            }
            Ok(())
        })?;
        Ok(out)
    }

    /// All admissible full bases extending `seed`.
    pub(crate) fn complete(
        &self,
        seed: &LowerRow,
        budget: &Budget,
    ) -> Result<Vec<Vec<Vec<i64>>>, ScanError> {
        let mut out = Vec::new();
        let mut prefix = vec![seed.clone()];
        self.extend(&mut prefix, budget, &mut out)?;
        Ok(out)
    }

    fn extend(
        &self,
        prefix: &mut Vec<LowerRow>,
        budget: &Budget,
        out: &mut Vec<Vec<Vec<i64>>>,
    ) -> Result<(), ScanError> {
        if prefix.len() == self.rank {
            out.push(prefix.iter().map(|r| r.entries.clone()).collect());
            return Ok(());
        }
        let mut next = Vec::new();
        self.candidates(prefix, budget, |row| {
            if Self::admissible(prefix, &row)? {
                next.push(row);
            }
            Ok(())
        })?;
        for row in next {
            prefix.push(row);
            self.extend(prefix, budget, out)?;
            prefix.pop();
        }
        Ok(())
    }
}
