//! Exact integer matrix kernels.
//!
//! Every arithmetic step is checked: an overflow of `i64` aborts the
//! computation with [`LinalgError::Overflow`] instead of wrapping.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("matrix must have at least one row and one column")]
    EmptyShape,
    #[error("row {row} has length {found}, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("vector length {found} does not match {expected} columns")]
    LengthMismatch { expected: usize, found: usize },
    #[error("matrix is not in row echelon form")]
    NotEchelon,
}

pub type Result<T> = std::result::Result<T, LinalgError>;

pub(crate) fn add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(LinalgError::Overflow)
}

pub(crate) fn mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(LinalgError::Overflow)
}

pub(crate) fn sub(a: i64, b: i64) -> Result<i64> {
    a.checked_sub(b).ok_or(LinalgError::Overflow)
}

/// `row[..] -= factor * pivot[..]`
fn axpy(row: &mut [i64], factor: i64, pivot: &[i64]) -> Result<()> {
    if factor == 0 {
        return Ok(());
    }
    for (x, &p) in row.iter_mut().zip(pivot) {
        *x = sub(*x, mul(factor, p)?)?;
    }
    Ok(())
}

fn negate(row: &mut [i64]) -> Result<()> {
    for x in row.iter_mut() {
        *x = x.checked_neg().ok_or(LinalgError::Overflow)?;
    }
    Ok(())
}

/// Dense row-major matrix of exact integers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    /// Builds a matrix from rows; at least one row and one column are required.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        if rows.is_empty() || cols == 0 {
            return Err(LinalgError::EmptyShape);
        }
        Self::with_cols(cols, rows)
    }

    /// Builds a matrix with a known column count, permitting zero rows.
    ///
    /// Zero-row matrices only arise as the basis of the zero lattice.
    pub fn with_cols<R: AsRef<[i64]>>(cols: usize, rows: &[R]) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(LinalgError::RaggedRow {
                    row: i,
                    expected: cols,
                    found: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    pub fn diagonal(diag: &[i64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * n + i] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl DoubleEndedIterator<Item = &[i64]> + ExactSizeIterator + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.row_iter().map(<[i64]>::to_vec).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    /// Keeps the first `n` rows.
    pub fn truncate_rows(&mut self, n: usize) {
        let n = n.min(self.rows);
        self.entries.truncate(n * self.cols);
        self.rows = n;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(LinalgError::LengthMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.entries[idx] = add(out.entries[idx], mul(a, other.get(k, j))?)?;
                }
            }
        }
        Ok(out)
    }

    /// `c · self` for a row vector `c`.
    pub fn left_mul_vector(&self, c: &[i64]) -> Result<Vec<i64>> {
        if c.len() != self.rows {
            return Err(LinalgError::LengthMismatch {
                expected: self.rows,
                found: c.len(),
            });
        }
        let mut out = vec![0i64; self.cols];
        for (row, &ci) in self.row_iter().zip(c) {
            for (o, &x) in out.iter_mut().zip(row) {
                *o = add(*o, mul(ci, x)?)?;
            }
        }
        Ok(out)
    }

    /// Number of distinct columns that are not identically zero.
    pub fn distinct_nonzero_columns(&self) -> usize {
        let mut cols: Vec<Vec<i64>> = (0..self.cols)
            .map(|j| self.column(j))
            .filter(|c| c.iter().any(|&x| x != 0))
            .collect();
        cols.sort_unstable();
        cols.dedup();
        cols.len()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// `row[target] += factor * row[source]`
    pub fn add_row_multiple(&mut self, target: usize, source: usize, factor: i64) -> Result<()> {
        assert_ne!(target, source);
        for j in 0..self.cols {
            let v = add(self.get(target, j), mul(factor, self.get(source, j))?)?;
            self.entries[target * self.cols + j] = v;
        }
        Ok(())
    }

    pub fn negate_row(&mut self, i: usize) -> Result<()> {
        let cols = self.cols;
        negate(&mut self.entries[i * cols..(i + 1) * cols])
    }

    fn row_vecs(&self) -> Vec<Vec<i64>> {
        self.to_rows()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.row_iter()).finish()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.row_iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(deserializer)?;
        IntMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Row-style Hermite normal form of the integer row span of `m`.
///
/// Pivots are positive, entries above a pivot lie in `[0, pivot)`, and zero
/// rows are moved to the bottom. The output has the same shape as `m`.
pub fn hermite_normal_form(m: &IntMatrix) -> Result<IntMatrix> {
    let mut rows = m.row_vecs();
    let ncols = m.cols();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == rows.len() {
            break;
        }
        // Euclid on the column below `rank` until a single nonzero entry remains.
        loop {
            let pivot = (rank..rows.len())
                .filter(|&i| rows[i][col] != 0)
                .min_by_key(|&i| rows[i][col].unsigned_abs());
            let Some(p) = pivot else { break };
            rows.swap(rank, p);
            let (head, tail) = rows.split_at_mut(rank + 1);
            let prow = &head[rank];
            let mut done = true;
            for row in tail.iter_mut() {
                if row[col] != 0 {
                    let q = row[col].div_euclid(prow[col]);
                    axpy(row, q, prow)?;
                    if row[col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if rows[rank][col] == 0 {
            continue;
        }
        if rows[rank][col] < 0 {
            negate(&mut rows[rank])?;
        }
        let (head, tail) = rows.split_at_mut(rank);
        let prow = &tail[0];
        for row in head.iter_mut() {
            let q = row[col].div_euclid(prow[col]);
            axpy(row, q, prow)?;
        }
        rank += 1;
    }
    IntMatrix::with_cols(ncols, &rows)
}

/// Number of nonzero rows of a matrix in echelon form.
pub fn echelon_rank(h: &IntMatrix) -> usize {
    h.row_iter().filter(|r| r.iter().any(|&x| x != 0)).count()
}

/// Smith normal form diagonal `d_1 | d_2 | …`, of length `min(rows, cols)`.
///
/// Entries are nonnegative; trailing zeros mark rank deficiency.
pub fn smith_normal_form(m: &IntMatrix) -> Result<Vec<i64>> {
    let nrows = m.rows();
    let ncols = m.cols();
    let mut a = m.row_vecs();
    let len = nrows.min(ncols);
    let mut diag = Vec::with_capacity(len);

    for t in 0..len {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        let pick = |a: &Vec<Vec<i64>>| {
            let mut best: Option<(usize, usize)> = None;
            for i in t..nrows {
                for j in t..ncols {
                    if a[i][j] != 0
                        && best.is_none_or(|(bi, bj)| {
                            a[i][j].unsigned_abs() < a[bi][bj].unsigned_abs()
                        })
                    {
                        best = Some((i, j));
                    }
                }
            }
            best
        };
        let Some((pi, pj)) = pick(&a) else {
            diag.resize(len, 0);
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }

        loop {
            let p = a[t][t];
            let mut dirty = false;
            for i in t + 1..nrows {
                if a[i][t] != 0 {
                    let q = a[i][t].div_euclid(p);
                    let (head, tail) = a.split_at_mut(i);
                    axpy(&mut tail[0], q, &head[t])?;
                    if a[i][t] != 0 {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..ncols {
                if a[t][j] != 0 {
                    let q = a[t][j].div_euclid(p);
                    for row in a.iter_mut() {
                        row[j] = sub(row[j], mul(q, row[t])?)?;
                    }
                    if a[t][j] != 0 {
                        dirty = true;
                    }
                }
            }
            if !dirty {
                // Divisibility: fold any offending row into the pivot row.
                let offender = (t + 1..nrows).find(|&i| (t + 1..ncols).any(|j| a[i][j] % p != 0));
                match offender {
                    None => break,
                    Some(i) => {
                        let (head, tail) = a.split_at_mut(i);
                        let src = tail[0].clone();
                        let dst = &mut head[t];
                        for (x, y) in dst.iter_mut().zip(&src) {
                            *x = add(*x, *y)?;
                        }
                        continue;
                    }
                }
            }
            // Move the smallest remaining entry of row/column t to the pivot.
            let mut best = (t, t);
            for i in t..nrows {
                if a[i][t] != 0 && a[i][t].unsigned_abs() < a[best.0][best.1].unsigned_abs() {
                    best = (i, t);
                }
            }
            for j in t..ncols {
                if a[t][j] != 0 && a[t][j].unsigned_abs() < a[best.0][best.1].unsigned_abs() {
                    best = (t, j);
                }
            }
            a.swap(t, best.0);
            for row in a.iter_mut() {
                row.swap(t, best.1);
            }
        }
        diag.push(a[t][t].checked_abs().ok_or(LinalgError::Overflow)?);
    }
    Ok(diag)
}

/// Integer coefficients `c` with `c · h = v`, or `None` when `v` is outside the
/// integer row span of `h`.
///
/// `h` must be in row echelon form (as produced by [`hermite_normal_form`]);
/// zero rows receive coefficient 0.
pub fn solve_in_row_span(h: &IntMatrix, v: &[i64]) -> Result<Option<Vec<i64>>> {
    if v.len() != h.cols() {
        return Err(LinalgError::LengthMismatch {
            expected: h.cols(),
            found: v.len(),
        });
    }
    let mut pivots = Vec::with_capacity(h.rows());
    let mut seen_zero_row = false;
    for row in h.row_iter() {
        match row.iter().position(|&x| x != 0) {
            None => seen_zero_row = true,
            Some(p) => {
                if seen_zero_row || pivots.last().is_some_and(|&(_, lp)| p <= lp) {
                    return Err(LinalgError::NotEchelon);
                }
                pivots.push((pivots.len(), p));
            }
        }
    }
    let mut residual = v.to_vec();
    let mut coeffs = vec![0i64; h.rows()];
    for (i, p) in pivots {
        let row = h.row(i);
        // everything left of this pivot is already cleared by earlier rows
        if residual[..p].iter().any(|&x| x != 0) || residual[p] % row[p] != 0 {
            return Ok(None);
        }
        let c = residual[p] / row[p];
        axpy(&mut residual, c, row)?;
        coeffs[i] = c;
    }
    if residual.iter().any(|&x| x != 0) {
        return Ok(None);
    }
    Ok(Some(coeffs))
}
