//! Second, independent routes to membership and torsion.
//!
//! Enumeration results are re-verified here without going through the
//! back-substitution of [`crate::linalg::solve_in_row_span`] or the Smith
//! form: membership is "appending the vector leaves the Hermite form
//! unchanged", and torsion is the gcd of the maximal minors.

use crate::lattice::Lattice;
use crate::linalg::{self, hermite_normal_form, IntMatrix, LinalgError};

/// `v ∈ L` iff the row span of `basis ∪ {v}` is the row span of `basis`.
pub fn contains_by_extension(l: &Lattice, v: &[i64]) -> Result<bool, LinalgError> {
    let mut rows = l.basis().to_rows();
    rows.push(v.to_vec());
    let mut h = hermite_normal_form(&IntMatrix::with_cols(l.ambient_dim(), &rows)?)?;
    if h.row(l.rank()).iter().any(|&x| x != 0) {
        return Ok(false);
    }
    h.truncate_rows(l.rank());
    Ok(&h == l.basis())
}

pub fn is_multiplicative_by_extension(l: &Lattice) -> Result<bool, LinalgError> {
    let b = l.basis();
    for i in 0..l.rank() {
        for j in i..l.rank() {
            let p: Vec<i64> = b
                .row(i)
                .iter()
                .zip(b.row(j))
                .map(|(&x, &y)| linalg::mul(x, y))
                .collect::<Result<_, _>>()?;
            if !contains_by_extension(l, &p)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Fraction-free (Bareiss) determinant.
pub fn determinant(m: &[Vec<i64>]) -> Result<i64, LinalgError> {
    let n = m.len();
    if n == 0 {
        return Ok(1);
    }
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(s) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return Ok(0);
            };
            a.swap(k, s);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j]
                    .checked_mul(a[k][k])
                    .and_then(|x| x.checked_sub(a[i][k].checked_mul(a[k][j])?))
                    .ok_or(LinalgError::Overflow)?;
                a[i][j] = num / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    i64::try_from(sign * a[n - 1][n - 1]).map_err(|_| LinalgError::Overflow)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Torsion of `Z^n / L` as the gcd of all `rank × rank` minors of the basis.
pub fn torsion_by_minors(l: &Lattice) -> Result<u64, LinalgError> {
    let rank = l.rank();
    if rank == 0 {
        return Ok(1);
    }
    let b = l.basis();
    let mut g = 0u64;
    for cols in combinations(l.ambient_dim(), rank) {
        let minor: Vec<Vec<i64>> = (0..rank)
            .map(|i| cols.iter().map(|&j| b.get(i, j)).collect())
            .collect();
        g = gcd(g, determinant(&minor)?.unsigned_abs());
        if g == 1 {
            break;
        }
    }
    Ok(g)
}
