//! Sublattices of `Z^n` with coordinatewise multiplication.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, echelon_rank, hermite_normal_form, IntMatrix, LinalgError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("vector of length {found} does not live in Z^{expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("lattice is not closed under coordinatewise multiplication")]
    NotMultiplicative,
    #[error("not a permutation of {0} letters")]
    BadPermutation(usize),
}

pub type Result<T> = std::result::Result<T, LatticeError>;

/// A sublattice of `Z^ambient`, stored by its canonical Hermite basis.
///
/// The basis holds exactly `rank` rows, so equal row spans compare equal.
/// `Z^0` is allowed; it is both the full and the zero lattice.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawLattice", into = "RawLattice")]
pub struct Lattice {
    ambient: usize,
    rank: usize,
    basis: IntMatrix,
}

#[derive(Serialize, Deserialize)]
struct RawLattice {
    ambient: usize,
    rank: usize,
    basis: Vec<Vec<i64>>,
}

impl From<Lattice> for RawLattice {
    fn from(l: Lattice) -> Self {
        RawLattice {
            ambient: l.ambient,
            rank: l.rank,
            basis: l.basis.to_rows(),
        }
    }
}

impl TryFrom<RawLattice> for Lattice {
    type Error = LatticeError;

    fn try_from(raw: RawLattice) -> Result<Self> {
        let l = Lattice::from_rows(raw.ambient, &raw.basis)?;
        if l.rank != raw.rank {
            return Err(LatticeError::DimensionMismatch {
                expected: raw.rank,
                found: l.rank,
            });
        }
        Ok(l)
    }
}

impl Lattice {
    /// The lattice spanned by `rows`; dependent generators are absorbed.
    pub fn from_rows<R: AsRef<[i64]>>(ambient: usize, rows: &[R]) -> Result<Self> {
        for row in rows {
            let len = row.as_ref().len();
            if len != ambient {
                return Err(LatticeError::DimensionMismatch {
                    expected: ambient,
                    found: len,
                });
            }
        }
        Self::from_matrix(&IntMatrix::with_cols(ambient, rows)?)
    }

    pub fn from_matrix(m: &IntMatrix) -> Result<Self> {
        let mut basis = hermite_normal_form(m)?;
        let rank = echelon_rank(&basis);
        basis.truncate_rows(rank);
        Ok(Lattice {
            ambient: m.cols(),
            rank,
            basis,
        })
    }

    pub fn full(ambient: usize) -> Self {
        Lattice {
            ambient,
            rank: ambient,
            basis: IntMatrix::identity(ambient),
        }
    }

    pub fn zero(ambient: usize) -> Self {
        Lattice {
            ambient,
            rank: 0,
            basis: IntMatrix::zeros(0, ambient),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn corank(&self) -> usize {
        self.ambient - self.rank
    }

    /// Canonical Hermite basis, `rank × ambient`.
    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn contains(&self, v: &[i64]) -> Result<bool> {
        if v.len() != self.ambient {
            return Err(LatticeError::DimensionMismatch {
                expected: self.ambient,
                found: v.len(),
            });
        }
        Ok(linalg::solve_in_row_span(&self.basis, v)?.is_some())
    }

    /// Closed under coordinatewise multiplication.
    ///
    /// Products of basis pairs suffice since the product is bilinear.
    pub fn is_multiplicative(&self) -> Result<bool> {
        for i in 0..self.rank {
            for j in i..self.rank {
                let p = pointwise_product(self.basis.row(i), self.basis.row(j))?;
                if !self.contains(&p)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Size of the torsion subgroup of `Z^ambient / L`.
    pub fn torsion_size(&self) -> Result<u64> {
        if self.rank == 0 {
            return Ok(1);
        }
        let mut size: u64 = 1;
        for d in linalg::smith_normal_form(&self.basis)? {
            if d != 0 {
                size = size
                    .checked_mul(d.unsigned_abs())
                    .ok_or(LinalgError::Overflow)?;
            }
        }
        Ok(size)
    }

    pub fn distinct_nonzero_columns(&self) -> usize {
        self.basis.distinct_nonzero_columns()
    }

    /// For a multiplicative lattice, whether the basis has exactly `rank`
    /// distinct nonzero columns.
    pub fn rigidity_check(&self) -> Result<bool> {
        if !self.is_multiplicative()? {
            return Err(LatticeError::NotMultiplicative);
        }
        Ok(self.distinct_nonzero_columns() == self.rank)
    }

    /// A basis `M` with `M[i][j] = 0` whenever `j - i > corank`.
    ///
    /// Computed as the Hermite form of the column-reversed basis, reversed
    /// back, with row order flipped; each row's last nonzero column then
    /// sits at or before `i + corank`.
    pub fn echelon_lower(&self) -> Result<IntMatrix> {
        let reversed: Vec<Vec<i64>> = self
            .basis
            .row_iter()
            .map(|r| r.iter().rev().copied().collect())
            .collect();
        let h = hermite_normal_form(&IntMatrix::with_cols(self.ambient, &reversed)?)?;
        let rows: Vec<Vec<i64>> = h
            .row_iter()
            .rev()
            .map(|r| r.iter().rev().copied().collect())
            .collect();
        Ok(IntMatrix::with_cols(self.ambient, &rows)?)
    }

    /// Image under `x ↦ (x_{perm[0]}, …, x_{perm[n-1]})`.
    pub fn permute_coordinates(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.ambient)?;
        let rows: Vec<Vec<i64>> = self
            .basis
            .row_iter()
            .map(|r| perm.iter().map(|&p| r[p]).collect())
            .collect();
        Lattice::from_rows(self.ambient, &rows)
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(LatticeError::BadPermutation(n));
    }
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(LatticeError::BadPermutation(n));
        }
    }
    Ok(())
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice(Z^{}, {:?})", self.ambient, self.basis)
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.basis)
    }
}

pub fn pointwise_product(u: &[i64], v: &[i64]) -> Result<Vec<i64>> {
    if u.len() != v.len() {
        return Err(LatticeError::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    u.iter()
        .zip(v)
        .map(|(&a, &b)| linalg::mul(a, b).map_err(LatticeError::from))
        .collect()
}
