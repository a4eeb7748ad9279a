//! Set partitions, Stirling numbers of the second kind, and acceptable maps.
//!
//! A partition of `{0, …, n+k}` into `n + 1` blocks corresponds to exactly
//! one ordered acceptable map `Z^n → Z^{n+k}`: the block holding `0` marks
//! the zero coordinates, and block `i` lists the target coordinates that copy
//! source coordinate `i`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{self, Lattice, LatticeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("blocks do not partition {{0, …, {0}}}")]
    NotAPartition(usize),
    #[error("expected {expected} blocks, found {found}")]
    BlockCount { expected: usize, found: usize },
    #[error("source coordinate {0} is never used, so the map is not injective")]
    NotInjective(usize),
    #[error("assignment refers to source coordinate {index} of a {dim}-dimensional source")]
    SourceOutOfRange { index: usize, dim: usize },
    #[error("target dimension {target_dim} is smaller than source dimension {source_dim}")]
    TargetTooSmall {
        source_dim: usize,
        target_dim: usize,
    },
    #[error("cannot parse assignment: {0}")]
    Parse(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

pub type Result<T> = std::result::Result<T, PartitionError>;

/// `S(u, v)`: partitions of a `u`-set into `v` nonempty blocks.
///
/// # Panics
/// When the value exceeds `u128` (first happens well past `u = 100`).
pub fn stirling2(u: usize, v: usize) -> u128 {
    if v > u {
        return 0;
    }
    // row[j] = S(i, j), rolled forward one i at a time
    let mut row = vec![0u128; v + 1];
    row[0] = 1;
    for i in 1..=u {
        for j in (1..=v.min(i)).rev() {
            row[j] = (j as u128)
                .checked_mul(row[j])
                .and_then(|x| x.checked_add(row[j - 1]))
                .expect("Stirling number overflows u128");
        }
        row[0] = 0;
    }
    row[v]
}

/// Partition of `{0, …, ground_size - 1}` with blocks sorted by minimum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct SetPartition {
    ground_size: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Validates and normalizes (sorts elements and blocks).
    pub fn new(ground_size: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; ground_size];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(PartitionError::NotAPartition(ground_size.saturating_sub(1)));
            }
            block.sort_unstable();
            for &x in block.iter() {
                if x >= ground_size || std::mem::replace(&mut seen[x], true) {
                    return Err(PartitionError::NotAPartition(ground_size.saturating_sub(1)));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(PartitionError::NotAPartition(ground_size.saturating_sub(1)));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(SetPartition {
            ground_size,
            blocks,
        })
    }

    /// From a restricted growth string: `rgs[x]` is the block index of `x`.
    pub fn from_rgs(rgs: &[usize]) -> Self {
        let count = rgs.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); count];
        for (x, &b) in rgs.iter().enumerate() {
            blocks[b].push(x);
        }
        SetPartition {
            ground_size: rgs.len(),
            blocks,
        }
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn to_rgs(&self) -> Vec<usize> {
        let mut rgs = vec![0; self.ground_size];
        for (b, block) in self.blocks.iter().enumerate() {
            for &x in block {
                rgs[x] = b;
            }
        }
        rgs
    }
}

impl TryFrom<Vec<Vec<usize>>> for SetPartition {
    type Error = PartitionError;

    fn try_from(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let ground = blocks.iter().map(Vec::len).sum();
        SetPartition::new(ground, blocks)
    }
}

impl From<SetPartition> for Vec<Vec<usize>> {
    fn from(p: SetPartition) -> Self {
        p.blocks
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, x) in block.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

/// All partitions of `{0, …, ground_size - 1}` into `block_count` blocks, in
/// lexicographic order of their restricted growth strings.
pub fn enumerate_partitions(ground_size: usize, block_count: usize) -> Vec<SetPartition> {
    let mut out = Vec::new();
    if block_count > ground_size || (block_count == 0 && ground_size > 0) {
        return out;
    }
    let mut rgs = vec![0usize; ground_size];
    fn extend(
        rgs: &mut [usize],
        pos: usize,
        used: usize,
        want: usize,
        out: &mut Vec<SetPartition>,
    ) {
        if pos == rgs.len() {
            if used == want {
                out.push(SetPartition::from_rgs(rgs));
            }
            return;
        }
        // enough positions must remain to open the missing blocks
        let remaining = rgs.len() - pos;
        let lo = if want - used >= remaining { used } else { 0 };
        let hi = (used + 1).min(want);
        for b in lo..hi {
            rgs[pos] = b;
            extend(rgs, pos + 1, used.max(b + 1), want, out);
        }
    }
    if ground_size == 0 {
        out.push(SetPartition::from_rgs(&[]));
        return out;
    }
    rgs[0] = 0;
    extend(&mut rgs, 1, 1, block_count, &mut out);
    out
}

/// A map `Z^n → Z^{n+k}` whose target coordinates each copy a source
/// coordinate or are zero.
///
/// `assignment[j]` is `Some(i)` when target coordinate `j` copies source
/// coordinate `i` (both 0-based), `None` when it is zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AcceptableMap {
    source_dim: usize,
    assignment: Vec<Option<usize>>,
}

impl AcceptableMap {
    pub fn new(source_dim: usize, assignment: Vec<Option<usize>>) -> Result<Self> {
        if assignment.len() < source_dim {
            return Err(PartitionError::TargetTooSmall {
                source_dim,
                target_dim: assignment.len(),
            });
        }
        let mut used = vec![false; source_dim];
        for &a in assignment.iter().flatten() {
            if a >= source_dim {
                return Err(PartitionError::SourceOutOfRange {
                    index: a,
                    dim: source_dim,
                });
            }
            used[a] = true;
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(PartitionError::NotInjective(i));
        }
        Ok(AcceptableMap {
            source_dim,
            assignment,
        })
    }

    pub fn identity(n: usize) -> Self {
        AcceptableMap {
            source_dim: n,
            assignment: (0..n).map(Some).collect(),
        }
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.assignment.len()
    }

    pub fn corank(&self) -> usize {
        self.target_dim() - self.source_dim
    }

    pub fn assignment(&self) -> &[Option<usize>] {
        &self.assignment
    }

    /// Ordered: the first target position of source `i` increases with `i`.
    pub fn is_ordered(&self) -> bool {
        let mins = self.first_positions();
        mins.windows(2).all(|w| w[0] < w[1])
    }

    fn first_positions(&self) -> Vec<usize> {
        let mut mins = vec![usize::MAX; self.source_dim];
        for (j, a) in self.assignment.iter().enumerate() {
            if let Some(i) = *a {
                mins[i] = mins[i].min(j);
            }
        }
        mins
    }

    /// `g ∘ τ` where `τ` acts on the source by `(τx)_i = x_{perm[i]}`.
    ///
    /// A target coordinate that copied `x_i` now copies `x_{perm[i]}`.
    pub fn compose_permutation(&self, perm: &[usize]) -> Result<Self> {
        lattice::check_permutation(perm, self.source_dim)?;
        Ok(AcceptableMap {
            source_dim: self.source_dim,
            assignment: self.assignment.iter().map(|a| a.map(|i| perm[i])).collect(),
        })
    }

    /// Evaluates the map on a source vector.
    pub fn apply_vector(&self, x: &[i64]) -> Vec<i64> {
        assert_eq!(x.len(), self.source_dim);
        self.assignment
            .iter()
            .map(|a| a.map_or(0, |i| x[i]))
            .collect()
    }
}

fn source_name(i: usize) -> String {
    if i < 26 {
        char::from(b'a' + i as u8).to_string()
    } else {
        format!("x{}", i + 1)
    }
}

fn parse_source_name(s: &str) -> Option<usize> {
    match s.as_bytes() {
        [c @ b'a'..=b'z'] => Some((c - b'a') as usize),
        [b'x', rest @ ..] if !rest.is_empty() => std::str::from_utf8(rest)
            .ok()?
            .parse::<usize>()
            .ok()
            .filter(|&k| k >= 1)
            .map(|k| k - 1),
        _ => None,
    }
}

/// `a,b,0,0,a,c,b,b`: letters name source coordinates, `0` a zero coordinate.
impl fmt::Display for AcceptableMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, a) in self.assignment.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            match a {
                Some(i) => write!(f, "{}", source_name(*i))?,
                None => write!(f, "0")?,
            }
        }
        Ok(())
    }
}

impl FromStr for AcceptableMap {
    type Err = PartitionError;

    /// The source dimension is the number of distinct names used; the empty
    /// string is the map `Z^0 → Z^0`.
    fn from_str(s: &str) -> Result<Self> {
        let mut assignment = Vec::new();
        let s = s.trim();
        for tok in s.split(',').map(str::trim).filter(|_| !s.is_empty()) {
            if tok == "0" {
                assignment.push(None);
            } else {
                let i = parse_source_name(tok)
                    .ok_or_else(|| PartitionError::Parse(format!("bad coordinate {tok:?}")))?;
                assignment.push(Some(i));
            }
        }
        let dim = assignment.iter().flatten().max().map_or(0, |m| m + 1);
        AcceptableMap::new(dim, assignment)
    }
}

impl TryFrom<String> for AcceptableMap {
    type Error = PartitionError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<AcceptableMap> for String {
    fn from(g: AcceptableMap) -> Self {
        g.to_string()
    }
}

/// Ordered acceptable map for a partition of `{0, …, n+k}` into `n+1` blocks.
pub fn partition_to_map(p: &SetPartition, source_dim: usize) -> Result<AcceptableMap> {
    if p.block_count() != source_dim + 1 {
        return Err(PartitionError::BlockCount {
            expected: source_dim + 1,
            found: p.block_count(),
        });
    }
    let target_dim = p.ground_size() - 1;
    let mut assignment = vec![None; target_dim];
    for (b, block) in p.blocks().iter().enumerate().skip(1) {
        for &x in block {
            assignment[x - 1] = Some(b - 1);
        }
    }
    AcceptableMap::new(source_dim, assignment)
}

/// `{A_0 ∪ {0}, A_1, …, A_n}` with target coordinates shifted to `1..=n+k`.
pub fn map_to_partition(g: &AcceptableMap) -> SetPartition {
    let mut blocks = vec![Vec::new(); g.source_dim() + 1];
    blocks[0].push(0);
    for (j, a) in g.assignment().iter().enumerate() {
        blocks[a.map_or(0, |i| i + 1)].push(j + 1);
    }
    blocks.sort_unstable_by_key(|b| b[0]);
    SetPartition {
        ground_size: g.target_dim() + 1,
        blocks,
    }
}

/// The ordered representative `g ∘ τ` of `g` together with `τ`.
///
/// `τ` is returned in the convention of
/// [`AcceptableMap::compose_permutation`]; it is the identity iff `g` is
/// already ordered.
pub fn order_map(g: &AcceptableMap) -> (AcceptableMap, Vec<usize>) {
    let mins = g.first_positions();
    let mut by_first: Vec<usize> = (0..g.source_dim()).collect();
    by_first.sort_by_key(|&i| mins[i]);
    // source `by_first[r]` is relabelled `r`
    let mut perm = vec![0; g.source_dim()];
    for (rank, &i) in by_first.iter().enumerate() {
        perm[i] = rank;
    }
    let ordered = g
        .compose_permutation(&perm)
        .expect("ranks form a permutation");
    (ordered, perm)
}

/// Image `g(L)` of a lattice in the source of `g`.
pub fn apply_map(g: &AcceptableMap, l: &Lattice) -> Result<Lattice> {
    if l.ambient_dim() != g.source_dim() {
        return Err(LatticeError::DimensionMismatch {
            expected: g.source_dim(),
            found: l.ambient_dim(),
        }
        .into());
    }
    let rows: Vec<Vec<i64>> = l.basis().row_iter().map(|r| g.apply_vector(r)).collect();
    Ok(Lattice::from_rows(g.target_dim(), &rows)?)
}

/// One ordered acceptable map per equivalence class, in partition order.
pub fn enumerate_ordered_maps(source_dim: usize, target_dim: usize) -> Vec<AcceptableMap> {
    if target_dim < source_dim {
        return Vec::new();
    }
    enumerate_partitions(target_dim + 1, source_dim + 1)
        .iter()
        .map(|p| partition_to_map(p, source_dim).expect("block count matches"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(blocks: &[&[usize]]) -> SetPartition {
        let ground = blocks.iter().map(|b| b.len()).sum();
        SetPartition::new(ground, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    fn brute_partition_count(u: usize, v: usize) -> u128 {
        // every function {0..u} -> {0..v} that is a restricted growth string
        let mut count = 0;
        let total = v.pow(u as u32);
        for code in 0..total {
            let mut c = code;
            let mut max_seen: Option<usize> = None;
            let mut ok = true;
            for _ in 0..u {
                let b = c % v;
                c /= v;
                let next = max_seen.map_or(0, |m| m + 1);
                if b > next {
                    ok = false;
                    break;
                }
                max_seen = Some(max_seen.map_or(b, |m| m.max(b)));
            }
            if ok && max_seen == Some(v - 1) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn stirling_examples() {
        for u in 0..10 {
            assert_eq!(stirling2(u, u), 1);
        }
        for u in 1..10 {
            assert_eq!(stirling2(u, 1), 1);
            assert_eq!(stirling2(u, 0), 0);
        }
        assert_eq!(stirling2(0, 3), 0);
        assert_eq!(stirling2(4, 3), 6);
        assert_eq!(stirling2(5, 3), 25);
        assert_eq!(brute_partition_count(4, 3), 6);
        assert_eq!(brute_partition_count(5, 3), 25);
    }

    #[test]
    fn stirling_matches_brute_force() {
        for u in 1..=8 {
            for v in 1..=u {
                assert_eq!(stirling2(u, v), brute_partition_count(u, v), "S({u},{v})");
            }
        }
    }

    #[test]
    fn enumerate_small() {
        let ps = enumerate_partitions(3, 2);
        let rgs: Vec<_> = ps.iter().map(|p| p.to_rgs()).collect();
        assert_eq!(rgs, vec![vec![0, 0, 1], vec![0, 1, 0], vec![0, 1, 1]]);
        assert_eq!(ps[2], part(&[&[0], &[1, 2]]));
        assert_eq!(ps[0], part(&[&[0, 1], &[2]]));
        assert_eq!(ps[1], part(&[&[0, 2], &[1]]));

        let one = enumerate_partitions(4, 1);
        assert_eq!(one, vec![part(&[&[0, 1, 2, 3]])]);
        assert_eq!(enumerate_partitions(5, 3).len(), 25);
        assert!(enumerate_partitions(2, 3).is_empty());
        assert_eq!(enumerate_partitions(0, 0).len(), 1);
    }

    #[test]
    fn rgs_order_is_strictly_increasing() {
        let ps = enumerate_partitions(7, 3);
        for w in ps.windows(2) {
            assert!(w[0].to_rgs() < w[1].to_rgs());
        }
    }

    #[test]
    fn partition_validation() {
        assert!(SetPartition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(SetPartition::new(3, vec![vec![0, 1]]).is_err());
        assert!(SetPartition::new(3, vec![vec![0, 1, 2], vec![]]).is_err());
        let p = SetPartition::new(3, vec![vec![2, 1], vec![0]]).unwrap();
        assert_eq!(p.blocks(), &[vec![0], vec![1, 2]]);
    }

    #[test]
    fn worked_example_round_trip() {
        let p = part(&[&[0, 3, 4], &[1, 5], &[2, 7, 8], &[6]]);
        let g = partition_to_map(&p, 3).unwrap();
        assert_eq!(g.to_string(), "a,b,0,0,a,c,b,b");
        assert_eq!(map_to_partition(&g), p);

        let g: AcceptableMap = "a,b,0,0,a,c,b,b".parse().unwrap();
        assert_eq!(
            g.apply_vector(&[10, 20, 30]),
            vec![10, 20, 0, 0, 10, 30, 20, 20]
        );
    }

    #[test]
    fn empty_map_round_trips() {
        let g = AcceptableMap::identity(0);
        assert_eq!(g.to_string(), "");
        assert_eq!("".parse::<AcceptableMap>().unwrap(), g);
        assert!(",".parse::<AcceptableMap>().is_err());
    }

    #[test]
    fn identity_and_doubling_maps() {
        let p = part(&[&[0], &[1], &[2], &[3]]);
        assert_eq!(partition_to_map(&p, 3).unwrap(), AcceptableMap::identity(3));
        assert_eq!(map_to_partition(&AcceptableMap::identity(3)), p);

        let p = part(&[&[0], &[1, 2], &[3, 4]]);
        assert_eq!(partition_to_map(&p, 2).unwrap().to_string(), "a,a,b,b");
        assert!(matches!(
            partition_to_map(&p, 3),
            Err(PartitionError::BlockCount {
                expected: 4,
                found: 3
            })
        ));
    }

    #[test]
    fn unordered_map_to_partition() {
        // (x,y) ↦ (y,x,0,x)
        let g: AcceptableMap = "b,a,0,a".parse().unwrap();
        assert_eq!(map_to_partition(&g), part(&[&[0, 3], &[1], &[2, 4]]));
    }

    #[test]
    fn order_map_examples() {
        let g: AcceptableMap = "b,a,0,a".parse().unwrap();
        let (ordered, tau) = order_map(&g);
        assert_eq!(ordered.to_string(), "a,b,0,b");
        assert_eq!(tau, vec![1, 0]);
        assert!(!g.is_ordered());
        assert!(ordered.is_ordered());

        let id = AcceptableMap::identity(4);
        assert_eq!(order_map(&id), (id.clone(), vec![0, 1, 2, 3]));

        let f2: AcceptableMap = "a,b,b,0".parse().unwrap();
        assert_eq!(order_map(&f2), (f2.clone(), vec![0, 1]));
    }

    #[test]
    fn map_validation() {
        assert!(matches!(
            AcceptableMap::new(2, vec![Some(0), None, Some(0)]),
            Err(PartitionError::NotInjective(1))
        ));
        assert!(AcceptableMap::new(1, vec![Some(1)]).is_err());
        assert!(AcceptableMap::new(3, vec![Some(0)]).is_err());
        assert!("a,q?,0".parse::<AcceptableMap>().is_err());
        let mut a: Vec<Option<usize>> = (0..27).map(Some).collect();
        a.push(None);
        let wide = AcceptableMap::new(27, a).unwrap();
        let text = wide.to_string();
        assert!(text.contains("x27"));
        assert_eq!(text.parse::<AcceptableMap>().unwrap(), wide);
    }

    #[test]
    fn apply_map_examples() {
        let l = Lattice::from_rows(2, &[[2, 0], [0, 3]]).unwrap();
        assert_eq!(apply_map(&AcceptableMap::identity(2), &l).unwrap(), l);

        let g: AcceptableMap = "a,a,b,b".parse().unwrap();
        let img = apply_map(&g, &l).unwrap();
        assert_eq!(
            img,
            Lattice::from_rows(4, &[[2, 2, 0, 0], [0, 0, 3, 3]]).unwrap()
        );

        let g: AcceptableMap = "a,b,b,0".parse().unwrap();
        let img = apply_map(&g, &l).unwrap();
        assert_eq!(
            img,
            Lattice::from_rows(4, &[[2, 0, 0, 0], [0, 3, 3, 0]]).unwrap()
        );
        assert_eq!(img.torsion_size().unwrap(), 6);

        assert!(apply_map(&AcceptableMap::identity(3), &l).is_err());
    }

    #[test]
    fn ordered_map_examples() {
        let maps: Vec<String> = enumerate_ordered_maps(1, 2)
            .iter()
            .map(ToString::to_string)
            .collect();
        // RGS 001 → {0,1},{2}; 010 → {0,2},{1}; 011 → {0},{1,2}
        assert_eq!(maps, vec!["0,a", "a,0", "a,a"]);
        assert_eq!(
            enumerate_ordered_maps(3, 3),
            vec![AcceptableMap::identity(3)]
        );
        assert_eq!(enumerate_ordered_maps(2, 4).len(), 25);
        assert!(enumerate_ordered_maps(2, 4)
            .iter()
            .all(AcceptableMap::is_ordered));
    }

    #[test]
    fn serde_forms() {
        let g: AcceptableMap = "a,b,0,0,a,c,b,b".parse().unwrap();
        assert_eq!(serde_json::to_string(&g).unwrap(), "\"a,b,0,0,a,c,b,b\"");
        let p = part(&[&[0, 3, 4], &[1, 5], &[2, 7, 8], &[6]]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[[0,3,4],[1,5],[2,7,8],[6]]");
        assert_eq!(serde_json::from_str::<SetPartition>(&s).unwrap(), p);
        assert_eq!(p.to_string(), "{{0,3,4},{1,5},{2,7,8},{6}}");
    }
}
