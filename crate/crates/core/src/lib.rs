//! Exact counting of multiplicative sublattices of `Z^n`.
//!
//! A sublattice is multiplicative when it is closed under coordinatewise
//! multiplication. This crate counts them by rank, co-rank and torsion size:
//!
//! * `φ_n(r)` — full-rank multiplicative sublattices of `Z^n` of index `r`,
//! * `f_n(r)` — those that also contain `(1, …, 1)`,
//! * `φ_{n,k}(r)` — co-rank `k` multiplicative sublattices whose quotient has
//!   torsion of size `r`.
//!
//! Co-rank counts are computed both by a brute-force scan of echelon bases
//! and by the closed formula `φ_{n+k,k}(r) = S(n+k+1, n+1) · φ_n(r)`, and
//! [`enumeration::verify_main_theorem`] checks that the two agree.

pub mod cache;
pub mod cli;
pub mod enumeration;
pub mod independent;
pub mod lattice;
pub mod linalg;
pub mod partition;
pub mod search;

pub use enumeration::{
    compare_images_with_oracle, decompose, enumerate_corank_oracle,
    enumerate_full_rank_multiplicative, f_count, phi, phi_corank_formula, verify_main_theorem,
    CountRecord, EnumerationError, Method, Status, VerificationReport, ENGINE_VERSION,
};
pub use lattice::{pointwise_product, Lattice, LatticeError};
pub use linalg::{
    hermite_normal_form, smith_normal_form, solve_in_row_span, IntMatrix, LinalgError,
};
pub use partition::{
    apply_map, enumerate_ordered_maps, enumerate_partitions, map_to_partition, order_map,
    partition_to_map, stirling2, AcceptableMap, PartitionError, SetPartition,
};
pub use search::SearchConfig;
