use proptest::prelude::*;
use sublattice_core::independent::{determinant, torsion_by_minors};
use sublattice_core::linalg::echelon_rank;
use sublattice_core::{
    apply_map, enumerate_full_rank_multiplicative, hermite_normal_form, map_to_partition,
    order_map, partition_to_map, smith_normal_form, solve_in_row_span, AcceptableMap, IntMatrix,
    Lattice, SearchConfig, SetPartition,
};

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-9i64..=9, c), r)
            .prop_map(|rows| IntMatrix::from_rows(&rows).unwrap())
    })
}

fn square(max: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(-9i64..=9, n), n)
            .prop_map(|rows| IntMatrix::from_rows(&rows).unwrap())
    })
}

/// Elementary row operations `(kind, i, j, factor)`.
fn ops() -> impl Strategy<Value = Vec<(u8, usize, usize, i64)>> {
    prop::collection::vec((0u8..3, 0usize..8, 0usize..8, -3i64..=3), 0..12)
}

fn apply_ops(m: &IntMatrix, ops: &[(u8, usize, usize, i64)]) -> IntMatrix {
    let mut m = m.clone();
    let n = m.rows();
    for &(kind, i, j, f) in ops {
        let (i, j) = (i % n, j % n);
        match kind {
            0 => m.swap_rows(i, j),
            1 => m.negate_row(i).unwrap(),
            _ if i != j => m.add_row_multiple(i, j, f).unwrap(),
            _ => {}
        }
    }
    m
}

fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// Restricted growth string of length `len` using at least one block.
fn rgs(len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..len.max(1), len).prop_map(|raw| {
        let mut out = Vec::with_capacity(raw.len());
        let mut used = 0;
        for x in raw {
            let b = x % (used + 1);
            used = used.max(b + 1);
            out.push(b);
        }
        out
    })
}

fn multiplicative_lattice() -> impl Strategy<Value = Lattice> {
    (1usize..=3, 1u64..=12, any::<prop::sample::Index>()).prop_filter_map(
        "no lattice",
        |(n, r, idx)| {
            let all =
                enumerate_full_rank_multiplicative(n, r, &SearchConfig::with_jobs(1)).unwrap();
            (!all.is_empty()).then(|| all[idx.index(all.len())].clone())
        },
    )
}

proptest! {
    #[test]
    fn hnf_is_idempotent(m in matrix(4, 4)) {
        let h = hermite_normal_form(&m).unwrap();
        prop_assert_eq!(hermite_normal_form(&h).unwrap(), h.clone());
        prop_assert_eq!((h.rows(), h.cols()), (m.rows(), m.cols()));
    }

    #[test]
    fn snf_divisibility_chain(m in matrix(4, 4)) {
        let d = smith_normal_form(&m).unwrap();
        prop_assert_eq!(d.len(), m.rows().min(m.cols()));
        for w in d.windows(2) {
            prop_assert!(w[0] >= 0 && (w[0] == 0 && w[1] == 0 || w[0] != 0 && w[1] % w[0] == 0), "{:?}", d);
        }
        prop_assert_eq!(d.iter().filter(|&&x| x != 0).count(), echelon_rank(&hermite_normal_form(&m).unwrap()));
    }

    #[test]
    fn determinant_is_product_of_snf(m in square(4)) {
        let d = smith_normal_form(&m).unwrap();
        prop_assert_eq!(determinant(&m.to_rows()).unwrap().abs(), d.iter().product::<i64>());
    }

    #[test]
    fn solve_round_trip(m in matrix(4, 4), c in prop::collection::vec(-5i64..=5, 4)) {
        let h = hermite_normal_form(&m).unwrap();
        let c = &c[..h.rows()];
        let v = h.left_mul_vector(c).unwrap();
        let x = solve_in_row_span(&h, &v).unwrap().expect("v is in the span");
        prop_assert_eq!(h.left_mul_vector(&x).unwrap(), v);
    }

    #[test]
    fn torsion_is_invariant_under_rebasing(m in matrix(4, 4), ops in ops()) {
        let a = Lattice::from_matrix(&m).unwrap();
        let b = Lattice::from_matrix(&apply_ops(&m, &ops)).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.torsion_size().unwrap(), b.torsion_size().unwrap());
        prop_assert_eq!(a.torsion_size().unwrap(), torsion_by_minors(&a).unwrap());
    }

    #[test]
    fn permutation_preserves_invariants(m in matrix(3, 4), seed in any::<prop::sample::Index>()) {
        let l = Lattice::from_matrix(&m).unwrap();
        let perms: Vec<Vec<usize>> = permutations(l.ambient_dim());
        let perm = &perms[seed.index(perms.len())];
        let p = l.permute_coordinates(perm).unwrap();
        prop_assert_eq!(p.rank(), l.rank());
        prop_assert_eq!(p.torsion_size().unwrap(), l.torsion_size().unwrap());
        prop_assert_eq!(p.is_multiplicative().unwrap(), l.is_multiplicative().unwrap());
        prop_assert_eq!(p.distinct_nonzero_columns(), l.distinct_nonzero_columns());
        prop_assert_eq!(p.permute_coordinates(&inverse(perm)).unwrap(), l);
    }

    #[test]
    fn partition_map_round_trip(s in (1usize..=9).prop_flat_map(rgs)) {
        let p = SetPartition::from_rgs(&s);
        let n = p.block_count() - 1;
        let g = partition_to_map(&p, n).unwrap();
        prop_assert!(g.is_ordered());
        prop_assert_eq!(map_to_partition(&g), p.clone());
        prop_assert_eq!(g.to_string().parse::<AcceptableMap>().unwrap(), g.clone());
        prop_assert_eq!(SetPartition::from_rgs(&p.to_rgs()), p);
    }

    #[test]
    fn ordering_a_map_preserves_its_class(
        l in multiplicative_lattice(),
        k in 0usize..=2,
        seed in any::<prop::sample::Index>(),
        pseed in any::<prop::sample::Index>(),
    ) {
        let n = l.ambient_dim();
        let maps = sublattice_core::enumerate_ordered_maps(n, n + k);
        let g = &maps[seed.index(maps.len())];
        let perms = permutations(n);
        let tau = &perms[pseed.index(perms.len())];
        // g(L) = (g ∘ τ)(τ⁻¹ L)
        let shuffled = g.compose_permutation(tau).unwrap();
        let moved = l.permute_coordinates(&inverse(tau)).unwrap();
        prop_assert_eq!(apply_map(&shuffled, &moved).unwrap(), apply_map(g, &l).unwrap());
        let (ordered, _) = order_map(&shuffled);
        prop_assert_eq!(&ordered, g);
        prop_assert_eq!(map_to_partition(&shuffled), map_to_partition(g));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn hnf_is_invariant_under_unimodular_rows(m in matrix(4, 4), ops in ops()) {
        prop_assert_eq!(
            hermite_normal_form(&apply_ops(&m, &ops)).unwrap(),
            hermite_normal_form(&m).unwrap()
        );
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &out {
            for x in (0..n).filter(|x| !p.contains(x)) {
                let mut q = p.clone();
                q.push(x);
                next.push(q);
            }
        }
        out = next;
    }
    out
}
