mod common;

use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tribound::catalog::{catalog_triangle, extreme_kernel, BoundaryPoint, ExtQ};
use tribound::dims::{dimensions, extended_dimensions};
use tribound::kernel::{generalized_difference, kernel_from_first_column, martin_kernel, verify_harmonic};
use tribound::rational::{q, qi};
use tribound::{NodeIndex, Q};

use common::*;

/// Extended dimensions by brute force: weighted paths from (n,k) to the target.
fn path_sum_between(tri: &tribound::MultiplicitySpec, from: NodeIndex, to: NodeIndex) -> Q {
    let steps = to.n - from.n;
    let mut total = Q::zero();
    for mask in 0u32..(1 << steps) {
        if from.k + mask.count_ones() as usize != to.k {
            continue;
        }
        let mut w = Q::one();
        let mut col = from.k;
        for i in 0..steps {
            let level = from.n + i;
            if mask >> i & 1 == 1 {
                w *= tri.right(level, col).unwrap();
                col += 1;
            } else {
                w *= tri.left(level, col).unwrap();
            }
        }
        total += w;
    }
    total
}

#[test]
fn extended_dimensions_match_path_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..30 {
        let tri = random_triangle(&mut rng, 8);
        let nu = rng.gen_range(1..=8);
        let kappa = rng.gen_range(0..=nu);
        let target = NodeIndex { n: nu, k: kappa };
        let ext = extended_dimensions(&tri, target).unwrap();
        for n in 0..=nu {
            for k in 0..=n {
                assert_eq!(ext.at(n, k), path_sum_between(&tri, NodeIndex { n, k }, target), "({n},{k})");
            }
        }
    }
}

#[test]
fn first_column_reconstructs_martin_kernels() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..30 {
        let tri = random_triangle(&mut rng, 9);
        let kappa = rng.gen_range(0..=9);
        let v = martin_kernel(&tri, NodeIndex { n: 9, k: kappa }).unwrap();
        let (w, verdict) = kernel_from_first_column(&tri, &v.first_column(), 9).unwrap();
        assert!(verdict.accepted);
        assert_eq!(w, v);
    }
}

#[test]
fn generalized_difference_inverts_harmonic_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let tri = random_triangle(&mut rng, 8);
    let v = martin_kernel(&tri, NodeIndex { n: 8, k: 3 }).unwrap();
    for k in 1..=3 {
        let col: Vec<Q> = (k - 1..=8).map(|n| v.get(n, k - 1).clone()).collect();
        let next = generalized_difference(&tri, &col, k).unwrap();
        for (i, x) in next.iter().enumerate() {
            assert_eq!(x, v.get(k + i, k));
        }
    }
}

#[test]
fn stirling_zero_extremes_are_rising_factorials() {
    let t = catalog_triangle("stirling", &[("alpha".into(), qi(0))]).unwrap();
    for s in [q(1, 2), qi(3)] {
        let v = extreme_kernel(&t, &BoundaryPoint::StirlingS(ExtQ::Finite(s.clone())), 10).unwrap();
        let mut rising = Q::one();
        for n in 0..=10 {
            assert_eq!(v.get(n, 0), &rising.recip());
            rising *= &s + qi(n as i64 + 1);
        }
    }
}

fn small_rational() -> impl Strategy<Value = Q> {
    (1i64..=12, 1i64..=12).prop_map(|(a, b)| q(a, b))
}

fn table(depth: usize) -> impl Strategy<Value = Vec<Vec<Q>>> {
    (0..depth)
        .map(|n| proptest::collection::vec(small_rational(), n + 1))
        .collect::<Vec<_>>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dimensions_are_positive_path_sums(left in table(6), right in table(6)) {
        let tri = tribound::MultiplicitySpec::from_tables(left, right).unwrap();
        let d = dimensions(&tri, 6).unwrap();
        for n in 0..=6 {
            for k in 0..=n {
                prop_assert!(d.at(n, k) > Q::zero());
                prop_assert_eq!(d.at(n, k), path_sum(&tri, n, k));
            }
        }
    }

    #[test]
    fn martin_kernels_are_harmonic(left in table(7), right in table(7), kappa in 0usize..=7) {
        let tri = tribound::MultiplicitySpec::from_tables(left, right).unwrap();
        let v = martin_kernel(&tri, NodeIndex { n: 7, k: kappa }).unwrap();
        prop_assert!(v.get(0, 0).is_one());
        // harmonic strictly below the target level
        let r = verify_harmonic(&tri, &v, 6).unwrap();
        prop_assert!(r.violations.is_empty() && r.negative.is_empty());
    }

    #[test]
    fn hausdorff_verdict_matches_oracle(tail in proptest::collection::vec(0i64..=20, 6)) {
        let mut seq = vec![Q::one()];
        seq.extend(tail.into_iter().map(|a| q(a, 20)));
        let pascal = catalog_triangle("pascal", &[]).unwrap();
        let (_, v) = kernel_from_first_column(&pascal, &seq, 6).unwrap();
        prop_assert_eq!(v.accepted, all_differences_nonnegative(&seq));
    }
}
