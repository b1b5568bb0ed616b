#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tribound::rational::q;
use tribound::{MultiplicitySpec, Q};

pub fn random_rational<R: Rng>(rng: &mut R) -> Q {
    q(rng.gen_range(1..=9), rng.gen_range(1..=9))
}

/// Triangle with independent random multiplicities `p/q`, `1 <= p,q <= 9`,
/// on levels `0..depth`.
pub fn random_triangle(rng: &mut ChaCha8Rng, depth: usize) -> MultiplicitySpec {
    let mut table = || -> Vec<Vec<Q>> {
        (0..depth.max(1))
            .map(|n| (0..=n).map(|_| random_rational(rng)).collect())
            .collect()
    };
    let left = table();
    let right = table();
    MultiplicitySpec::from_tables(left, right).unwrap()
}

/// Sum over all up-right paths from the root of the product of edge weights.
pub fn path_sum(tri: &MultiplicitySpec, n: usize, k: usize) -> Q {
    let mut total = Q::from_integer(0.into());
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let mut w = Q::from_integer(1.into());
        let mut col = 0;
        for level in 0..n {
            if mask >> level & 1 == 1 {
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

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    out
}

pub fn cycle_count(p: &[usize]) -> usize {
    let mut seen = vec![false; p.len()];
    let mut cycles = 0;
    for s in 0..p.len() {
        if !seen[s] {
            cycles += 1;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                i = p[i];
            }
        }
    }
    cycles
}

pub fn descents(p: &[usize]) -> usize {
    p.windows(2).filter(|w| w[0] > w[1]).count()
}

/// Number of set partitions of `{1..n}` into `b` blocks, for all `b`,
/// via restricted growth strings.
pub fn partition_counts(n: usize) -> Vec<u64> {
    let mut counts = vec![0u64; n + 1];
    fn rec(pos: usize, n: usize, max: usize, counts: &mut [u64]) {
        if pos == n {
            counts[max] += 1;
            return;
        }
        for b in 0..=max {
            rec(pos + 1, n, max.max(b + 1), counts);
        }
    }
    if n == 0 {
        counts[0] = 1;
    } else {
        rec(1, n, 1, &mut counts);
    }
    counts
}

/// Iterated classical differences `Δ^j a_i = Σ_l (-1)^l C(j,l) a_{i+l}`.
pub fn all_differences_nonnegative(a: &[Q]) -> bool {
    let n = a.len();
    for j in 0..n {
        for i in 0..n - j {
            let mut s = Q::from_integer(0.into());
            let mut c = Q::from_integer(1.into());
            for l in 0..=j {
                let term = &c * &a[i + l];
                if l % 2 == 0 {
                    s += term;
                } else {
                    s -= term;
                }
                c = c * Q::from_integer(((j - l) as i64).into()) / Q::from_integer(((l + 1) as i64).into());
            }
            if s < Q::from_integer(0.into()) {
                return false;
            }
        }
    }
    true
}
