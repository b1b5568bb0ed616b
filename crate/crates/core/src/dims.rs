//! Dimensions: weighted path sums over the triangle.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{serde_q_rows, Q};
use crate::triangle::{MultiplicitySpec, NodeIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Entry `(n,k)` sums the weights of paths `base -> (n,k)`.
    FromBase,
    /// Entry `(n,k)` sums the weights of paths `(n,k) -> base`.
    ToBase,
}

/// Exact path-weight sums indexed by node, `rows[n][k]` for `0 <= k <= n <= depth`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionTable {
    pub base: NodeIndex,
    pub direction: Direction,
    pub depth: usize,
    #[serde(with = "serde_q_rows")]
    pub rows: Vec<Vec<Q>>,
}

impl DimensionTable {
    pub fn get(&self, n: usize, k: usize) -> Option<&Q> {
        self.rows.get(n).and_then(|r| r.get(k))
    }

    /// Entry at `(n,k)`, zero outside the table.
    pub fn at(&self, n: usize, k: usize) -> Q {
        self.get(n, k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn row(&self, n: usize) -> &[Q] {
        &self.rows[n]
    }
}

/// Dimensions `D_nk` up to `depth`, from the forward recursion.
pub fn dimensions(tri: &MultiplicitySpec, depth: usize) -> Result<DimensionTable> {
    dimensions_from(tri, NodeIndex::ROOT, depth)
}

/// Weighted path sums from `source` to every node of level `<= depth`.
///
/// As a function of the endpoint, the path sum obeys the same forward
/// recursion as `D_nk`, so this also yields `D^{νκ}_{source}` for every
/// `(ν, κ)` at once.
pub fn dimensions_from(
    tri: &MultiplicitySpec,
    source: NodeIndex,
    depth: usize,
) -> Result<DimensionTable> {
    NodeIndex::new(source.n, source.k)?;
    let mut rows: Vec<Vec<Q>> = Vec::with_capacity(depth + 1);
    for n in 0..=depth {
        let mut row = vec![Q::zero(); n + 1];
        if n == source.n {
            row[source.k] = Q::from_integer(1.into());
        } else if n > source.n {
            let prev = &rows[n - 1];
            // reachable band: source.k <= k <= source.k + (n - source.n)
            let hi = (source.k + (n - source.n)).min(n);
            for (k, slot) in row.iter_mut().enumerate().take(hi + 1).skip(source.k) {
                let mut acc = Q::zero();
                if k >= 1 && !prev[k - 1].is_zero() {
                    acc += tri.right(n - 1, k - 1)? * &prev[k - 1];
                }
                if k < n && !prev[k].is_zero() {
                    acc += tri.left(n - 1, k)? * &prev[k];
                }
                *slot = acc;
            }
        }
        rows.push(row);
    }
    Ok(DimensionTable {
        base: source,
        direction: Direction::FromBase,
        depth,
        rows,
    })
}

/// Extended dimensions `D^{νκ}_nk` for all `n <= ν`, by one backward sweep
/// from the indicator at `target = (ν, κ)`.
pub fn extended_dimensions(tri: &MultiplicitySpec, target: NodeIndex) -> Result<DimensionTable> {
    let NodeIndex { n: nu, k: kappa } = NodeIndex::new(target.n, target.k)?;
    let mut rows: Vec<Vec<Q>> = vec![Vec::new(); nu + 1];
    let mut top = vec![Q::zero(); nu + 1];
    top[kappa] = Q::from_integer(1.into());
    rows[nu] = top;
    for n in (0..nu).rev() {
        let next = &rows[n + 1];
        let mut row = vec![Q::zero(); n + 1];
        // nodes that can still reach (ν, κ): κ - (ν - n) <= k <= κ
        let lo = kappa.saturating_sub(nu - n);
        let hi = kappa.min(n);
        for (k, slot) in row.iter_mut().enumerate().take(hi + 1).skip(lo) {
            let mut acc = Q::zero();
            if !next[k].is_zero() {
                acc += tri.left(n, k)? * &next[k];
            }
            if !next[k + 1].is_zero() {
                acc += tri.right(n, k)? * &next[k + 1];
            }
            *slot = acc;
        }
        rows[n] = row;
    }
    Ok(DimensionTable {
        base: target,
        direction: Direction::ToBase,
        depth: nu,
        rows,
    })
}

pub(crate) fn require_level(dims: &DimensionTable, n: usize) -> Result<()> {
    if dims.direction != Direction::FromBase || dims.base != NodeIndex::ROOT {
        return Err(Error::Invalid("expected a root dimension table".into()));
    }
    if n > dims.depth {
        return Err(Error::Invalid(format!(
            "dimension table depth {} does not cover level {n}",
            dims.depth
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog_triangle;
    use crate::rational::{q, qi};

    fn pascal() -> MultiplicitySpec {
        catalog_triangle("pascal", &[]).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| qi(x)).collect()
    }

    #[test]
    fn pascal_row_four() {
        let d = dimensions(&pascal(), 4).unwrap();
        assert_eq!(d.row(4), ints(&[1, 4, 6, 4, 1]).as_slice());
    }

    #[test]
    fn eulerian_row_three() {
        let e = catalog_triangle("eulerian", &[]).unwrap();
        let d = dimensions(&e, 3).unwrap();
        assert_eq!(d.row(3), ints(&[1, 11, 11, 1]).as_slice());
    }

    #[test]
    fn depth_zero() {
        let d = dimensions(&pascal(), 0).unwrap();
        assert_eq!(d.rows, vec![ints(&[1])]);
    }

    #[test]
    fn extended_pascal_example() {
        let ext = extended_dimensions(&pascal(), NodeIndex { n: 4, k: 2 }).unwrap();
        assert_eq!(ext.at(1, 0), qi(3));
        assert_eq!(ext.at(4, 2), qi(1));
        assert_eq!(ext.at(3, 0), qi(0));
        assert_eq!(ext.at(0, 0), qi(6));
    }

    #[test]
    fn extended_zero_above_target_column() {
        let t = catalog_triangle("q-pascal", &[("q".into(), q(1, 3))]).unwrap();
        let ext = extended_dimensions(&t, NodeIndex { n: 6, k: 2 }).unwrap();
        for n in 0..=6 {
            for k in 3..=n {
                assert!(ext.at(n, k).is_zero());
            }
        }
        assert_eq!(ext.at(0, 0), dimensions(&t, 6).unwrap().at(6, 2));
    }

    #[test]
    fn invalid_target() {
        assert!(extended_dimensions(&pascal(), NodeIndex { n: 2, k: 3 }).is_err());
    }

    #[test]
    fn forward_from_node_matches_backward() {
        let t = catalog_triangle("stirling", &[("alpha".into(), q(-1, 2))]).unwrap();
        let src = NodeIndex { n: 2, k: 1 };
        let fwd = dimensions_from(&t, src, 7).unwrap();
        for nu in 2..=7 {
            for kappa in 0..=nu {
                let back = extended_dimensions(&t, NodeIndex { n: nu, k: kappa }).unwrap();
                assert_eq!(fwd.at(nu, kappa), back.at(2, 1));
            }
        }
    }
}
