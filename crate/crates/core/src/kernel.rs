//! Harmonic arrays on the triangle: Martin kernels, the harmonicity check,
//! and reconstruction of a whole array from its first column.
//!
//! Harmonic here means `V_nk = left(n,k)·V_{n+1,k} + right(n,k)·V_{n+1,k+1}`.
//! Solving that for the second term gives the generalized difference
//!
//! ```text
//! V_{n+1,k} = (V_{n,k-1} - left(n,k-1)·V_{n+1,k-1}) / right(n,k-1)
//! ```
//!
//! which maps column `k-1` (levels `n >= k-1`) to column `k` (levels `n >= k`).

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dims::extended_dimensions;
use crate::error::{Error, Result};
use crate::rational::{serde_q, serde_q_rows, Q};
use crate::triangle::{MultiplicitySpec, NodeIndex};

/// Exact values `rows[n][k]`, `0 <= k <= n <= depth`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelArray {
    pub depth: usize,
    #[serde(with = "serde_q_rows")]
    pub rows: Vec<Vec<Q>>,
}

impl KernelArray {
    pub fn zeros(depth: usize) -> KernelArray {
        KernelArray {
            depth,
            rows: (0..=depth).map(|n| vec![Q::zero(); n + 1]).collect(),
        }
    }

    /// Builds an array from a closure over nodes.
    pub fn from_fn(depth: usize, mut f: impl FnMut(usize, usize) -> Result<Q>) -> Result<KernelArray> {
        let mut rows = Vec::with_capacity(depth + 1);
        for n in 0..=depth {
            rows.push((0..=n).map(|k| f(n, k)).collect::<Result<Vec<_>>>()?);
        }
        Ok(KernelArray { depth, rows })
    }

    pub fn get(&self, n: usize, k: usize) -> &Q {
        &self.rows[n][k]
    }

    pub fn first_column(&self) -> Vec<Q> {
        self.rows.iter().map(|r| r[0].clone()).collect()
    }

    pub fn truncate(&self, depth: usize) -> KernelArray {
        let depth = depth.min(self.depth);
        KernelArray {
            depth,
            rows: self.rows[..=depth].to_vec(),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.rows.iter().flatten().all(|v| !v.is_negative())
    }
}

/// `V^{νκ}` on levels `0..=ν`: extended dimensions divided by `D_{νκ}`.
pub fn martin_kernel(tri: &MultiplicitySpec, target: NodeIndex) -> Result<KernelArray> {
    let ext = extended_dimensions(tri, target)?;
    let total = ext.at(0, 0);
    if total.is_zero() {
        return Err(Error::Internal(format!("D{target} vanished")));
    }
    Ok(KernelArray {
        depth: target.n,
        rows: ext
            .rows
            .into_iter()
            .map(|row| row.into_iter().map(|d| d / &total).collect())
            .collect(),
    })
}

/// [`martin_kernel`] on a fixed window; levels above `ν` are zero.
pub fn martin_kernel_window(
    tri: &MultiplicitySpec,
    target: NodeIndex,
    depth: usize,
) -> Result<KernelArray> {
    let mut v = martin_kernel(tri, target)?.truncate(depth);
    for n in v.depth + 1..=depth {
        v.rows.push(vec![Q::zero(); n + 1]);
    }
    v.depth = depth;
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub node: NodeIndex,
    /// `V_nk - left·V_{n+1,k} - right·V_{n+1,k+1}`
    #[serde(with = "serde_q")]
    pub residual: Q,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicReport {
    pub checked_depth: usize,
    pub normalized: bool,
    pub violations: Vec<Violation>,
    pub negative: Vec<NodeIndex>,
}

impl HarmonicReport {
    pub fn is_clean(&self) -> bool {
        self.normalized && self.violations.is_empty() && self.negative.is_empty()
    }
}

/// Exact check of the harmonic recursion for all `n < depth`, together with
/// `V >= 0` and `V_00 = 1`. `depth` is clamped to the array depth.
pub fn verify_harmonic(tri: &MultiplicitySpec, v: &KernelArray, depth: usize) -> Result<HarmonicReport> {
    let depth = depth.min(v.depth);
    let mut violations = Vec::new();
    let mut negative = Vec::new();
    for n in 0..=depth {
        for k in 0..=n {
            if v.rows[n][k].is_negative() {
                negative.push(NodeIndex { n, k });
            }
            if n < depth {
                let rhs = tri.left(n, k)? * &v.rows[n + 1][k] + tri.right(n, k)? * &v.rows[n + 1][k + 1];
                let residual = &v.rows[n][k] - rhs;
                if !residual.is_zero() {
                    violations.push(Violation {
                        node: NodeIndex { n, k },
                        residual,
                    });
                }
            }
        }
    }
    Ok(HarmonicReport {
        checked_depth: depth,
        normalized: v.rows[0][0].is_one(),
        violations,
        negative,
    })
}

/// Maps column `k-1` to column `k`.
///
/// `column[i]` is the entry at level `k-1+i`; the result has one element
/// less and `result[i]` is the entry at level `k+i`.
pub fn generalized_difference(tri: &MultiplicitySpec, column: &[Q], k: usize) -> Result<Vec<Q>> {
    if k == 0 {
        return Err(Error::Invalid("generalized difference needs k >= 1".into()));
    }
    let src = k - 1;
    column
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let n = src + i;
            Ok((&w[0] - tri.left(n, src)? * &w[1]) / tri.right(n, src)?)
        })
        .collect()
}

/// Outcome of a finite-depth membership test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub depth: usize,
    pub accepted: bool,
    pub first_negative: Option<NodeIndex>,
}

impl fmt::Display for MembershipVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.first_negative {
            None => write!(f, "ACCEPT (consistent up to depth {})", self.depth),
            Some(node) => write!(f, "REJECT (negative entry at {node}, depth {})", self.depth),
        }
    }
}

/// Rebuilds the array from `V_{•,0}` by iterated generalized differences and
/// accepts iff every entry of the window is nonnegative.
pub fn kernel_from_first_column(
    tri: &MultiplicitySpec,
    first_col: &[Q],
    depth: usize,
) -> Result<(KernelArray, MembershipVerdict)> {
    if first_col.len() != depth + 1 {
        return Err(Error::LengthMismatch {
            expected: depth + 1,
            got: first_col.len(),
        });
    }
    if !first_col[0].is_one() {
        return Err(Error::Invalid("first column must start with 1".into()));
    }
    let mut v = KernelArray::zeros(depth);
    for (n, x) in first_col.iter().enumerate() {
        v.rows[n][0] = x.clone();
    }
    let mut column = first_col.to_vec();
    for k in 1..=depth {
        column = generalized_difference(tri, &column, k)?;
        for (i, x) in column.iter().enumerate() {
            v.rows[k + i][k] = x.clone();
        }
    }
    let first_negative = v
        .rows
        .iter()
        .enumerate()
        .flat_map(|(n, row)| row.iter().enumerate().map(move |(k, x)| (n, k, x)))
        .find(|(_, _, x)| x.is_negative())
        .map(|(n, k, _)| NodeIndex { n, k });
    let verdict = MembershipVerdict {
        depth,
        accepted: first_negative.is_none(),
        first_negative,
    };
    Ok((v, verdict))
}
