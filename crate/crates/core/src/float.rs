//! Floating evaluation for deep sweeps.
//!
//! Path sums at level 10^4 span thousands of decimal orders, far outside
//! the f64 exponent range, so values are carried as [`Scaled`]: an f64
//! mantissa in `[0.5, 1)` with a separate 64-bit binary exponent. Every
//! operation rounds like plain f64; only the exponent range is extended.
//!
//! Each sweep also carries a running estimate of its relative rounding
//! error, in units of the f64 unit roundoff.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::rational::{to_f64_scaled, Q};
use crate::triangle::{MultiplicitySpec, NodeIndex};

pub const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// `m · 2^e` with `|m|` in `[0.5, 1)` or `m = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    m: f64,
    e: i64,
}

fn ldexp(x: f64, e: i64) -> f64 {
    // split so each factor stays a normal power of two
    let mut x = x;
    let mut e = e;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

impl Scaled {
    pub const ZERO: Scaled = Scaled { m: 0.0, e: 0 };
    pub const ONE: Scaled = Scaled { m: 0.5, e: 1 };

    pub fn new(m: f64, e: i64) -> Scaled {
        if m == 0.0 || !m.is_finite() {
            return Scaled { m, e: 0 };
        }
        let bits = m.to_bits();
        let biased = ((bits >> 52) & 0x7ff) as i64;
        if biased == 0 {
            // subnormal
            return Scaled::new(m * 2f64.powi(64), e - 64);
        }
        let mant = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
        Scaled {
            m: mant,
            e: e + biased - 1022,
        }
    }

    pub fn from_f64(x: f64) -> Scaled {
        Scaled::new(x, 0)
    }

    pub fn from_q(x: &Q) -> Scaled {
        let (m, e) = to_f64_scaled(x);
        Scaled::new(m, e)
    }

    pub fn is_zero(&self) -> bool {
        self.m == 0.0
    }

    pub fn to_f64(self) -> f64 {
        ldexp(self.m, self.e)
    }

    pub fn ln(self) -> f64 {
        self.m.ln() + self.e as f64 * std::f64::consts::LN_2
    }

    /// `self / other` as a plain f64 (the ratio is assumed representable).
    pub fn ratio(self, other: Scaled) -> f64 {
        ldexp(self.m / other.m, self.e - other.e)
    }

    pub fn powi(self, exp: i64) -> Scaled {
        if exp < 0 {
            return Scaled::ONE / self.powi(-exp);
        }
        let mut result = Scaled::ONE;
        let mut base = self;
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base;
            }
            base = base * base;
            e >>= 1;
        }
        result
    }
}

impl Add for Scaled {
    type Output = Scaled;
    fn add(self, rhs: Scaled) -> Scaled {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.e >= rhs.e { (self, rhs) } else { (rhs, self) };
        let d = big.e - small.e;
        if d > 60 {
            return big;
        }
        Scaled::new(big.m + ldexp(small.m, -d), big.e)
    }
}

impl Neg for Scaled {
    type Output = Scaled;
    fn neg(self) -> Scaled {
        Scaled { m: -self.m, e: self.e }
    }
}

impl Sub for Scaled {
    type Output = Scaled;
    fn sub(self, rhs: Scaled) -> Scaled {
        self + (-rhs)
    }
}

impl Mul for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: Scaled) -> Scaled {
        Scaled::new(self.m * rhs.m, self.e + rhs.e)
    }
}

impl Div for Scaled {
    type Output = Scaled;
    fn div(self, rhs: Scaled) -> Scaled {
        Scaled::new(self.m / rhs.m, self.e - rhs.e)
    }
}

impl PartialOrd for Scaled {
    fn partial_cmp(&self, other: &Scaled) -> Option<Ordering> {
        (*self - *other).m.partial_cmp(&0.0)
    }
}

pub fn eval_expr(expr: &Expr, n: usize, k: usize) -> Scaled {
    match expr {
        Expr::Const(c, f) => {
            if f.is_normal() {
                Scaled::from_f64(*f)
            } else {
                Scaled::from_q(c)
            }
        }
        Expr::N => Scaled::from_f64(n as f64),
        Expr::K => Scaled::from_f64(k as f64),
        Expr::Neg(a) => -eval_expr(a, n, k),
        Expr::Add(a, b) => eval_expr(a, n, k) + eval_expr(b, n, k),
        Expr::Sub(a, b) => eval_expr(a, n, k) - eval_expr(b, n, k),
        Expr::Mul(a, b) => eval_expr(a, n, k) * eval_expr(b, n, k),
        Expr::Div(a, b) => eval_expr(a, n, k) / eval_expr(b, n, k),
        Expr::Pow(a, b) => {
            let exp = eval_expr(b, n, k).to_f64().round() as i64;
            eval_expr(a, n, k).powi(exp)
        }
    }
}

/// Estimated relative error of [`eval_expr`] in unit roundoffs, for nodes of
/// level at most `max_level` (exponents of power nodes are bounded by it).
pub fn expr_error_units(expr: &Expr, max_level: usize) -> f64 {
    match expr {
        Expr::Const(c, _) => {
            if c.is_integer() {
                0.0
            } else {
                1.0
            }
        }
        Expr::N | Expr::K => 0.0,
        Expr::Neg(a) => expr_error_units(a, max_level),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            1.0 + expr_error_units(a, max_level) + expr_error_units(b, max_level)
        }
        Expr::Pow(a, _) => {
            let l = max_level as f64 + 1.0;
            (1.0 + expr_error_units(a, max_level)) * l + 2.0 * l.log2().ceil()
        }
    }
}

/// Kernel values on a window, in floating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloatWindow {
    pub depth: usize,
    pub rows: Vec<Vec<f64>>,
    /// Estimated bound on the relative error of every entry.
    pub rel_error: f64,
}

impl FloatWindow {
    pub fn get(&self, n: usize, k: usize) -> f64 {
        self.rows[n][k]
    }
}

fn sweep_error_units(tri: &MultiplicitySpec, levels: usize) -> f64 {
    // per level: multiplicity evaluation, one product, one sum
    (tri.scaled_error_units(levels) + 2.0) * levels as f64
}

/// `V^{νκ}` on levels `0..=n_max` by a scaled backward sweep.
pub fn martin_window_float(tri: &MultiplicitySpec, target: NodeIndex, n_max: usize) -> Result<FloatWindow> {
    let NodeIndex { n: nu, k: kappa } = NodeIndex::new(target.n, target.k)?;
    let keep = n_max.min(nu);
    let mut kept: Vec<Vec<Scaled>> = vec![Vec::new(); keep + 1];
    let mut next: Vec<Scaled> = vec![Scaled::ZERO; nu + 1];
    next[kappa] = Scaled::ONE;
    if nu <= keep {
        kept[nu] = next.clone();
    }
    for n in (0..nu).rev() {
        let mut row = vec![Scaled::ZERO; n + 1];
        let lo = kappa.saturating_sub(nu - n);
        let hi = kappa.min(n);
        for k in lo..=hi {
            let mut acc = Scaled::ZERO;
            if !next[k].is_zero() {
                acc = acc + tri.left_scaled(n, k)? * next[k];
            }
            if !next[k + 1].is_zero() {
                acc = acc + tri.right_scaled(n, k)? * next[k + 1];
            }
            row[k] = acc;
        }
        if n <= keep {
            kept[n] = row.clone();
        }
        next = row;
    }
    let total = kept[0][0];
    if total.is_zero() {
        return Err(Error::Internal("vanishing dimension in float sweep".into()));
    }
    let rows = (0..=n_max)
        .map(|n| {
            if n <= keep {
                kept[n].iter().map(|x| x.ratio(total)).collect()
            } else {
                vec![0.0; n + 1]
            }
        })
        .collect();
    Ok(FloatWindow {
        depth: n_max,
        rows,
        rel_error: (2.0 * sweep_error_units(tri, nu) + 1.0) * UNIT_ROUNDOFF,
    })
}

/// Forward path sums from `source`, kept at the requested levels.
///
/// `result[i][κ]` is the weight of all paths `source -> (levels[i], κ)`.
pub fn forward_rows_scaled(
    tri: &MultiplicitySpec,
    source: NodeIndex,
    levels: &[usize],
) -> Result<Vec<Vec<Scaled>>> {
    NodeIndex::new(source.n, source.k)?;
    let max = levels.iter().copied().max().unwrap_or(0);
    let mut out: Vec<Vec<Scaled>> = vec![Vec::new(); levels.len()];
    let mut row = vec![Scaled::ZERO; source.n + 1];
    row[source.k] = Scaled::ONE;
    let store = |n: usize, row: &Vec<Scaled>, out: &mut Vec<Vec<Scaled>>| {
        for (i, &l) in levels.iter().enumerate() {
            if l == n {
                out[i] = row.clone();
            }
        }
    };
    store(source.n, &row, &mut out);
    for n in source.n + 1..=max {
        let mut next = vec![Scaled::ZERO; n + 1];
        let hi = (source.k + (n - source.n)).min(n);
        for k in source.k..=hi {
            let mut acc = Scaled::ZERO;
            if k >= 1 && !row[k - 1].is_zero() {
                acc = acc + tri.right_scaled(n - 1, k - 1)? * row[k - 1];
            }
            if k < n && !row[k].is_zero() {
                acc = acc + tri.left_scaled(n - 1, k)? * row[k];
            }
            next[k] = acc;
        }
        row = next;
        store(n, &row, &mut out);
    }
    for (i, &l) in levels.iter().enumerate() {
        if l < source.n {
            out[i] = vec![Scaled::ZERO; l + 1];
        }
    }
    Ok(out)
}

/// Martin-kernel values on a fixed node window for every target `(ν, κ)`
/// with `ν` in a list of levels, from one forward sweep per window node.
#[derive(Debug, Clone)]
pub struct KernelSweep {
    pub levels: Vec<usize>,
    pub nodes: Vec<NodeIndex>,
    root: Vec<Vec<Scaled>>,
    from_nodes: Vec<Vec<Vec<Scaled>>>,
    pub rel_error: f64,
}

impl KernelSweep {
    pub fn new(tri: &MultiplicitySpec, nodes: &[NodeIndex], levels: &[usize]) -> Result<KernelSweep> {
        let root = forward_rows_scaled(tri, NodeIndex::ROOT, levels)?;
        let from_nodes = nodes
            .iter()
            .map(|&node| forward_rows_scaled(tri, node, levels))
            .collect::<Result<Vec<_>>>()?;
        let max = levels.iter().copied().max().unwrap_or(0);
        Ok(KernelSweep {
            levels: levels.to_vec(),
            nodes: nodes.to_vec(),
            root,
            from_nodes,
            rel_error: (2.0 * sweep_error_units(tri, max) + 1.0) * UNIT_ROUNDOFF,
        })
    }

    /// `V^{ν κ}` at `nodes[node]` with `ν = levels[level]`.
    pub fn value(&self, level: usize, kappa: usize, node: usize) -> f64 {
        let num = self.from_nodes[node][level][kappa];
        if num.is_zero() {
            return 0.0;
        }
        num.ratio(self.root[level][kappa])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog_triangle;
    use crate::kernel::martin_kernel;
    use crate::rational::{pow_q, q, to_f64};

    #[test]
    fn scaled_arithmetic() {
        let a = Scaled::from_f64(3.0);
        let b = Scaled::from_f64(0.25);
        assert_eq!((a + b).to_f64(), 3.25);
        assert_eq!((a - b).to_f64(), 2.75);
        assert_eq!((a * b).to_f64(), 0.75);
        assert_eq!((a / b).to_f64(), 12.0);
        assert_eq!(Scaled::from_f64(5e-320).to_f64(), 5e-320);
        let huge = Scaled::from_f64(10.0).powi(4000);
        assert!((huge.ln() - 4000.0 * 10f64.ln()).abs() < 1e-9);
        assert!((huge.ratio(Scaled::from_f64(10.0).powi(3999)) - 10.0).abs() < 1e-10);
        assert!(Scaled::from_f64(2.0) > Scaled::from_f64(1.0));
    }

    #[test]
    fn from_rational_beyond_range() {
        let x = pow_q(&q(1, 3), 2000);
        let s = Scaled::from_q(&x);
        assert!((s.ln() + 2000.0 * 3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn float_window_matches_exact() {
        for (name, params) in [
            ("pascal", vec![]),
            ("q-pascal", vec![("q".to_string(), q(1, 3))]),
            ("stirling", vec![("alpha".to_string(), q(-1, 2))]),
            ("eulerian", vec![]),
        ] {
            let t = catalog_triangle(name, &params).unwrap();
            let target = NodeIndex { n: 40, k: 13 };
            let exact = martin_kernel(&t, target).unwrap();
            let fl = martin_window_float(&t, target, 5).unwrap();
            for n in 0..=5 {
                for k in 0..=n {
                    let e = to_f64(exact.get(n, k));
                    let f = fl.get(n, k);
                    assert!((e - f).abs() <= fl.rel_error * e.abs() + 1e-300, "{name} ({n},{k}) {e} {f}");
                }
            }
        }
    }

    #[test]
    fn forward_sweep_matches_backward_kernels() {
        let t = catalog_triangle("stirling", &[("alpha".to_string(), q(0, 1))]).unwrap();
        let nodes = [NodeIndex { n: 1, k: 0 }, NodeIndex { n: 2, k: 1 }];
        let levels = [10, 25];
        let sweep = KernelSweep::new(&t, &nodes, &levels).unwrap();
        for (li, &nu) in levels.iter().enumerate() {
            for kappa in 0..=nu {
                let exact = martin_kernel(&t, NodeIndex { n: nu, k: kappa }).unwrap();
                for (ni, node) in nodes.iter().enumerate() {
                    let e = to_f64(exact.get(node.n, node.k));
                    let f = sweep.value(li, kappa, ni);
                    assert!((e - f).abs() <= 1e-12 * e.abs().max(1e-300), "{nu} {kappa} {node}");
                }
            }
        }
    }

    #[test]
    fn deep_pascal_sweep_has_no_overflow() {
        let t = catalog_triangle("pascal", &[]).unwrap();
        let w = martin_window_float(&t, NodeIndex { n: 3000, k: 1500 }, 2).unwrap();
        assert!((w.get(1, 0) - 0.5).abs() < 1e-12);
        assert!(w.rel_error < 1e-10);
    }
}
