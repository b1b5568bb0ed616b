//! Mixtures of harmonic functions: synthesis, inversion, and moment checks.

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::catalog::{catalog_triangle, extreme_first_column, BoundaryPoint, ExtInt};
use crate::error::{Error, Result};
use crate::kernel::{kernel_from_first_column, KernelArray, MembershipVerdict};
use crate::rational::{to_f64, Q};
use crate::triangle::MultiplicitySpec;

pub const SOLVER_TOL: f64 = 1e-10;
pub const SOLVER_MAX_ITER: usize = 100_000;
/// Residual above which a fit is flagged as not representable.
pub const RESIDUAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedAtom {
    pub point: BoundaryPoint,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingMeasure {
    pub triangle: String,
    pub depth: usize,
    pub atoms: Vec<WeightedAtom>,
    /// `‖A·p − first_col‖₂`.
    pub residual: f64,
    pub representable: bool,
    /// `‖p − Π(p − ∇f(p))‖∞` at termination.
    pub gradient_norm: f64,
    pub iterations: usize,
    /// Ratio of extreme singular values of the design matrix.
    pub condition_number: f64,
    /// `exact atoms` or `grid, spacing h`.
    pub discretization: String,
    pub warnings: Vec<String>,
}

impl MixingMeasure {
    pub fn weights(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.weight).collect()
    }
}

/// Pointwise convex combination `Σ w_i V_i`.
pub fn synthesize_mixture(kernels: &[KernelArray], weights: &[Q]) -> Result<KernelArray> {
    if kernels.is_empty() {
        return Err(Error::EmptyAtoms);
    }
    if kernels.len() != weights.len() {
        return Err(Error::LengthMismatch {
            expected: kernels.len(),
            got: weights.len(),
        });
    }
    let depth = kernels[0].depth;
    if let Some(bad) = kernels.iter().find(|v| v.depth != depth) {
        return Err(Error::LevelMismatch(depth, bad.depth));
    }
    if weights.iter().any(|w| *w < Q::zero()) {
        return Err(Error::Invalid("mixture weights must be nonnegative".into()));
    }
    let total: Q = weights.iter().sum();
    if !total.is_one() {
        return Err(Error::WeightSum(crate::rational::format_q(&total)));
    }
    KernelArray::from_fn(depth, |n, k| {
        Ok(kernels.iter().zip(weights).map(|(v, w)| w * v.get(n, k)).sum())
    })
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (i, x) in u.iter().enumerate() {
        acc += x;
        let t = (acc - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

struct Fit {
    p: Vec<f64>,
    iterations: usize,
    gradient_norm: f64,
}

/// Least squares on `span(free)` intersected with `Σp = 1`.
fn solve_on_face(a: &DMatrix<f64>, b: &DVector<f64>, free: &[usize]) -> Vec<f64> {
    let mut p = vec![0.0; a.ncols()];
    let f0 = free[0];
    if free.len() == 1 {
        p[f0] = 1.0;
        return p;
    }
    let m = DMatrix::from_fn(a.nrows(), free.len() - 1, |r, c| a[(r, free[c + 1])] - a[(r, f0)]);
    let rhs = b - a.column(f0);
    let svd = m.svd(true, true);
    let eps = svd.singular_values.max() * 1e-14;
    let y = svd.solve(&rhs, eps).expect("singular vectors were computed");
    p[f0] = 1.0 - y.sum();
    for (i, &j) in free[1..].iter().enumerate() {
        p[j] = y[i];
    }
    p
}

/// Primal active-set method for `min ‖Ap − b‖₂, p ≥ 0, Σp = 1`, started at
/// the uniform measure.
fn simplex_least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Fit {
    let cols = a.ncols();
    let mut p = vec![1.0 / cols as f64; cols];
    let mut free: Vec<usize> = (0..cols).collect();
    let grad = |p: &[f64]| -> Vec<f64> {
        let r = a * DVector::from_column_slice(p) - b;
        (a.transpose() * r).iter().copied().collect()
    };
    let gradient_norm = |p: &[f64]| -> f64 {
        let g = grad(p);
        let shifted: Vec<f64> = p.iter().zip(&g).map(|(x, d)| x - d).collect();
        p.iter()
            .zip(project_simplex(&shifted))
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };
    let mut iterations = 0;
    while iterations < SOLVER_MAX_ITER {
        iterations += 1;
        let target = solve_on_face(a, b, &free);
        let blocking = free
            .iter()
            .filter(|&&j| target[j] < 0.0)
            .map(|&j| (p[j] / (p[j] - target[j]), j))
            .min_by(|x, y| x.0.total_cmp(&y.0));
        match blocking {
            None => {
                p = target;
                let g = grad(&p);
                let lambda = free.iter().map(|&j| g[j]).sum::<f64>() / free.len() as f64;
                let scale = g.iter().fold(1e-300f64, |m, x| m.max(x.abs()));
                let entering = (0..cols)
                    .filter(|j| !free.contains(j))
                    .map(|j| (g[j] - lambda, j))
                    .filter(|(mu, _)| *mu < -1e-13 * scale.max(1.0))
                    .min_by(|x, y| x.0.total_cmp(&y.0));
                match entering {
                    Some((_, j)) => {
                        free.push(j);
                        free.sort_unstable();
                    }
                    None => break,
                }
            }
            Some((alpha, _)) => {
                for &j in &free {
                    p[j] += alpha * (target[j] - p[j]);
                }
                let before = free.len();
                free.retain(|&j| p[j] > 1e-15);
                for (j, x) in p.iter_mut().enumerate() {
                    if !free.contains(&j) {
                        *x = 0.0;
                    }
                }
                if free.is_empty() || free.len() == before {
                    // numerical stall: fall back to the best vertex
                    let best = (0..cols)
                        .min_by(|&x, &y| {
                            let rx = (a.column(x) - b).norm();
                            let ry = (a.column(y) - b).norm();
                            rx.total_cmp(&ry)
                        })
                        .unwrap_or(0);
                    if free.is_empty() {
                        free.push(best);
                    }
                    if free.len() == before {
                        break;
                    }
                }
            }
        }
    }
    let total: f64 = p.iter().sum();
    for x in &mut p {
        *x = x.max(0.0) / total;
    }
    let gradient_norm = gradient_norm(&p);
    Fit {
        p,
        iterations,
        gradient_norm,
    }
}

fn condition_number(a: &DMatrix<f64>) -> f64 {
    let sv = a.singular_values();
    let (lo, hi) = (sv.min(), sv.max());
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

fn discretization_note(atoms: &[BoundaryPoint]) -> String {
    let coords: Option<Vec<f64>> = atoms
        .iter()
        .map(|a| match a {
            BoundaryPoint::PascalX(x) => Some(to_f64(x)),
            BoundaryPoint::StirlingS(crate::catalog::ExtQ::Finite(s)) => Some(to_f64(s)),
            _ => None,
        })
        .collect();
    match coords {
        Some(mut c) if c.len() > 1 => {
            c.sort_by(f64::total_cmp);
            let h = c.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
            format!("grid, spacing {h:.6}")
        }
        _ => "exact atoms".to_string(),
    }
}

/// Design matrix with column `j` equal to `V_{•,0}` of atom `j`.
pub fn design_matrix(tri: &MultiplicitySpec, atoms: &[BoundaryPoint], depth: usize) -> Result<Vec<Vec<Q>>> {
    atoms.iter().map(|a| extreme_first_column(tri, a, depth)).collect()
}

/// Recovers mixing weights over `atoms` from a first column.
pub fn invert_mixture(
    tri: &MultiplicitySpec,
    first_col: &[Q],
    atoms: &[BoundaryPoint],
    depth: usize,
) -> Result<MixingMeasure> {
    if atoms.is_empty() {
        return Err(Error::EmptyAtoms);
    }
    if first_col.len() < depth + 1 {
        return Err(Error::LengthMismatch {
            expected: depth + 1,
            got: first_col.len(),
        });
    }
    if !first_col[0].is_one() {
        return Err(Error::Invalid("first column must start with 1".into()));
    }
    let cols = design_matrix(tri, atoms, depth)?;
    let a = DMatrix::from_fn(depth + 1, atoms.len(), |r, c| to_f64(&cols[c][r]));
    let b = DVector::from_iterator(depth + 1, first_col[..=depth].iter().map(to_f64));
    let fit = simplex_least_squares(&a, &b);
    let residual = (&a * DVector::from_column_slice(&fit.p) - &b).norm();
    let mut warnings = Vec::new();
    if depth < 2 * atoms.len() {
        warnings.push(format!(
            "depth {depth} below twice the atom count {}; weights may be ill-determined",
            atoms.len()
        ));
    }
    if fit.gradient_norm > SOLVER_TOL {
        warnings.push(format!(
            "solver stopped with gradient-mapping norm {:.3e} after {} iterations",
            fit.gradient_norm, fit.iterations
        ));
    }
    let representable = residual <= RESIDUAL_TOL;
    if !representable {
        warnings.push(format!("not representable over given atoms (residual {residual:.3e})"));
    }
    Ok(MixingMeasure {
        triangle: tri.describe(),
        depth,
        atoms: atoms
            .iter()
            .zip(&fit.p)
            .map(|(point, &weight)| WeightedAtom {
                point: point.clone(),
                weight,
            })
            .collect(),
        residual,
        representable,
        gradient_norm: fit.gradient_norm,
        iterations: fit.iterations,
        condition_number: condition_number(&a),
        discretization: discretization_note(atoms),
        warnings,
    })
}

/// Classical complete monotonicity of a moment sequence on its window.
pub fn hausdorff_check(first_col: &[Q]) -> Result<MembershipVerdict> {
    if first_col.is_empty() {
        return Err(Error::Invalid("empty sequence".into()));
    }
    let pascal = catalog_triangle("pascal", &[])?;
    Ok(kernel_from_first_column(&pascal, first_col, first_col.len() - 1)?.1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmReport {
    pub verdict: MembershipVerdict,
    pub kernel: KernelArray,
    /// Inversion over `q^m` atoms, present for accepted sequences.
    pub cross_check: Option<MixingMeasure>,
}

/// Generalized complete monotonicity for the q-Pascal triangle, `0 < q < 1`.
pub fn qpascal_cm_check(qv: &Q, first_col: &[Q], depth: usize) -> Result<CmReport> {
    if *qv <= Q::zero() || *qv >= Q::one() {
        return Err(Error::InvalidParameter(format!("q must lie in (0,1), got {qv}")));
    }
    if first_col.len() < depth + 1 {
        return Err(Error::LengthMismatch {
            expected: depth + 1,
            got: first_col.len(),
        });
    }
    let tri = catalog_triangle("q-pascal", &[("q".into(), qv.clone())])?;
    let (kernel, verdict) = kernel_from_first_column(&tri, &first_col[..=depth], depth)?;
    let cross_check = if verdict.accepted && depth > 0 {
        let mut atoms: Vec<BoundaryPoint> = (0..=(depth / 2) as i64)
            .map(|m| BoundaryPoint::QPascalM(ExtInt::Finite(m)))
            .collect();
        atoms.push(BoundaryPoint::QPascalM(ExtInt::Infinite));
        Some(invert_mixture(&tri, first_col, &atoms, depth)?)
    } else {
        None
    };
    Ok(CmReport {
        verdict,
        kernel,
        cross_check,
    })
}
