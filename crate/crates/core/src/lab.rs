//! Convergence experiments along boundary paths.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{extreme_kernel, BoundaryPoint, ExtInt, Family};
use crate::dims::dimensions;
use crate::error::{Error, Result};
use crate::float::{martin_window_float, KernelSweep};
use crate::kernel::{martin_kernel_window, KernelArray};
use crate::markov::{draw_exact, marginal_law, stochastic_leq, StochasticOrder};
use crate::rational::{format_q, parse_q, q, qi, to_f64, Q};
use crate::triangle::{MultiplicitySpec, NodeIndex};

/// Scaling `c(ν)` of a path.
#[derive(Debug, Clone, PartialEq)]
pub enum Scale {
    /// `c(ν) = ν`
    Linear,
    /// `c(ν) = ln ν`
    Log,
    /// `c(ν) = ν^a`
    Power(Q),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    HalfUp,
    Floor,
}

/// A rule `ν ↦ κ(ν)` approaching the boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum PathSpec {
    /// `κ(ν) = min(m, ν)`; `m = inf` is the right edge `κ = ν`.
    Constant(ExtInt),
    /// `κ(ν) = clamp(round(s·c(ν)), 0, ν)`.
    Scaled { s: Q, scale: Scale, rounding: Rounding },
}

impl PathSpec {
    pub fn scaled(s: Q, scale: Scale) -> PathSpec {
        PathSpec::Scaled {
            s,
            scale,
            rounding: Rounding::HalfUp,
        }
    }

    pub fn kappa(&self, nu: usize) -> usize {
        match self {
            PathSpec::Constant(ExtInt::Infinite) => nu,
            PathSpec::Constant(ExtInt::Finite(m)) => (*m).clamp(0, nu as i64) as usize,
            PathSpec::Scaled { s, scale, rounding } => {
                let target = match scale {
                    // exact for rational s
                    Scale::Linear => {
                        let x = s * qi(nu as i64);
                        let r = match rounding {
                            Rounding::HalfUp => (x + q(1, 2)).floor(),
                            Rounding::Floor => x.floor(),
                        };
                        return r.to_integer().to_i64().unwrap_or(i64::MAX).clamp(0, nu as i64) as usize;
                    }
                    Scale::Log => to_f64(s) * (nu.max(1) as f64).ln(),
                    Scale::Power(a) => to_f64(s) * (nu as f64).powf(to_f64(a)),
                };
                let r = match rounding {
                    Rounding::HalfUp => (target + 0.5).floor(),
                    Rounding::Floor => target.floor(),
                };
                r.clamp(0.0, nu as f64) as usize
            }
        }
    }
}

impl fmt::Display for PathSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathSpec::Constant(m) => write!(f, "m={m}"),
            PathSpec::Scaled { s, scale, rounding } => {
                let c = match scale {
                    Scale::Linear => "nu".to_string(),
                    Scale::Log => "log".to_string(),
                    Scale::Power(a) => format!("nu^{}", format_q(a)),
                };
                write!(f, "s={},c={c}", format_q(s))?;
                if *rounding == Rounding::Floor {
                    write!(f, ",round=floor")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for PathSpec {
    type Err = Error;

    /// `m=3`, `m=inf`, `s=1/2,c=nu`, `s=1,c=log`, `s=2,c=nu^1/2`, optionally
    /// followed by `,round=floor`.
    fn from_str(text: &str) -> Result<PathSpec> {
        let mut s = None;
        let mut scale = Scale::Linear;
        let mut rounding = Rounding::HalfUp;
        for part in text.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("path `{text}`: expected key=value")))?;
            match key.trim() {
                "m" => return Ok(PathSpec::Constant(value.parse()?)),
                "s" => s = Some(parse_q(value)?),
                "c" => {
                    scale = match value.trim() {
                        "nu" | "ν" => Scale::Linear,
                        "log" | "lognu" => Scale::Log,
                        v => match v.strip_prefix("nu^") {
                            Some(a) => Scale::Power(parse_q(a)?),
                            None => return Err(Error::Invalid(format!("unknown scaling `{v}`"))),
                        },
                    }
                }
                "round" => {
                    rounding = match value.trim() {
                        "floor" => Rounding::Floor,
                        "half-up" => Rounding::HalfUp,
                        v => return Err(Error::Invalid(format!("unknown rounding `{v}`"))),
                    }
                }
                k => return Err(Error::Invalid(format!("unknown path key `{k}`"))),
            }
        }
        let s = s.ok_or_else(|| Error::Invalid(format!("path `{text}` needs `s` or `m`")))?;
        if s < Q::zero() {
            return Err(Error::Invalid("path scale s must be >= 0".into()));
        }
        Ok(PathSpec::Scaled { s, scale, rounding })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    Exact,
    Float,
    /// Exact up to [`AUTO_EXACT_LIMIT`], floating above.
    Auto,
}

pub const AUTO_EXACT_LIMIT: usize = 500;

impl Precision {
    fn exact_at(self, nu: usize) -> bool {
        match self {
            Precision::Exact => true,
            Precision::Float => false,
            Precision::Auto => nu <= AUTO_EXACT_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub precision: Precision,
    pub tol: f64,
    pub window_count: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            precision: Precision::Auto,
            tol: 1e-6,
            window_count: 3,
        }
    }
}

/// Restricted kernel `V^{ν,κ(ν)}` on levels `0..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub nu: usize,
    pub kappa: usize,
    pub exact: bool,
    pub rel_error: f64,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum LimitVerdict {
    Converged { limit: Vec<Vec<f64>> },
    Diverged { node: NodeIndex },
    Undecided,
}

impl LimitVerdict {
    pub fn limit(&self) -> Option<&[Vec<f64>]> {
        match self {
            LimitVerdict::Converged { limit } => Some(limit),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            LimitVerdict::Converged { .. } => "converged",
            LimitVerdict::Diverged { .. } => "diverged",
            LimitVerdict::Undecided => "undecided",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub triangle: String,
    pub path: String,
    pub n_max: usize,
    pub tol: f64,
    pub window_count: usize,
    pub samples: Vec<TraceSample>,
    pub verdict: LimitVerdict,
}

/// Compares the last `window_count` samples.
///
/// Converged when they are pairwise within `tol` in max-norm (the limit is
/// the last sample). Diverged when some coordinate moves strictly
/// monotonically across the window and ends outside `[0, bounds[n][k]]`.
pub fn estimate_limit(
    samples: &[Vec<Vec<f64>>],
    tol: f64,
    window_count: usize,
    bounds: Option<&[Vec<f64>]>,
) -> LimitVerdict {
    let w = window_count.max(1);
    if samples.len() < w || samples.is_empty() {
        return LimitVerdict::Undecided;
    }
    let tail = &samples[samples.len() - w..];
    let dist = |a: &Vec<Vec<f64>>, b: &Vec<Vec<f64>>| {
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };
    let close = tail
        .iter()
        .enumerate()
        .all(|(i, a)| tail[i + 1..].iter().all(|b| dist(a, b) <= tol));
    if close {
        return LimitVerdict::Converged {
            limit: tail[w - 1].clone(),
        };
    }
    let last = &tail[w - 1];
    for (n, row) in last.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            let bound = bounds.and_then(|b| b.get(n)?.get(k).copied()).unwrap_or(f64::INFINITY);
            if v >= 0.0 && v <= bound {
                continue;
            }
            let series: Vec<f64> = tail.iter().map(|s| s[n][k]).collect();
            let up = series.windows(2).all(|p| p[1] > p[0]);
            let down = series.windows(2).all(|p| p[1] < p[0]);
            if up || down {
                return LimitVerdict::Diverged {
                    node: NodeIndex { n, k },
                };
            }
        }
    }
    LimitVerdict::Undecided
}

fn window_rows(v: &KernelArray) -> Vec<Vec<f64>> {
    v.rows.iter().map(|r| r.iter().map(to_f64).collect()).collect()
}

/// One restricted Martin kernel, exact or floating per `precision`.
pub fn kernel_sample(
    tri: &MultiplicitySpec,
    target: NodeIndex,
    n_max: usize,
    precision: Precision,
) -> Result<TraceSample> {
    if precision.exact_at(target.n) {
        let v = martin_kernel_window(tri, target, n_max)?;
        Ok(TraceSample {
            nu: target.n,
            kappa: target.k,
            exact: true,
            rel_error: 0.0,
            rows: window_rows(&v),
        })
    } else {
        let w = martin_window_float(tri, target, n_max)?;
        Ok(TraceSample {
            nu: target.n,
            kappa: target.k,
            exact: false,
            rel_error: w.rel_error,
            rows: w.rows,
        })
    }
}

/// `V^{ν,κ(ν)}` restricted to levels `<= n_max` for each `ν` in `nus`.
///
/// Targets are evaluated in parallel; samples stay in `ν` order.
pub fn path_kernel_sequence(
    tri: &MultiplicitySpec,
    path: &PathSpec,
    n_max: usize,
    nus: &[usize],
    opts: SweepOptions,
) -> Result<ConvergenceTrace> {
    if nus.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("ν list must be strictly increasing".into()));
    }
    if nus.first().is_some_and(|&nu| nu <= n_max) {
        return Err(Error::Invalid("every ν must exceed the window depth".into()));
    }
    let samples = nus
        .par_iter()
        .map(|&nu| kernel_sample(tri, NodeIndex { n: nu, k: path.kappa(nu) }, n_max, opts.precision))
        .collect::<Result<Vec<_>>>()?;
    let dims = dimensions(tri, n_max)?;
    let bounds: Vec<Vec<f64>> = dims
        .rows
        .iter()
        .map(|r| r.iter().map(|d| 1.0 / to_f64(d)).collect())
        .collect();
    let rows: Vec<Vec<Vec<f64>>> = samples.iter().map(|s| s.rows.clone()).collect();
    let verdict = estimate_limit(&rows, opts.tol, opts.window_count, Some(&bounds));
    Ok(ConvergenceTrace {
        triangle: tri.describe(),
        path: path.to_string(),
        n_max,
        tol: opts.tol,
        window_count: opts.window_count,
        samples,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteTrace {
    pub m: usize,
    /// `(n, V_{n,m}(m)·D_{n,m})` for `n = m..=depth`.
    #[serde(with = "serde_pairs")]
    pub values: Vec<(usize, Q)>,
}

mod serde_pairs {
    use crate::rational::{format_q, parse_q, Q};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[(usize, Q)], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|(n, x)| (*n, format_q(x)))
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(usize, Q)>, D::Error> {
        Vec::<(usize, String)>::deserialize(d)?
            .into_iter()
            .map(|(n, x)| Ok((n, parse_q(&x).map_err(serde::de::Error::custom)?)))
            .collect()
    }
}

impl DiscreteTrace {
    /// `1 - V_{n,m}D_{n,m}` along the trace.
    pub fn distances(&self) -> Vec<Q> {
        self.values.iter().map(|(_, v)| Q::one() - v).collect()
    }

    pub fn is_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1].1 >= w[0].1)
    }
}

/// Mass `V_{n,m}(m)·D_{n,m}` that the member `m` of a family keeps on column
/// `m`; tending to 1 makes `V(m)` extreme with `K_n → m`.
pub fn discrete_boundary_check(
    tri: &MultiplicitySpec,
    family: &dyn Fn(usize, usize) -> Result<KernelArray>,
    m: usize,
    depth: usize,
) -> Result<DiscreteTrace> {
    if m > depth {
        return Err(Error::Invalid(format!("m = {m} exceeds depth {depth}")));
    }
    let v = family(m, depth)?;
    let dims = dimensions(tri, depth)?;
    let values = (m..=depth).map(|n| (n, v.get(n, m) * dims.at(n, m))).collect();
    Ok(DiscreteTrace { m, values })
}

/// Harmonic function whose chain is simulated forward.
#[derive(Debug, Clone)]
pub enum KernelSource {
    Extreme(BoundaryPoint),
    Array(KernelArray),
}

/// Forward transition `P(K_{n+1} = k | K_n = k) = left(n,k)·V_{n+1,k}/V_nk`.
enum ForwardRule {
    Constant(Q),
    QPascal { q: Q, m: ExtInt },
    Eulerian(ExtInt),
    Table(KernelArray),
}

impl ForwardRule {
    fn build(tri: &MultiplicitySpec, source: &KernelSource, depth: usize) -> Result<ForwardRule> {
        let family = Family::of(tri);
        Ok(match (source, family) {
            (KernelSource::Extreme(BoundaryPoint::PascalX(x)), Some(Family::Pascal)) => ForwardRule::Constant(x.clone()),
            (KernelSource::Extreme(BoundaryPoint::QPascalM(m)), Some(Family::QPascal(qv))) if qv < Q::one() => {
                ForwardRule::QPascal { q: qv, m: *m }
            }
            (KernelSource::Extreme(BoundaryPoint::EulerianM(m)), Some(Family::Eulerian)) => ForwardRule::Eulerian(*m),
            (KernelSource::Extreme(point), _) => ForwardRule::Table(extreme_kernel(tri, point, depth)?),
            (KernelSource::Array(v), _) => {
                if v.depth < depth {
                    return Err(Error::Invalid(format!("kernel depth {} below ν = {depth}", v.depth)));
                }
                ForwardRule::Table(v.clone())
            }
        })
    }

    fn stay(&self, tri: &MultiplicitySpec, n: usize, k: usize) -> Result<Q> {
        Ok(match self {
            ForwardRule::Constant(x) => x.clone(),
            ForwardRule::QPascal { q: qv, m } => match m {
                ExtInt::Infinite => Q::zero(),
                ExtInt::Finite(m) => crate::rational::pow_q(qv, *m - k as i64),
            },
            ForwardRule::Eulerian(m) => {
                let base = qi(k as i64 + 1) / qi(n as i64 + 2);
                match m {
                    ExtInt::Infinite => base,
                    ExtInt::Finite(m) => base * (Q::one() + qi((n + 1 - k) as i64) / qi(*m)),
                }
            }
            ForwardRule::Table(v) => {
                let here = v.get(n, k);
                if here.is_zero() {
                    return Err(Error::Internal(format!("chain reached a null node ({n},{k})")));
                }
                tri.left(n, k)? * v.get(n + 1, k) / here
            }
        })
    }

    fn value_10(&self, tri: &MultiplicitySpec, source: &KernelSource) -> Result<Q> {
        match (self, source) {
            (ForwardRule::Table(v), _) => Ok(v.get(1, 0).clone()),
            (_, KernelSource::Extreme(p)) => Ok(extreme_kernel(tri, p, 1)?.get(1, 0).clone()),
            (_, KernelSource::Array(v)) => Ok(v.get(1, 0).clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointStat {
    pub nu: usize,
    pub mean_deviation: f64,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleStats {
    pub triangle: String,
    pub trials: usize,
    pub seed: u64,
    pub reference_v10: f64,
    pub checkpoints: Vec<CheckpointStat>,
}

/// Samples chains under `P_V` and measures `|V^{ν,K_ν}_{1,0} - V_{1,0}|` at
/// each checkpoint `ν`.
///
/// Each trial runs the chain forward from the root with the transitions
/// `left(n,k)V_{n+1,k}/V_nk`, which gives `K_ν` exactly the marginal law
/// `D_{νk}V_{νk}` at every checkpoint simultaneously. Trial `i` uses
/// ChaCha stream `i` of `seed`.
pub fn martingale_experiment(
    tri: &MultiplicitySpec,
    source: &KernelSource,
    checkpoints: &[usize],
    trials: usize,
    seed: u64,
) -> Result<MartingaleStats> {
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[1] <= w[0]) || checkpoints[0] < 1 {
        return Err(Error::Invalid("checkpoints must be increasing and >= 1".into()));
    }
    let nu_max = *checkpoints.last().unwrap();
    let rule = ForwardRule::build(tri, source, nu_max)?;
    let reference = to_f64(&rule.value_10(tri, source)?);
    let sweep = KernelSweep::new(tri, &[NodeIndex { n: 1, k: 0 }], checkpoints)?;
    let states: Vec<Vec<usize>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let mut k = 0usize;
            let mut at = Vec::with_capacity(checkpoints.len());
            let mut next_cp = 0;
            for n in 0..nu_max {
                let stay = rule.stay(tri, n, k)?;
                let probs = [stay.clone(), Q::one() - stay];
                if draw_exact(&probs, &mut rng) == 1 {
                    k += 1;
                }
                if n + 1 == checkpoints[next_cp] {
                    at.push(k);
                    next_cp += 1;
                }
            }
            Ok(at)
        })
        .collect::<Result<Vec<_>>>()?;
    let stats = checkpoints
        .iter()
        .enumerate()
        .map(|(i, &nu)| {
            let devs: Vec<f64> = states
                .iter()
                .map(|s| (sweep.value(i, s[i], 0) - reference).abs())
                .collect();
            CheckpointStat {
                nu,
                mean_deviation: devs.iter().sum::<f64>() / devs.len().max(1) as f64,
                max_deviation: devs.iter().copied().fold(0.0, f64::max),
            }
        })
        .collect();
    Ok(MartingaleStats {
        triangle: tri.describe(),
        trials,
        seed,
        reference_v10: reference,
        checkpoints: stats,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub param: String,
    pub path: String,
    pub verdict: String,
    /// `V_{n,0}` of the last sample, `n = 0..=n_max`.
    pub first_column: Vec<f64>,
}

/// Runs [`path_kernel_sequence`] across a parameter family.
pub fn phase_transition_sweep(
    family: &dyn Fn(&Q) -> Result<MultiplicitySpec>,
    params: &[Q],
    path_for: &dyn Fn(&Q) -> PathSpec,
    n_max: usize,
    nus: &[usize],
    opts: SweepOptions,
) -> Result<Vec<PhaseRow>> {
    params
        .iter()
        .map(|p| {
            let tri = family(p)?;
            let path = path_for(p);
            let trace = path_kernel_sequence(&tri, &path, n_max, nus, opts)?;
            let last = trace
                .samples
                .last()
                .ok_or_else(|| Error::Invalid("empty ν list".into()))?;
            Ok(PhaseRow {
                param: format_q(p),
                path: path.to_string(),
                verdict: trace.verdict.label().to_string(),
                first_column: last.rows.iter().map(|r| r[0]).collect(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderCheck {
    pub first: usize,
    pub second: usize,
    pub coordinate_greater: bool,
    pub orders: Vec<StochasticOrder>,
    pub consistent: bool,
}

/// For each pair of harmonic arrays, compares the order of their boundary
/// coordinates with the stochastic order of their marginals on levels `1..=depth`.
pub fn order_consistency(tri: &MultiplicitySpec, kernels: &[KernelArray], depth: usize) -> Result<Vec<OrderCheck>> {
    let dims = dimensions(tri, depth)?;
    let l00 = tri.left(0, 0)?;
    let mut out = Vec::new();
    for i in 0..kernels.len() {
        for j in 0..kernels.len() {
            if i == j {
                continue;
            }
            let ci = &l00 * kernels[i].get(1, 0);
            let cj = &l00 * kernels[j].get(1, 0);
            let orders = (1..=depth)
                .map(|n| {
                    stochastic_leq(
                        &marginal_law(tri, &dims, &kernels[i], n)?,
                        &marginal_law(tri, &dims, &kernels[j], n)?,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let all_less = orders.iter().all(|o| *o == StochasticOrder::StrictlyLess);
            out.push(OrderCheck {
                first: i,
                second: j,
                coordinate_greater: ci > cj,
                consistent: (ci > cj) == all_less,
                orders,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog_triangle, ExtQ};
    use crate::rational::pow_q;

    fn pascal() -> MultiplicitySpec {
        catalog_triangle("pascal", &[]).unwrap()
    }

    fn qp(qv: Q) -> MultiplicitySpec {
        catalog_triangle("q-pascal", &[("q".into(), qv)]).unwrap()
    }

    #[test]
    fn path_rounding() {
        let p = PathSpec::scaled(q(1, 2), Scale::Linear);
        assert_eq!(p.kappa(7), 4); // 3.5 rounds up
        let f: PathSpec = "s=1/2,c=nu,round=floor".parse().unwrap();
        assert_eq!(f.kappa(7), 3);
        let l: PathSpec = "s=1,c=log".parse().unwrap();
        assert_eq!(l.kappa(1000), 7); // ln 1000 = 6.9
        let pw: PathSpec = "s=2,c=nu^1/2".parse().unwrap();
        assert_eq!(pw.kappa(100), 20);
        assert_eq!(PathSpec::Constant(ExtInt::Finite(5)).kappa(3), 3);
        assert_eq!(PathSpec::Constant(ExtInt::Infinite).kappa(9), 9);
        assert_eq!("m=inf".parse::<PathSpec>().unwrap(), PathSpec::Constant(ExtInt::Infinite));
        assert!("s=-1,c=nu".parse::<PathSpec>().is_err());
        assert!("c=nu".parse::<PathSpec>().is_err());
        assert_eq!(f.to_string().parse::<PathSpec>().unwrap(), f);
    }

    #[test]
    fn constant_sequence_converges() {
        let s = vec![vec![vec![1.0], vec![0.3, 0.7]]; 4];
        assert_eq!(
            estimate_limit(&s, 1e-6, 3, None),
            LimitVerdict::Converged { limit: s[0].clone() }
        );
    }

    #[test]
    fn harmonic_decay_is_undecided() {
        let s: Vec<Vec<Vec<f64>>> = (1..6).map(|i| vec![vec![1.0 / i as f64]]).collect();
        assert_eq!(estimate_limit(&s, 1e-6, 3, None), LimitVerdict::Undecided);
        assert_eq!(estimate_limit(&s[..2], 1e-6, 3, None), LimitVerdict::Undecided);
    }

    #[test]
    fn runaway_coordinate_diverges() {
        let s: Vec<Vec<Vec<f64>>> = (1..5).map(|i| vec![vec![i as f64]]).collect();
        let bounds = vec![vec![1.0]];
        assert_eq!(
            estimate_limit(&s, 1e-6, 3, Some(&bounds)),
            LimitVerdict::Diverged { node: NodeIndex { n: 0, k: 0 } }
        );
    }

    #[test]
    fn pascal_parity_artifacts_within_tolerance() {
        let trace = path_kernel_sequence(
            &pascal(),
            &PathSpec::scaled(q(1, 2), Scale::Linear),
            2,
            &[4001, 4002, 4003],
            SweepOptions { tol: 1e-3, ..Default::default() },
        )
        .unwrap();
        let limit = trace.verdict.limit().expect("converged");
        assert!((limit[1][0] - 0.5).abs() < 1e-3);
        // exact formula 1 - κ/ν
        for s in &trace.samples {
            assert!((s.rows[1][0] - (1.0 - s.kappa as f64 / s.nu as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn qpascal_constant_path_limit() {
        let t = qp(q(1, 2));
        let trace = path_kernel_sequence(
            &t,
            &PathSpec::Constant(ExtInt::Finite(1)),
            4,
            &[60, 80, 100],
            SweepOptions::default(),
        )
        .unwrap();
        let limit = trace.verdict.limit().expect("converged");
        for (n, row) in limit.iter().enumerate() {
            assert!((row[0] - 0.5f64.powi(n as i32)).abs() < 1e-9);
        }
    }

    #[test]
    fn stirling_log_path_limit() {
        // V_{n0}(s=1) = 1/(2)_n = 1/(n+1)!; convergence in ν is slow (log scale)
        let t = catalog_triangle("stirling", &[("alpha".into(), qi(0))]).unwrap();
        let path = PathSpec::scaled(qi(1), Scale::Log);
        let nu = 200_000;
        let s = kernel_sample(&t, NodeIndex { n: nu, k: path.kappa(nu) }, 3, Precision::Float).unwrap();
        let expected = [1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];
        for (row, e) in s.rows.iter().zip(expected) {
            assert!((row[0] - e).abs() < 0.1 * e, "{}", row[0]);
        }
    }

    #[test]
    fn discrete_check_qpascal() {
        let t = qp(q(1, 2));
        let fam = |m: usize, depth: usize| extreme_kernel(&t, &BoundaryPoint::QPascalM(ExtInt::Finite(m as i64)), depth);
        let tr = discrete_boundary_check(&t, &fam, 1, 12).unwrap();
        for (n, v) in &tr.values {
            assert_eq!(v, &(Q::one() - pow_q(&q(1, 2), *n as i64)));
        }
        assert!(tr.is_increasing());
        let tr0 = discrete_boundary_check(&t, &fam, 0, 12).unwrap();
        assert!(tr0.values.iter().all(|(_, v)| v.is_one()));
    }

    #[test]
    fn discrete_check_stirling() {
        let t = catalog_triangle("stirling", &[("alpha".into(), qi(-1))]).unwrap();
        let fam = |m: usize, depth: usize| {
            extreme_kernel(&t, &BoundaryPoint::StirlingM(ExtInt::Finite(m as i64)), depth)
        };
        let tr = discrete_boundary_check(&t, &fam, 0, 15).unwrap();
        assert!(tr.values.iter().all(|(_, v)| v.is_one()));
        let tr = discrete_boundary_check(&t, &fam, 1, 60).unwrap();
        assert!(tr.is_increasing());
        for (n, v) in &tr.values {
            assert_eq!(v, &q(*n as i64, *n as i64 + 2));
        }
    }

    #[test]
    fn trivial_martingale_has_no_deviation() {
        let t = pascal();
        let stats =
            martingale_experiment(&t, &KernelSource::Extreme(BoundaryPoint::PascalX(qi(1))), &[10, 50], 20, 7).unwrap();
        assert!(stats.checkpoints.iter().all(|c| c.max_deviation == 0.0));
    }

    #[test]
    fn qpascal_martingale_settles() {
        let t = qp(q(1, 2));
        let stats = martingale_experiment(
            &t,
            &KernelSource::Extreme(BoundaryPoint::QPascalM(ExtInt::Finite(2))),
            &[10, 40, 160],
            50,
            11,
        )
        .unwrap();
        assert!((stats.reference_v10 - 0.25).abs() < 1e-15);
        let last = stats.checkpoints.last().unwrap();
        assert!(last.max_deviation < 1e-9, "{last:?}");
    }

    #[test]
    fn martingale_is_reproducible() {
        let t = catalog_triangle("eulerian", &[]).unwrap();
        let src = KernelSource::Extreme(BoundaryPoint::EulerianM(ExtInt::Finite(4)));
        let a = martingale_experiment(&t, &src, &[20, 80], 30, 5).unwrap();
        let b = martingale_experiment(&t, &src, &[20, 80], 30, 5).unwrap();
        assert_eq!(a, b);
        let table = KernelSource::Array(extreme_kernel(&t, &BoundaryPoint::EulerianM(ExtInt::Finite(4)), 80).unwrap());
        let c = martingale_experiment(&t, &table, &[20, 80], 30, 5).unwrap();
        assert_eq!(a.checkpoints, c.checkpoints);
    }

    #[test]
    fn phase_sweep_qpascal() {
        let fam = |qv: &Q| catalog_triangle("q-pascal", &[("q".into(), qv.clone())]);
        let rows = phase_transition_sweep(
            &fam,
            &[q(1, 2), qi(1)],
            &|_| PathSpec::Constant(ExtInt::Finite(1)),
            2,
            &[100, 150, 200],
            SweepOptions::default(),
        )
        .unwrap();
        assert!((rows[0].first_column[1] - 0.5).abs() < 1e-9);
        // q = 1 with a constant path drifts to the trivial V_{n0} = 1
        assert!(rows[1].first_column[1] > 0.99);
    }

    #[test]
    fn order_consistency_on_catalog_extremes() {
        let t = qp(q(1, 3));
        let ks: Vec<KernelArray> = [0, 1, 3]
            .iter()
            .map(|&m| extreme_kernel(&t, &BoundaryPoint::QPascalM(ExtInt::Finite(m)), 5).unwrap())
            .collect();
        let checks = order_consistency(&t, &ks, 5).unwrap();
        assert!(checks.iter().all(|c| c.consistent));
        let s = catalog_triangle("stirling", &[("alpha".into(), qi(0))]).unwrap();
        let ks: Vec<KernelArray> = [qi(0), q(1, 2), qi(3)]
            .into_iter()
            .map(|v| extreme_kernel(&s, &BoundaryPoint::StirlingS(ExtQ::Finite(v)), 5).unwrap())
            .collect();
        assert!(order_consistency(&s, &ks, 5).unwrap().iter().all(|c| c.consistent));
    }
}
