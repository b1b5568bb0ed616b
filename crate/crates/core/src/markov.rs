//! The backward Markov chain on the triangle.
//!
//! Going down one level from `(n, k)` the chain moves to `(n-1, k)` or
//! `(n-1, k-1)` with probabilities fixed by the multiplicities alone:
//!
//! ```text
//! P(K_{n-1} = j | K_n = k) = D_{n-1,j}/D_{nk} · (left(n-1,j)·[j = k] + right(n-1,j)·[j = k-1])
//! ```
//!
//! A harmonic array `V` fixes the marginals `P(K_n = k) = D_nk·V_nk`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dims::{dimensions, dimensions_from, require_level, DimensionTable};
use crate::error::{Error, Result};
use crate::kernel::{verify_harmonic, KernelArray};
use crate::rational::Q;
use crate::triangle::{MultiplicitySpec, NodeIndex};

/// Law of `K_n` on `{0, ..., n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelLaw {
    pub n: usize,
    #[serde(with = "serde_law")]
    pub probs: Vec<Q>,
}

mod serde_law {
    use crate::rational::{format_q, parse_q, Q};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(format_q).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| parse_q(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

impl LevelLaw {
    pub fn point_mass(n: usize, k: usize) -> LevelLaw {
        let mut probs = vec![Q::zero(); n + 1];
        probs[k] = Q::one();
        LevelLaw { n, probs }
    }

    pub fn total(&self) -> Q {
        self.probs.iter().sum()
    }

    /// Tail sums `P(K >= t)` for `t = 0..=n`.
    pub fn tails(&self) -> Vec<Q> {
        let mut acc = Q::zero();
        let mut out: Vec<Q> = self
            .probs
            .iter()
            .rev()
            .map(|p| {
                acc += p;
                acc.clone()
            })
            .collect();
        out.reverse();
        out
    }
}

pub fn backward_transition(
    tri: &MultiplicitySpec,
    dims: &DimensionTable,
    n: usize,
    k: usize,
) -> Result<LevelLaw> {
    if n == 0 || k > n {
        return Err(Error::NodeOutOfRange(NodeIndex { n, k }));
    }
    require_level(dims, n)?;
    let total = dims.at(n, k);
    let mut probs = vec![Q::zero(); n];
    if k < n {
        probs[k] = dims.at(n - 1, k) * tri.left(n - 1, k)? / &total;
    }
    if k > 0 {
        probs[k - 1] = dims.at(n - 1, k - 1) * tri.right(n - 1, k - 1)? / &total;
    }
    Ok(LevelLaw { n: n - 1, probs })
}

/// `P(K_n = k) = D_nk·V_nk`; rejects `V` unless it is harmonic, nonnegative
/// and normalized on levels `0..=n`.
pub fn marginal_law(
    tri: &MultiplicitySpec,
    dims: &DimensionTable,
    v: &KernelArray,
    n: usize,
) -> Result<LevelLaw> {
    require_level(dims, n)?;
    if n > v.depth {
        return Err(Error::Invalid(format!("kernel depth {} below level {n}", v.depth)));
    }
    let report = verify_harmonic(tri, &v.truncate(n), n)?;
    if !report.is_clean() {
        return Err(Error::NotHarmonic(format!(
            "{} residuals, {} negative entries, normalized={}",
            report.violations.len(),
            report.negative.len(),
            report.normalized
        )));
    }
    let probs: Vec<Q> = (0..=n).map(|k| dims.at(n, k) * v.get(n, k)).collect();
    Ok(LevelLaw { n, probs })
}

/// Law of `K_n` given `K_ν = κ`, composing backward transitions level by level.
pub fn conditioned_law(
    tri: &MultiplicitySpec,
    dims: &DimensionTable,
    start: NodeIndex,
    n: usize,
) -> Result<LevelLaw> {
    NodeIndex::new(start.n, start.k)?;
    if n > start.n {
        return Err(Error::LevelMismatch(n, start.n));
    }
    let mut law = LevelLaw::point_mass(start.n, start.k);
    for level in (n + 1..=start.n).rev() {
        let mut next = vec![Q::zero(); level];
        for (k, p) in law.probs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let step = backward_transition(tri, dims, level, k)?;
            for (j, t) in step.probs.iter().enumerate() {
                if !t.is_zero() {
                    next[j] += p * t;
                }
            }
        }
        law = LevelLaw { n: level - 1, probs: next };
    }
    Ok(law)
}

/// Index drawn from an exact law by inverse CDF against a 64-bit uniform.
///
/// `u = U/2^64` is compared with the cumulative sums exactly, so the only
/// bias is the 2^-64 discretization of `u`.
pub fn draw_exact<R: Rng + ?Sized>(probs: &[Q], rng: &mut R) -> usize {
    let u = BigInt::from(rng.gen::<u64>());
    let mut cum = Q::zero();
    let last = probs.iter().rposition(|p| !p.is_zero()).unwrap_or(0);
    for (j, p) in probs.iter().enumerate().take(last) {
        if p.is_zero() {
            continue;
        }
        cum += p;
        // u < cum  <=>  U·den < num·2^64
        if &u * cum.denom() < (cum.numer() << 64) {
            return j;
        }
    }
    last
}

/// Backward trajectory `K_ν, K_{ν-1}, ..., K_0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub start: NodeIndex,
    pub states: Vec<usize>,
}

impl Trajectory {
    /// State at level `n`.
    pub fn at_level(&self, n: usize) -> usize {
        self.states[self.start.n - n]
    }
}

pub fn sample_backward_path(
    tri: &MultiplicitySpec,
    dims: &DimensionTable,
    start: NodeIndex,
    seed: u64,
) -> Result<Trajectory> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_backward_path_with(tri, dims, start, &mut rng)
}

pub fn sample_backward_path_with<R: Rng + ?Sized>(
    tri: &MultiplicitySpec,
    dims: &DimensionTable,
    start: NodeIndex,
    rng: &mut R,
) -> Result<Trajectory> {
    NodeIndex::new(start.n, start.k)?;
    require_level(dims, start.n)?;
    let mut states = Vec::with_capacity(start.n + 1);
    let mut k = start.k;
    states.push(k);
    for n in (1..=start.n).rev() {
        if k > 0 && k < n {
            let step = backward_transition(tri, dims, n, k)?;
            k = if draw_exact(&step.probs[k - 1..=k], rng) == 0 { k - 1 } else { k };
        } else if k == n {
            k -= 1;
        }
        states.push(k);
    }
    Ok(Trajectory { start, states })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StochasticOrder {
    StrictlyLess,
    Equal,
    StrictlyGreater,
    Incomparable,
}

impl fmt::Display for StochasticOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StochasticOrder::StrictlyLess => "strictly-less",
            StochasticOrder::Equal => "equal",
            StochasticOrder::StrictlyGreater => "strictly-greater",
            StochasticOrder::Incomparable => "incomparable",
        })
    }
}

/// Compares two laws on the same level by their tail sums.
pub fn stochastic_leq(a: &LevelLaw, b: &LevelLaw) -> Result<StochasticOrder> {
    if a.n != b.n || a.probs.len() != b.probs.len() {
        return Err(Error::LevelMismatch(a.n, b.n));
    }
    let (mut less, mut greater) = (false, false);
    for (ta, tb) in a.tails().iter().zip(b.tails().iter()) {
        if ta < tb {
            less = true;
        } else if ta > tb {
            greater = true;
        }
    }
    Ok(match (less, greater) {
        (false, false) => StochasticOrder::Equal,
        (true, false) => StochasticOrder::StrictlyLess,
        (false, true) => StochasticOrder::StrictlyGreater,
        (true, true) => StochasticOrder::Incomparable,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub nu: usize,
    pub n: usize,
    /// `V^{νκ}_{n,0}` for `κ = 0..=ν`.
    #[serde(with = "serde_law")]
    pub values: Vec<Q>,
    /// κ with `values[κ+1] > values[κ]`.
    pub violations: Vec<usize>,
    /// Order of the law of `K_n` given `K_ν = κ` against the one given `κ+1`.
    pub dominance: Vec<StochasticOrder>,
}

impl MonotoneReport {
    pub fn is_monotone(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `κ ↦ V^{νκ}_{n,0}` is nonincreasing.
///
/// The values come from one forward sweep out of `(n, 0)` divided by the
/// root dimensions, which gives the whole row `κ = 0..=ν` at once.
pub fn check_monotone_in_kappa(tri: &MultiplicitySpec, nu: usize, n: usize) -> Result<MonotoneReport> {
    if n >= nu {
        return Err(Error::Invalid(format!("need n < ν, got n={n}, ν={nu}")));
    }
    let dims = dimensions(tri, nu)?;
    let from = dimensions_from(tri, NodeIndex { n, k: 0 }, nu)?;
    let values: Vec<Q> = (0..=nu).map(|kappa| from.at(nu, kappa) / dims.at(nu, kappa)).collect();
    let violations = values
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] > w[0])
        .map(|(i, _)| i)
        .collect();
    let laws = (0..=nu)
        .map(|kappa| conditioned_law(tri, &dims, NodeIndex { n: nu, k: kappa }, n))
        .collect::<Result<Vec<_>>>()?;
    let dominance = laws
        .windows(2)
        .map(|w| stochastic_leq(&w[0], &w[1]))
        .collect::<Result<Vec<_>>>()?;
    Ok(MonotoneReport {
        nu,
        n,
        values,
        violations,
        dominance,
    })
}
