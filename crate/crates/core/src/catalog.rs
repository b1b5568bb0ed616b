//! Named triangles and their closed-form extreme harmonic functions.
//!
//! | name           | left(n,k)             | right(n,k)  |
//! |----------------|-----------------------|-------------|
//! | `pascal`       | 1                     | 1           |
//! | `q-pascal`     | 1                     | q^(n-k)     |
//! | `stirling`     | (n+1) - alpha·(k+1)   | 1           |
//! | `stirling-inf` | k+1                   | 1           |
//! | `eulerian`     | k+1                   | n-k+1       |

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::kernel::{kernel_from_first_column, KernelArray};
use crate::rational::{format_q, parse_q, pow_q, qi, Q};
use crate::triangle::MultiplicitySpec;

pub const CATALOG_NAMES: [&str; 5] = ["pascal", "q-pascal", "stirling", "stirling-inf", "eulerian"];

/// Integer or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtInt {
    Finite(i64),
    Infinite,
}

impl fmt::Display for ExtInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtInt::Finite(m) => write!(f, "{m}"),
            ExtInt::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for ExtInt {
    type Err = Error;
    fn from_str(s: &str) -> Result<ExtInt> {
        match s.trim() {
            "inf" | "∞" | "infinity" => Ok(ExtInt::Infinite),
            t => t
                .parse()
                .map(ExtInt::Finite)
                .map_err(|_| Error::Invalid(format!("expected an integer or `inf`, got `{s}`"))),
        }
    }
}

/// Nonnegative rational or infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtQ {
    Finite(Q),
    Infinite,
}

impl fmt::Display for ExtQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtQ::Finite(s) => write!(f, "{}", format_q(s)),
            ExtQ::Infinite => write!(f, "inf"),
        }
    }
}

/// A point of the boundary, in the parametrization of its triangle family.
///
/// For Stirling triangles with `alpha < 0` (and `alpha = -inf`) the label `m`
/// is the limiting state of the chain, so `m = 0` is the trivial solution
/// `K = 0`; the first column is `1/((m+1)|alpha| + 1)_n`, resp. `(m+1)^-n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundaryPoint {
    PascalX(Q),
    QPascalM(ExtInt),
    StirlingM(ExtInt),
    StirlingS(ExtQ),
    EulerianM(ExtInt),
    TrivialZero,
    TrivialInf,
}

impl BoundaryPoint {
    pub fn kind(&self) -> &'static str {
        match self {
            BoundaryPoint::PascalX(_) => "pascal-x",
            BoundaryPoint::QPascalM(_) => "qpascal-m",
            BoundaryPoint::StirlingM(_) => "stirling-m",
            BoundaryPoint::StirlingS(_) => "stirling-s",
            BoundaryPoint::EulerianM(_) => "eulerian-m",
            BoundaryPoint::TrivialZero => "trivial-0",
            BoundaryPoint::TrivialInf => "trivial-inf",
        }
    }

    pub fn value_text(&self) -> String {
        match self {
            BoundaryPoint::PascalX(x) => format_q(x),
            BoundaryPoint::QPascalM(m) | BoundaryPoint::StirlingM(m) | BoundaryPoint::EulerianM(m) => {
                m.to_string()
            }
            BoundaryPoint::StirlingS(s) => s.to_string(),
            BoundaryPoint::TrivialZero => "0".into(),
            BoundaryPoint::TrivialInf => "inf".into(),
        }
    }

    /// Parses `x=1/3`, `m=2`, `m=inf`, `s=5/2`, `trivial-0` or `trivial-inf`
    /// in the context of a triangle.
    pub fn parse(text: &str, tri: &MultiplicitySpec) -> Result<BoundaryPoint> {
        let t = text.trim();
        match t {
            "trivial-0" => return Ok(BoundaryPoint::TrivialZero),
            "trivial-inf" | "trivial-∞" => return Ok(BoundaryPoint::TrivialInf),
            _ => {}
        }
        let (key, value) = t
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("boundary point `{text}` is not `key=value`")))?;
        let family = Family::of(tri);
        let incompatible = || Error::IncompatiblePoint {
            triangle: tri.describe(),
            point: text.to_string(),
        };
        match (key.trim(), family) {
            ("x", Some(Family::Pascal)) => Ok(BoundaryPoint::PascalX(parse_q(value)?)),
            ("m", Some(Family::QPascal(_))) => Ok(BoundaryPoint::QPascalM(value.parse()?)),
            ("m", Some(Family::Stirling(_))) | ("m", Some(Family::StirlingInf)) => {
                Ok(BoundaryPoint::StirlingM(value.parse()?))
            }
            ("s", Some(Family::Stirling(_))) => Ok(BoundaryPoint::StirlingS(match value.trim() {
                "inf" | "∞" => ExtQ::Infinite,
                v => ExtQ::Finite(parse_q(v)?),
            })),
            ("m", Some(Family::Eulerian)) => Ok(BoundaryPoint::EulerianM(value.parse()?)),
            _ => Err(incompatible()),
        }
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::PascalX(x) => write!(f, "x={}", format_q(x)),
            BoundaryPoint::QPascalM(m) | BoundaryPoint::StirlingM(m) | BoundaryPoint::EulerianM(m) => {
                write!(f, "m={m}")
            }
            BoundaryPoint::StirlingS(s) => write!(f, "s={s}"),
            BoundaryPoint::TrivialZero => write!(f, "trivial-0"),
            BoundaryPoint::TrivialInf => write!(f, "trivial-inf"),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PointRepr {
    kind: String,
    value: String,
}

impl Serialize for BoundaryPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PointRepr {
            kind: self.kind().into(),
            value: self.value_text(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoundaryPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = PointRepr::deserialize(d)?;
        let ext = |v: &str| v.parse::<ExtInt>().map_err(D::Error::custom);
        Ok(match r.kind.as_str() {
            "pascal-x" => BoundaryPoint::PascalX(parse_q(&r.value).map_err(D::Error::custom)?),
            "qpascal-m" => BoundaryPoint::QPascalM(ext(&r.value)?),
            "stirling-m" => BoundaryPoint::StirlingM(ext(&r.value)?),
            "stirling-s" => BoundaryPoint::StirlingS(if r.value == "inf" {
                ExtQ::Infinite
            } else {
                ExtQ::Finite(parse_q(&r.value).map_err(D::Error::custom)?)
            }),
            "eulerian-m" => BoundaryPoint::EulerianM(ext(&r.value)?),
            "trivial-0" => BoundaryPoint::TrivialZero,
            "trivial-inf" => BoundaryPoint::TrivialInf,
            other => return Err(D::Error::custom(format!("unknown point kind `{other}`"))),
        })
    }
}

/// Catalog family of a spec, recovered from its name and parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Pascal,
    QPascal(Q),
    Stirling(Q),
    StirlingInf,
    Eulerian,
}

impl Family {
    pub fn of(tri: &MultiplicitySpec) -> Option<Family> {
        match tri.name() {
            "pascal" => Some(Family::Pascal),
            // transposing the symmetric families changes nothing
            "eulerian" => Some(Family::Eulerian),
            _ if tri.is_transposed() => None,
            "q-pascal" => {
                let q = tri.param("q")?.clone();
                Some(if q.is_one() { Family::Pascal } else { Family::QPascal(q) })
            }
            "stirling" => Some(Family::Stirling(tri.param("alpha")?.clone())),
            "stirling-inf" => Some(Family::StirlingInf),
            _ => None,
        }
    }
}

fn param(params: &[(String, Q)], key: &str) -> Result<Q> {
    params
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.clone())
        .ok_or_else(|| Error::InvalidParameter(format!("missing parameter `{key}`")))
}

/// Builds a named triangle. `q-pascal` takes `q > 0`, `stirling` takes `alpha < 1`.
pub fn catalog_triangle(name: &str, params: &[(String, Q)]) -> Result<MultiplicitySpec> {
    let one = || Expr::int(1);
    let k_plus_1 = || Expr::add(Expr::K, Expr::int(1));
    match name {
        "pascal" => MultiplicitySpec::from_exprs(name, Vec::new(), one(), one()),
        "q-pascal" => {
            let q = param(params, "q")?;
            if !q.is_positive() {
                return Err(Error::InvalidParameter(format!("q = {} must be > 0", format_q(&q))));
            }
            let right = Expr::pow(Expr::constant(q.clone()), Expr::sub(Expr::N, Expr::K));
            MultiplicitySpec::from_exprs(name, vec![("q".into(), q)], one(), right)
        }
        "stirling" => {
            let alpha = param(params, "alpha")?;
            if alpha >= Q::one() {
                return Err(Error::InvalidParameter(format!(
                    "alpha = {} must be < 1",
                    format_q(&alpha)
                )));
            }
            let left = Expr::sub(
                Expr::add(Expr::N, Expr::int(1)),
                Expr::mul(Expr::constant(alpha.clone()), k_plus_1()),
            );
            MultiplicitySpec::from_exprs(name, vec![("alpha".into(), alpha)], left, one())
        }
        "stirling-inf" => MultiplicitySpec::from_exprs(name, Vec::new(), k_plus_1(), one()),
        "eulerian" => MultiplicitySpec::from_exprs(
            name,
            Vec::new(),
            k_plus_1(),
            Expr::add(Expr::sub(Expr::N, Expr::K), Expr::int(1)),
        ),
        other => Err(Error::UnknownTriangle(other.to_string())),
    }
}

fn rising(s: &Q, n: usize) -> Q {
    (0..n).fold(Q::one(), |acc, i| acc * (s + qi(i as i64)))
}

fn factorial(n: usize) -> Q {
    (1..=n).fold(Q::one(), |acc, i| acc * qi(i as i64))
}

fn pascal_value(x: &Q, n: usize, k: usize) -> Q {
    pow_q(x, (n - k) as i64) * pow_q(&(Q::one() - x), k as i64)
}

/// Extreme of the q-Pascal triangle with `0 < q < 1`.
fn qpascal_value(q: &Q, m: ExtInt, n: usize, k: usize) -> Q {
    match m {
        ExtInt::Infinite => qi((k == n) as i64),
        ExtInt::Finite(m) => {
            let (k, n) = (k as i64, n as i64);
            if k > m {
                return Q::zero();
            }
            let band: Q = (m - k + 1..=m).fold(Q::one(), |acc, j| acc * (Q::one() - pow_q(q, j)));
            pow_q(q, (m - k) * (n - k)) * band
        }
    }
}

fn eulerian_value(m: ExtInt, n: usize, k: usize) -> Q {
    let base = factorial(n + 1).recip();
    match m {
        ExtInt::Infinite => base,
        ExtInt::Finite(m) => {
            let m = qi(m);
            (-(k as i64)..=(n as i64 - k as i64)).fold(base, |acc, i| acc * (Q::one() + qi(i) / &m))
        }
    }
}

fn check_range(tri: &MultiplicitySpec, point: &BoundaryPoint) -> Result<()> {
    let bad = || Error::IncompatiblePoint {
        triangle: tri.describe(),
        point: point.to_string(),
    };
    match (point, Family::of(tri)) {
        (BoundaryPoint::TrivialZero | BoundaryPoint::TrivialInf, _) => Ok(()),
        (BoundaryPoint::PascalX(x), Some(Family::Pascal)) => {
            if x.is_negative() || *x > Q::one() {
                Err(bad())
            } else {
                Ok(())
            }
        }
        (BoundaryPoint::QPascalM(m), Some(Family::QPascal(_)))
        | (BoundaryPoint::StirlingM(m), Some(Family::StirlingInf)) => match m {
            ExtInt::Finite(v) if *v < 0 => Err(bad()),
            _ => Ok(()),
        },
        (BoundaryPoint::StirlingM(m), Some(Family::Stirling(alpha))) => match m {
            _ if !alpha.is_negative() => Err(bad()),
            ExtInt::Finite(v) if *v < 0 => Err(bad()),
            _ => Ok(()),
        },
        (BoundaryPoint::StirlingS(s), Some(Family::Stirling(alpha))) => match s {
            _ if !alpha.is_zero() => Err(bad()),
            ExtQ::Finite(v) if v.is_negative() => Err(bad()),
            _ => Ok(()),
        },
        (BoundaryPoint::EulerianM(m), Some(Family::Eulerian)) => match m {
            ExtInt::Finite(0) => Err(bad()),
            _ => Ok(()),
        },
        _ => Err(bad()),
    }
}

/// First column `V_{n,0}`, `n = 0..=depth`, of the extreme at `point`.
pub fn extreme_first_column(tri: &MultiplicitySpec, point: &BoundaryPoint, depth: usize) -> Result<Vec<Q>> {
    check_range(tri, point)?;
    let col = |f: &dyn Fn(usize) -> Q| (0..=depth).map(f).collect::<Vec<Q>>();
    Ok(match (point, Family::of(tri)) {
        (BoundaryPoint::TrivialZero, _) => {
            let mut out = Vec::with_capacity(depth + 1);
            let mut d = Q::one();
            for n in 0..=depth {
                out.push(d.recip());
                d *= tri.left(n, 0)?;
            }
            out
        }
        (BoundaryPoint::TrivialInf, _) => col(&|n| qi((n == 0) as i64)),
        (BoundaryPoint::PascalX(x), _) => col(&|n| pow_q(x, n as i64)),
        (BoundaryPoint::QPascalM(m), Some(Family::QPascal(q))) => {
            if q < Q::one() {
                col(&|n| qpascal_value(&q, *m, n, 0))
            } else {
                let p = q.recip();
                col(&|n| qpascal_value(&p, *m, n, n))
            }
        }
        (BoundaryPoint::StirlingM(m), Some(fam)) => match m {
            ExtInt::Infinite => col(&|n| qi((n == 0) as i64)),
            ExtInt::Finite(m) => {
                let base = qi(m + 1);
                match fam {
                    Family::Stirling(alpha) => {
                        let s = base * alpha.abs() + Q::one();
                        col(&|n| rising(&s, n).recip())
                    }
                    _ => col(&|n| pow_q(&base, -(n as i64))),
                }
            }
        },
        (BoundaryPoint::StirlingS(s), _) => match s {
            ExtQ::Infinite => col(&|n| qi((n == 0) as i64)),
            ExtQ::Finite(s) => {
                let s1 = s + Q::one();
                col(&|n| rising(&s1, n).recip())
            }
        },
        (BoundaryPoint::EulerianM(m), _) => col(&|n| eulerian_value(*m, n, 0)),
        _ => unreachable!("check_range admits only matching families"),
    })
}

/// Exact extreme kernel on levels `0..=depth`.
///
/// Closed forms are evaluated directly where the whole array is known
/// (Pascal, q-Pascal, Eulerian); otherwise the array is rebuilt from its
/// first column and must come out nonnegative.
pub fn extreme_kernel(tri: &MultiplicitySpec, point: &BoundaryPoint, depth: usize) -> Result<KernelArray> {
    check_range(tri, point)?;
    let family = Family::of(tri);
    let v = match (point, &family) {
        (BoundaryPoint::PascalX(x), _) => KernelArray::from_fn(depth, |n, k| Ok(pascal_value(x, n, k)))?,
        (BoundaryPoint::QPascalM(m), Some(Family::QPascal(q))) if *q < Q::one() => {
            KernelArray::from_fn(depth, |n, k| Ok(qpascal_value(q, *m, n, k)))?
        }
        (BoundaryPoint::QPascalM(m), Some(Family::QPascal(q))) => {
            // q > 1: transpose onto 1/q and undo the gauge p^{k(n-k)}
            let p = q.recip();
            KernelArray::from_fn(depth, |n, k| {
                Ok(pow_q(&p, (k * (n - k)) as i64) * qpascal_value(&p, *m, n, n - k))
            })?
        }
        (BoundaryPoint::EulerianM(m), _) => KernelArray::from_fn(depth, |n, k| Ok(eulerian_value(*m, n, k)))?,
        _ => {
            let col = extreme_first_column(tri, point, depth)?;
            let (v, verdict) = kernel_from_first_column(tri, &col, depth)?;
            if !verdict.accepted {
                return Err(Error::IncompatiblePoint {
                    triangle: tri.describe(),
                    point: format!("{point} ({verdict})"),
                });
            }
            v
        }
    };
    if !v.is_nonnegative() {
        return Err(Error::IncompatiblePoint {
            triangle: tri.describe(),
            point: format!("{point} (negative entries)"),
        });
    }
    Ok(v)
}

/// `left(0,0)·V_{1,0}`, the position of `V` in `[0, 1]`.
pub fn boundary_coordinate(tri: &MultiplicitySpec, v: &KernelArray) -> Result<Q> {
    if v.depth == 0 {
        return Err(Error::Invalid("boundary coordinate needs level 1".into()));
    }
    Ok(tri.left(0, 0)? * v.get(1, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::verify_harmonic;
    use crate::rational::q;

    fn qp(qv: Q) -> MultiplicitySpec {
        catalog_triangle("q-pascal", &[("q".into(), qv)]).unwrap()
    }

    fn stirling(alpha: Q) -> MultiplicitySpec {
        catalog_triangle("stirling", &[("alpha".into(), alpha)]).unwrap()
    }

    #[test]
    fn multiplicity_examples() {
        let p = catalog_triangle("pascal", &[]).unwrap();
        for n in 0..5 {
            for k in 0..=n {
                assert_eq!(p.left(n, k).unwrap(), qi(1));
                assert_eq!(p.right(n, k).unwrap(), qi(1));
            }
        }
        assert_eq!(qp(qi(2)).right(3, 1).unwrap(), qi(4));
        assert_eq!(stirling(qi(0)).left(3, 1).unwrap(), qi(4));
        assert_eq!(stirling(qi(-1)).left(3, 1).unwrap(), qi(6));
        let e = catalog_triangle("eulerian", &[]).unwrap();
        assert_eq!(e.left(4, 1).unwrap(), qi(2));
        assert_eq!(e.right(4, 1).unwrap(), qi(4));
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(
            catalog_triangle("q-pascal", &[("q".into(), qi(0))]),
            Err(Error::InvalidParameter(_))
        ));
        assert!(catalog_triangle("stirling", &[("alpha".into(), qi(1))]).is_err());
        assert!(catalog_triangle("q-pascal", &[]).is_err());
        assert!(matches!(catalog_triangle("young", &[]), Err(Error::UnknownTriangle(_))));
    }

    #[test]
    fn eulerian_is_self_transposed() {
        let e = catalog_triangle("eulerian", &[]).unwrap();
        let t = e.transpose();
        for n in 0..8 {
            for k in 0..=n {
                assert_eq!(t.left(n, k).unwrap(), e.left(n, k).unwrap());
                assert_eq!(t.right(n, k).unwrap(), e.right(n, k).unwrap());
            }
        }
    }

    #[test]
    fn qpascal_first_column_is_geometric() {
        let t = qp(q(1, 2));
        let v = extreme_kernel(&t, &BoundaryPoint::QPascalM(ExtInt::Finite(1)), 6).unwrap();
        for n in 0..=6 {
            assert_eq!(v.get(n, 0), &pow_q(&q(1, 2), n as i64));
        }
        assert!(verify_harmonic(&t, &v, 6).unwrap().is_clean());
    }

    #[test]
    fn qpascal_above_band_is_zero() {
        let t = qp(q(1, 3));
        let v = extreme_kernel(&t, &BoundaryPoint::QPascalM(ExtInt::Finite(2)), 8).unwrap();
        assert!((3..=8).all(|n| (3..=n).all(|k| v.get(n, k).is_zero())));
        let inf = extreme_kernel(&t, &BoundaryPoint::QPascalM(ExtInt::Infinite), 8).unwrap();
        assert!((1..=8).all(|n| inf.get(n, 0).is_zero() && inf.get(n, n).is_one()));
    }

    #[test]
    fn qpascal_above_one_via_transposition() {
        let t = qp(qi(3));
        for m in [ExtInt::Finite(0), ExtInt::Finite(1), ExtInt::Finite(4), ExtInt::Infinite] {
            let v = extreme_kernel(&t, &BoundaryPoint::QPascalM(m), 12).unwrap();
            assert!(verify_harmonic(&t, &v, 12).unwrap().is_clean(), "m={m}");
            let coord = boundary_coordinate(&t, &v).unwrap();
            let expected = match m {
                ExtInt::Finite(m) => Q::one() - pow_q(&qi(3), -m),
                ExtInt::Infinite => Q::one(),
            };
            assert_eq!(coord, expected);
        }
    }

    #[test]
    fn eulerian_coordinate() {
        let e = catalog_triangle("eulerian", &[]).unwrap();
        let v = extreme_kernel(&e, &BoundaryPoint::EulerianM(ExtInt::Finite(3)), 4).unwrap();
        assert_eq!(boundary_coordinate(&e, &v).unwrap(), q(2, 3));
        let v = extreme_kernel(&e, &BoundaryPoint::EulerianM(ExtInt::Finite(1)), 4).unwrap();
        assert_eq!(boundary_coordinate(&e, &v).unwrap(), qi(1));
        assert!(extreme_kernel(&e, &BoundaryPoint::EulerianM(ExtInt::Finite(0)), 4).is_err());
    }

    #[test]
    fn pascal_coordinate() {
        let p = catalog_triangle("pascal", &[]).unwrap();
        let v = extreme_kernel(&p, &BoundaryPoint::PascalX(q(1, 3)), 3).unwrap();
        assert_eq!(boundary_coordinate(&p, &v).unwrap(), q(1, 3));
        assert!(extreme_kernel(&p, &BoundaryPoint::PascalX(q(4, 3)), 3).is_err());
    }

    #[test]
    fn trivial_infinity_point() {
        for name in CATALOG_NAMES {
            let params = match name {
                "q-pascal" => vec![("q".into(), q(1, 2))],
                "stirling" => vec![("alpha".into(), q(-1, 2))],
                _ => vec![],
            };
            let t = catalog_triangle(name, &params).unwrap();
            let v = extreme_kernel(&t, &BoundaryPoint::TrivialInf, 6).unwrap();
            assert!(v.get(1, 0).is_zero());
            assert!(verify_harmonic(&t, &v, 6).unwrap().is_clean());
            let z = extreme_kernel(&t, &BoundaryPoint::TrivialZero, 6).unwrap();
            assert_eq!(boundary_coordinate(&t, &z).unwrap(), qi(1));
        }
    }

    #[test]
    fn stirling_state_labels() {
        // m = 0 is the chain stuck at K = 0, i.e. V_n0 = 1/D_n0
        let t = stirling(qi(-1));
        let v0 = extreme_kernel(&t, &BoundaryPoint::StirlingM(ExtInt::Finite(0)), 6).unwrap();
        let z = extreme_kernel(&t, &BoundaryPoint::TrivialZero, 6).unwrap();
        assert_eq!(v0, z);
        assert_eq!(v0.get(3, 0), &rising(&qi(2), 3).recip());
        let t = catalog_triangle("stirling-inf", &[]).unwrap();
        let v1 = extreme_kernel(&t, &BoundaryPoint::StirlingM(ExtInt::Finite(1)), 5).unwrap();
        assert_eq!(v1.get(3, 0), &q(1, 8));
    }

    #[test]
    fn incompatible_points() {
        let s = stirling(q(1, 2));
        assert!(extreme_kernel(&s, &BoundaryPoint::StirlingS(ExtQ::Finite(qi(1))), 3).is_err());
        let p = catalog_triangle("pascal", &[]).unwrap();
        assert!(extreme_kernel(&p, &BoundaryPoint::QPascalM(ExtInt::Finite(1)), 3).is_err());
        assert!(BoundaryPoint::parse("m=2", &p).is_err());
        assert!(BoundaryPoint::parse("x=1/2", &p).is_ok());
    }

    #[test]
    fn point_parsing_and_json() {
        let s0 = stirling(qi(0));
        let pt = BoundaryPoint::parse("s=5/2", &s0).unwrap();
        assert_eq!(pt, BoundaryPoint::StirlingS(ExtQ::Finite(q(5, 2))));
        let qpt = BoundaryPoint::parse("m=inf", &qp(q(1, 2))).unwrap();
        assert_eq!(qpt, BoundaryPoint::QPascalM(ExtInt::Infinite));
        let json = serde_json::to_string(&qpt).unwrap();
        assert_eq!(json, r#"{"kind":"qpascal-m","value":"inf"}"#);
        let back: BoundaryPoint = serde_json::from_str(&json).unwrap();
        assert_eq!(back, qpt);
    }
}
