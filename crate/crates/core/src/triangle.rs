//! The weighted triangle graph: nodes `(n, k)` with edges to `(n+1, k)`
//! (weight `left`) and `(n+1, k+1)` (weight `right`).

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::float::{self, Scaled};
use crate::rational::{format_q, is_positive, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeIndex {
    pub n: usize,
    pub k: usize,
}

impl NodeIndex {
    pub fn new(n: usize, k: usize) -> Result<NodeIndex> {
        let node = NodeIndex { n, k };
        if k > n {
            return Err(Error::NodeOutOfRange(node));
        }
        Ok(node)
    }

    pub const ROOT: NodeIndex = NodeIndex { n: 0, k: 0 };
}

impl fmt::Display for NodeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.k)
    }
}

/// A multiplicity rule, evaluated lazily per node.
#[derive(Debug, Clone)]
pub enum Rule {
    Expr(Arc<Expr>),
    /// Explicit rows `table[n][k]`; nodes beyond the table are an error.
    Table(Arc<Vec<Vec<Q>>>),
}

impl Rule {
    fn eval(&self, n: usize, k: usize) -> Result<Q> {
        match self {
            Rule::Expr(e) => e.eval(n, k),
            Rule::Table(t) => t
                .get(n)
                .and_then(|row| row.get(k))
                .cloned()
                .ok_or_else(|| Error::Invalid(format!("multiplicity table has no entry ({n},{k})"))),
        }
    }

    fn eval_scaled(&self, n: usize, k: usize) -> Result<Scaled> {
        match self {
            Rule::Expr(e) => Ok(float::eval_expr(e, n, k)),
            Rule::Table(_) => self.eval(n, k).map(|v| Scaled::from_q(&v)),
        }
    }

    fn error_units(&self, max_level: usize) -> f64 {
        match self {
            Rule::Expr(e) => float::expr_error_units(e, max_level),
            Rule::Table(_) => 1.0,
        }
    }

    fn table_depth(&self) -> Option<usize> {
        match self {
            Rule::Expr(_) => None,
            Rule::Table(t) => Some(t.len().saturating_sub(1)),
        }
    }
}

/// Levels checked for positivity when a spec is built.
pub const PROBE_LEVELS: usize = 48;

/// Edge multiplicities of a triangle.
///
/// Rules are stored, never dense arrays, so deep sweeps only evaluate the
/// nodes they touch. Transposition is a flag: with it set, `left(n, k)`
/// reads `right(n, n - k)` of the stored rules and vice versa.
#[derive(Debug, Clone)]
pub struct MultiplicitySpec {
    name: String,
    params: Vec<(String, Q)>,
    left: Rule,
    right: Rule,
    transposed: bool,
}

impl MultiplicitySpec {
    /// Builds a spec and rejects it if any multiplicity on the probe window
    /// is not strictly positive.
    pub fn new(
        name: impl Into<String>,
        params: Vec<(String, Q)>,
        left: Rule,
        right: Rule,
    ) -> Result<MultiplicitySpec> {
        let spec = MultiplicitySpec {
            name: name.into(),
            params,
            left,
            right,
            transposed: false,
        };
        let probe = [spec.left.table_depth(), spec.right.table_depth()]
            .into_iter()
            .flatten()
            .min()
            .unwrap_or(PROBE_LEVELS)
            .min(PROBE_LEVELS);
        for n in 0..=probe {
            for k in 0..=n {
                spec.left(n, k)?;
                spec.right(n, k)?;
            }
        }
        Ok(spec)
    }

    pub fn from_exprs(
        name: impl Into<String>,
        params: Vec<(String, Q)>,
        left: Expr,
        right: Expr,
    ) -> Result<MultiplicitySpec> {
        MultiplicitySpec::new(name, params, Rule::Expr(Arc::new(left)), Rule::Expr(Arc::new(right)))
    }

    /// A spec defined by explicit rows of multiplicities (up to `left.len() - 1`).
    pub fn from_tables(left: Vec<Vec<Q>>, right: Vec<Vec<Q>>) -> Result<MultiplicitySpec> {
        MultiplicitySpec::new(
            "table",
            Vec::new(),
            Rule::Table(Arc::new(left)),
            Rule::Table(Arc::new(right)),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[(String, Q)] {
        &self.params
    }

    pub fn param(&self, key: &str) -> Option<&Q> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn is_transposed(&self) -> bool {
        self.transposed
    }

    fn checked(&self, side: &'static str, n: usize, k: usize, v: Q) -> Result<Q> {
        if !is_positive(&v) {
            return Err(Error::NonPositiveMultiplicity {
                side,
                n,
                k,
                value: format_q(&v),
            });
        }
        Ok(v)
    }

    fn raw(&self, left_side: bool, n: usize, k: usize) -> Result<Q> {
        if k > n {
            return Err(Error::NodeOutOfRange(NodeIndex { n, k }));
        }
        match (left_side, self.transposed) {
            (true, false) => self.left.eval(n, k),
            (false, false) => self.right.eval(n, k),
            (true, true) => self.right.eval(n, n - k),
            (false, true) => self.left.eval(n, n - k),
        }
    }

    /// Multiplicity of the edge `(n,k) -> (n+1,k)`.
    pub fn left(&self, n: usize, k: usize) -> Result<Q> {
        let v = self.raw(true, n, k)?;
        self.checked("left", n, k, v)
    }

    /// Multiplicity of the edge `(n,k) -> (n+1,k+1)`.
    pub fn right(&self, n: usize, k: usize) -> Result<Q> {
        let v = self.raw(false, n, k)?;
        self.checked("right", n, k, v)
    }

    fn raw_scaled(&self, left_side: bool, n: usize, k: usize) -> Result<Scaled> {
        if k > n {
            return Err(Error::NodeOutOfRange(NodeIndex { n, k }));
        }
        let v = match (left_side, self.transposed) {
            (true, false) => self.left.eval_scaled(n, k)?,
            (false, false) => self.right.eval_scaled(n, k)?,
            (true, true) => self.right.eval_scaled(n, n - k)?,
            (false, true) => self.left.eval_scaled(n, n - k)?,
        };
        if v.partial_cmp(&Scaled::ZERO) != Some(std::cmp::Ordering::Greater) {
            // settle the sign exactly before rejecting
            let exact = self.raw(left_side, n, k)?;
            self.checked(if left_side { "left" } else { "right" }, n, k, exact)?;
        }
        Ok(v)
    }

    /// Floating counterpart of [`MultiplicitySpec::left`] for deep sweeps.
    pub fn left_scaled(&self, n: usize, k: usize) -> Result<Scaled> {
        self.raw_scaled(true, n, k)
    }

    pub fn right_scaled(&self, n: usize, k: usize) -> Result<Scaled> {
        self.raw_scaled(false, n, k)
    }

    /// Estimated relative error, in unit roundoffs, of one floating
    /// multiplicity evaluation at levels up to `max_level`.
    pub fn scaled_error_units(&self, max_level: usize) -> f64 {
        self.left.error_units(max_level).max(self.right.error_units(max_level))
    }

    /// Exchanges `left(n,k)` with `right(n, n-k)`. An involution.
    pub fn transpose(&self) -> MultiplicitySpec {
        MultiplicitySpec {
            transposed: !self.transposed,
            ..self.clone()
        }
    }

    /// Largest level with multiplicities defined, if the spec is tabular.
    pub fn max_level(&self) -> Option<usize> {
        [self.left.table_depth(), self.right.table_depth()]
            .into_iter()
            .flatten()
            .min()
    }

    pub fn describe(&self) -> String {
        let mut s = self.name.clone();
        if !self.params.is_empty() {
            let ps: Vec<String> = self
                .params
                .iter()
                .map(|(k, v)| format!("{k}={}", format_q(v)))
                .collect();
            s.push_str(&format!("({})", ps.join(",")));
        }
        if self.transposed {
            s.push_str("^T");
        }
        s
    }
}

/// JSON form of a triangle spec file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "std::collections::BTreeMap::is_empty")]
    pub params: std::collections::BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub transpose: bool,
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<SpecFile> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("triangle spec: {e}")))
    }

    pub fn build(&self) -> Result<MultiplicitySpec> {
        let spec = if self.name == "custom" {
            let left = self
                .left
                .as_deref()
                .ok_or_else(|| Error::Invalid("custom triangle needs `left`".into()))?;
            let right = self
                .right
                .as_deref()
                .ok_or_else(|| Error::Invalid("custom triangle needs `right`".into()))?;
            MultiplicitySpec::from_exprs("custom", Vec::new(), Expr::parse(left)?, Expr::parse(right)?)?
        } else {
            let mut params = Vec::new();
            for (k, v) in &self.params {
                params.push((k.clone(), crate::rational::parse_q(v)?));
            }
            crate::catalog::catalog_triangle(&self.name, &params)?
        };
        Ok(if self.transpose { spec.transpose() } else { spec })
    }
}

pub fn parse_spec(text: &str) -> Result<MultiplicitySpec> {
    SpecFile::parse(text)?.build()
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn custom_spec_from_json() {
        let t = parse_spec(r#"{"name":"custom","left":"k+1","right":"n-k+1"}"#).unwrap();
        assert_eq!(t.left(3, 1).unwrap(), qi(2));
        assert_eq!(t.right(3, 1).unwrap(), qi(3));
    }

    #[test]
    fn catalog_spec_from_json() {
        let t = parse_spec(r#"{"name":"q-pascal","params":{"q":"1/2"}}"#).unwrap();
        assert_eq!(t.right(3, 1).unwrap(), q(1, 4));
        assert_eq!(t.left(3, 1).unwrap(), qi(1));
    }

    #[test]
    fn nonpositive_rejected_at_construction() {
        let err = parse_spec(r#"{"name":"custom","left":"1","right":"n-3"}"#).unwrap_err();
        assert!(matches!(err, Error::NonPositiveMultiplicity { side: "right", n: 0, .. }));
        let err = parse_spec(r#"{"name":"custom","left":"5-k","right":"1"}"#).unwrap_err();
        assert!(matches!(err, Error::NonPositiveMultiplicity { side: "left", n: 5, k: 5, .. }));
    }

    #[test]
    fn transpose_is_an_involution() {
        let t = parse_spec(r#"{"name":"custom","left":"k+2","right":"n*n+1"}"#).unwrap();
        let tt = t.transpose();
        for n in 0..6 {
            for k in 0..=n {
                assert_eq!(tt.left(n, k).unwrap(), t.right(n, n - k).unwrap());
                assert_eq!(tt.right(n, k).unwrap(), t.left(n, n - k).unwrap());
                assert_eq!(tt.transpose().left(n, k).unwrap(), t.left(n, k).unwrap());
                let f = tt.left_scaled(n, k).unwrap().to_f64();
                assert_eq!(f, crate::rational::to_f64(&tt.left(n, k).unwrap()));
            }
        }
    }

    #[test]
    fn node_bounds() {
        assert!(NodeIndex::new(2, 3).is_err());
        let t = parse_spec(r#"{"name":"pascal"}"#).unwrap();
        assert!(t.left(1, 2).is_err());
    }
}
