//! CSV and JSON renderings of results.

use serde::Serialize;
use serde_json::{json, Value};

use crate::lab::ConvergenceTrace;
use crate::markov::Trajectory;
use crate::moments::MixingMeasure;
use crate::rational::{format_decimal, format_f64, Q};

pub const DEFAULT_DIGITS: usize = 12;

/// Provenance attached to every artifact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunMeta {
    pub command: String,
    pub triangle: String,
    pub seed: u64,
    pub precision: String,
}

impl RunMeta {
    /// `#`-prefixed header lines for CSV output.
    pub fn csv_header(&self) -> String {
        format!(
            "# command={}\n# triangle={}\n# seed={}\n# precision={}\n",
            self.command, self.triangle, self.seed, self.precision
        )
    }
}

/// `{"meta": ..., "result": ...}`, pretty-printed with a trailing newline.
pub fn json_document(meta: &RunMeta, result: Value) -> String {
    let mut s = serde_json::to_string_pretty(&json!({ "meta": meta, "result": result }))
        .expect("json values always serialize");
    s.push('\n');
    s
}

/// One CSV line per level.
pub fn rows_csv(rows: &[Vec<Q>], digits: usize) -> String {
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format_decimal(x, digits)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn float_rows_csv(rows: &[Vec<f64>], digits: usize) -> String {
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format_f64(*x, digits)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// `level,state` from level 0 upward.
pub fn trajectory_csv(t: &Trajectory) -> String {
    let mut out = String::from("level,state\n");
    for n in 0..=t.start.n {
        out.push_str(&format!("{n},{}\n", t.at_level(n)));
    }
    out
}

/// `nu,n,k,value` for every sample of a trace.
pub fn trace_csv(trace: &ConvergenceTrace, digits: usize) -> String {
    let mut out = String::from("nu,n,k,value\n");
    for s in &trace.samples {
        for (n, row) in s.rows.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                out.push_str(&format!("{},{n},{k},{}\n", s.nu, format_f64(*v, digits)));
            }
        }
    }
    out
}

/// Verdict blob of a trace, without the samples.
pub fn trace_verdict_json(trace: &ConvergenceTrace) -> Value {
    json!({
        "triangle": trace.triangle,
        "path": trace.path,
        "n_max": trace.n_max,
        "tol": trace.tol,
        "window_count": trace.window_count,
        "nus": trace.samples.iter().map(|s| s.nu).collect::<Vec<_>>(),
        "kappas": trace.samples.iter().map(|s| s.kappa).collect::<Vec<_>>(),
        "max_rel_error": trace.samples.iter().map(|s| s.rel_error).fold(0.0, f64::max),
        "verdict": trace.verdict,
    })
}

/// `[{point, weight, residual}]`.
pub fn measure_json(m: &MixingMeasure) -> Value {
    Value::Array(
        m.atoms
            .iter()
            .map(|a| json!({ "point": a.point.to_string(), "weight": a.weight, "residual": m.residual }))
            .collect(),
    )
}

/// Solver and conditioning diagnostics of an inversion.
pub fn measure_diagnostics(m: &MixingMeasure) -> Value {
    json!({
        "triangle": m.triangle,
        "depth": m.depth,
        "atom_count": m.atoms.len(),
        "residual": m.residual,
        "representable": m.representable,
        "gradient_norm": m.gradient_norm,
        "iterations": m.iterations,
        "condition_number": if m.condition_number.is_finite() { json!(m.condition_number) } else { json!("inf") },
        "discretization": m.discretization,
        "warnings": m.warnings,
    })
}

pub fn measure_csv(m: &MixingMeasure, digits: usize) -> String {
    let mut out = String::from("point,weight\n");
    for a in &m.atoms {
        out.push_str(&format!("{},{}\n", a.point, format_f64(a.weight, digits)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use crate::triangle::NodeIndex;

    #[test]
    fn decimal_rows() {
        let rows = vec![vec![qi(1)], vec![qi(1), q(1, 3)]];
        assert_eq!(rows_csv(&rows, 4), "1\n1,3.333e-1\n");
    }

    #[test]
    fn trajectory_rows_ascend() {
        let t = Trajectory {
            start: NodeIndex { n: 2, k: 1 },
            states: vec![1, 0, 0],
        };
        assert_eq!(trajectory_csv(&t), "level,state\n0,0\n1,0\n2,1\n");
    }

    #[test]
    fn header_records_seed() {
        let m = RunMeta {
            command: "sample".into(),
            triangle: "pascal".into(),
            seed: 9,
            precision: "exact".into(),
        };
        assert!(m.csv_header().contains("# seed=9"));
        let doc = json_document(&m, json!({"x": 1}));
        assert!(doc.contains("\"seed\": 9") && doc.ends_with("}\n"));
    }
}
