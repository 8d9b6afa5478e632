//! Report assembly: one JSON document per command run, with named tables
//! that also emit as CSV. Output is byte-deterministic for fixed inputs:
//! ordered fields, canonical word rendering, shortest-round-trip float
//! formatting, and no timestamps unless explicitly requested.

use crate::analysis::{PropertyVerdict, VerdictStatus};
use crate::counterexample::CounterexampleAudit;
use crate::entropy::{BoundAudit, EntropyReport};
use crate::structure::ObstructionReport;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Table {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    /// CSV with minimal quoting (cells containing commas, quotes, or
    /// newlines are quoted).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&join_csv(&self.columns));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&join_csv(row));
            out.push('\n');
        }
        out
    }
}

fn join_csv(cells: &[String]) -> String {
    cells
        .iter()
        .map(|c| {
            if c.contains(',') || c.contains('"') || c.contains('\n') {
                format!("\"{}\"", c.replace('"', "\"\""))
            } else {
                c.clone()
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<String>,
    pub params: Vec<(String, String)>,
    pub notes: Vec<String>,
    pub tables: Vec<Table>,
    pub verdicts: Vec<PropertyVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report {
            schema_version: SCHEMA_VERSION,
            tool: format!("subshift {}", env!("CARGO_PKG_VERSION")),
            command: command.to_string(),
            fingerprint: None,
            params: Vec::new(),
            notes: Vec::new(),
            tables: Vec::new(),
            verdicts: Vec::new(),
            timing_ms: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn note(&mut self, note: impl ToString) -> &mut Self {
        self.notes.push(note.to_string());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    /// Scriptability contract: 0 = every verdict holds (or no verdicts),
    /// 1 = some verdict fails, 2 = some verdict inconclusive (and none fail).
    pub fn exit_code(&self) -> i32 {
        let mut code = 0;
        for v in &self.verdicts {
            match v.status {
                VerdictStatus::FailsWith { .. } => return 1,
                VerdictStatus::Inconclusive { .. } => code = 2,
                VerdictStatus::Holds => {}
            }
        }
        code
    }
}

/// Shortest-round-trip float rendering (deterministic).
pub fn fmt_f64(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if x == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{x}")
    }
}

/// Entropy sweep rows: (n, count, estimate, bound, pass). `bound` is the
/// family-exact entropy when available, else the running infimum; `pass`
/// records that the estimate stays at or above it.
pub fn entropy_table(report: &EntropyReport) -> Table {
    let mut t = Table::new("entropy", &["n", "count", "estimate", "bound", "pass"]);
    for row in &report.rows {
        let bound = report.exact.unwrap_or(row.inf_so_far);
        let pass = row.estimate + 1e-12 >= bound;
        t.push_row(vec![
            row.n.to_string(),
            row.count.to_string(),
            fmt_f64(row.estimate),
            fmt_f64(bound),
            pass.to_string(),
        ]);
    }
    t
}

/// Counting-bound audit rows: (n, count, estimate, bound, pass).
pub fn bound_audit_table(audit: &BoundAudit) -> Table {
    let mut t = Table::new("bound-audit", &["n", "count", "estimate", "bound", "pass"]);
    for row in &audit.rows {
        t.push_row(vec![
            row.n.to_string(),
            row.count.to_string(),
            fmt_f64(row.estimate),
            fmt_f64(row.bound),
            row.pass.to_string(),
        ]);
    }
    t
}

/// Decomposition sweep: per-n collection sizes and estimates.
pub fn obstruction_table(report: &ObstructionReport) -> Table {
    let mut t = Table::new(
        "decompose",
        &[
            "n",
            "core",
            "anchor_free",
            "single_probe",
            "undecomposable",
            "split",
            "blocked",
            "union",
            "union_estimate",
            "language_estimate",
            "convolution_bound_ok",
        ],
    );
    fn est(c: u128, n: usize) -> f64 {
        if c == 0 {
            f64::NEG_INFINITY
        } else {
            (c as f64).ln() / n as f64
        }
    }
    for row in &report.rows {
        t.push_row(vec![
            row.n.to_string(),
            row.core.to_string(),
            row.anchor_free.to_string(),
            row.single_probe.to_string(),
            row.pattern_free.to_string(),
            row.split.to_string(),
            row.blocked.to_string(),
            row.union_obstructions.to_string(),
            fmt_f64(est(row.union_obstructions, row.n)),
            fmt_f64(est(row.total, row.n)),
            row.convolution_bound_ok.to_string(),
        ]);
    }
    t
}

/// Counterexample audit: (n, t_pos, bound, spanning_radius, embed_ok) plus
/// language counts.
pub fn counterexample_table(audit: &CounterexampleAudit) -> Table {
    let mut t = Table::new(
        "counterexample-audit",
        &[
            "n",
            "t_pos_count",
            "bound",
            "spanning_radius",
            "spanning_ok",
            "prefix_closed",
            "embed_ok",
            "language_certain",
            "language_possible",
            "entropy_estimate",
        ],
    );
    let half = audit.half_alphabet as f64;
    for row in &audit.rows {
        let bound = half.powi(row.n as i32) / half;
        t.push_row(vec![
            row.n.to_string(),
            row.t_pos_count.to_string(),
            fmt_f64(bound),
            row.spanning_radius.to_string(),
            row.spanning_ok.to_string(),
            row.prefix_closed.to_string(),
            row.embed_ok.to_string(),
            row.language_certain.to_string(),
            row.language_possible.to_string(),
            fmt_f64(row.entropy_estimate),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_product_symbols() {
        let mut t = Table::new("x", &["word", "value"]);
        t.push_row(vec!["(0,1),(1,0)".to_string(), "3".to_string()]);
        let csv = t.to_csv();
        assert_eq!(csv, "word,value\n\"(0,1),(1,0)\",3\n");
    }

    #[test]
    fn report_json_is_deterministic() {
        let mut r = Report::new("entropy");
        r.param("n_max", 5).note("test");
        let a = r.to_json();
        let b = r.to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"schema_version\": 1"));
        assert!(r.timing_ms.is_none());
    }

    #[test]
    fn exit_codes_follow_verdicts() {
        use crate::analysis::PropertyVerdict;
        let mut r = Report::new("check");
        assert_eq!(r.exit_code(), 0);
        r.verdicts.push(PropertyVerdict {
            property: "p".into(),
            status: VerdictStatus::Inconclusive { reason: "h".into() },
            horizon: vec![],
            params: vec![],
            witness_words: vec![],
        });
        assert_eq!(r.exit_code(), 2);
        r.verdicts.push(PropertyVerdict {
            property: "p".into(),
            status: VerdictStatus::FailsWith { witnesses: vec![] },
            horizon: vec![],
            params: vec![],
            witness_words: vec![],
        });
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn float_formatting_round_trips() {
        assert_eq!(fmt_f64(0.5), "0.5");
        assert_eq!(fmt_f64(f64::NEG_INFINITY), "-inf");
        let phi_ln = 0.48121182505960347f64;
        assert_eq!(fmt_f64(phi_ln).parse::<f64>().unwrap(), phi_ln);
    }
}
