//! CSV verification reports with one pass/fail row per assertion.
//!
//! Rows are accumulated in a fixed order and numbers are written with a
//! fixed format, so identical inputs produce byte-identical reports.

use std::fmt::Write as _;

/// A single verified assertion.
#[derive(Debug, Clone)]
pub struct ReportRow {
    /// The identity the row verifies, e.g. "Thm6.7" or "PropA.5-rate".
    pub theorem: String,
    pub assertion: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// An ordered collection of assertion rows.
#[derive(Debug, Clone, Default)]
pub struct Report {
    rows: Vec<ReportRow>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `residual ≤ tolerance`.
    pub fn check(&mut self, theorem: &str, assertion: &str, residual: f64, tolerance: f64) {
        self.rows.push(ReportRow {
            theorem: theorem.to_string(),
            assertion: assertion.to_string(),
            residual,
            tolerance,
            pass: residual <= tolerance,
        });
    }

    /// Records a boolean assertion (residual 0 when it holds, 1 otherwise).
    pub fn check_bool(&mut self, theorem: &str, assertion: &str, ok: bool) {
        self.check(theorem, assertion, if ok { 0.0 } else { 1.0 }, 0.5);
    }

    pub fn extend(&mut self, other: Report) {
        self.rows.extend(other.rows);
    }

    pub fn rows(&self) -> &[ReportRow] {
        &self.rows
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    /// Largest residual over all rows (0 for an empty report).
    pub fn max_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    /// The fixed CSV rendering: header `theorem,assertion,residual,tolerance,pass`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theorem,assertion,residual,tolerance,pass\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:.6e},{:.1e},{}",
                csv_escape(&r.theorem),
                csv_escape(&r.assertion),
                r.residual,
                r.tolerance,
                r.pass
            );
        }
        out
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
