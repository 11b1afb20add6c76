//! Deterministic CSV result tables.

use std::fmt::Write as _;

/// Fixed 12-digit decimal formatting, ASCII only and platform independent;
/// matches the output contract of every command.
pub fn format_fixed12(x: f64) -> String {
    // normalize negative zero so byte comparisons stay stable
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.12}")
}

/// One `(time, reference cost)` cell of an index run.
#[derive(Debug, Clone)]
pub struct Row {
    pub time: f64,
    pub reference_cost: f64,
    pub index: f64,
    pub adjusted_cost: f64,
    pub basket: Vec<f64>,
}

/// Rows in time-major order (then cost order), plus the goods dimension for
/// the header.
#[derive(Debug, Clone)]
pub struct ResultTable {
    pub goods: usize,
    pub rows: Vec<Row>,
}

impl ResultTable {
    /// Render as comma-separated values: fixed header, LF endings, one row
    /// per cell.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("time,reference_cost,index,adjusted_cost");
        for i in 1..=self.goods {
            let _ = write!(out, ",q{i}");
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(
                out,
                "{},{},{},{}",
                format_fixed12(row.time),
                format_fixed12(row.reference_cost),
                format_fixed12(row.index),
                format_fixed12(row.adjusted_cost)
            );
            for &q in &row.basket {
                let _ = write!(out, ",{}", format_fixed12(q));
            }
            out.push('\n');
        }
        out
    }
}
