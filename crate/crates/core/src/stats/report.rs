//! Plain-text and CSV emitters for correlation matrices and pairwise tests.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::CorrelationMatrix;
use crate::error::{Error, Result};

/// Row of a pairwise comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseRow {
    pub test_a: String,
    pub test_b: String,
    pub statistic: f64,
    pub p_value: f64,
    pub method: String,
}

#[derive(Serialize)]
struct CellRow<'a> {
    measure_a: &'a str,
    measure_b: &'a str,
    rho: Option<f64>,
    p: Option<f64>,
    note: &'a str,
}

pub fn write_matrix_csv<W: Write>(writer: W, m: &CorrelationMatrix) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for c in &m.cells {
        w.serialize(CellRow {
            measure_a: &c.a,
            measure_b: &c.b,
            rho: c.rho,
            p: c.p,
            note: c.note.as_deref().unwrap_or(""),
        })?;
    }
    w.flush().map_err(|e| Error::io("<matrix writer>", e))?;
    Ok(())
}

fn triangle(
    m: &CorrelationMatrix,
    title: &str,
    pick: impl Fn(&super::CorrelationCell) -> Option<f64>,
    prec: usize,
) -> String {
    let width = m.labels.iter().map(|l| l.len()).max().unwrap_or(4).max(prec + 3) + 2;
    let mut s = String::new();
    let _ = write!(s, "{title:<width$}|");
    for l in &m.labels[1..] {
        let _ = write!(s, "{l:>width$}");
    }
    s.push('\n');
    s.push_str(&"-".repeat(width * m.labels.len() + 1));
    s.push('\n');
    for (i, a) in m.labels[..m.labels.len() - 1].iter().enumerate() {
        let _ = write!(s, "{a:<width$}|");
        for (j, b) in m.labels[1..].iter().enumerate() {
            if j < i {
                let _ = write!(s, "{:>width$}", "");
            } else {
                let v = m.cell(a, b).and_then(&pick);
                match v {
                    Some(v) => {
                        let _ = write!(s, "{v:>width$.prec$}");
                    }
                    None => {
                        let _ = write!(s, "{:>width$}", "n/a");
                    }
                }
            }
        }
        s.push('\n');
    }
    s
}

/// Coefficient and p-value triangles, one row per measure except the last.
pub fn matrix_text(m: &CorrelationMatrix) -> String {
    let mut s = triangle(m, m.method.label(), |c| c.rho, 2);
    s.push('\n');
    s.push_str(&triangle(m, "p-value", |c| c.p, 3));
    if !m.excluded.is_empty() {
        let _ = writeln!(s, "\nexcluded (constant): {}", m.excluded.join(", "));
    }
    s
}

pub fn write_pairwise_csv<W: Write>(writer: W, rows: &[PairwiseRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<pairwise writer>", e))?;
    Ok(())
}

pub fn pairwise_text(rows: &[PairwiseRow]) -> String {
    let mut s = format!("{:<8}{:<8}{:>12}  {}\n", "Test 1", "Test 2", "p-value", "method");
    for r in rows {
        let _ = writeln!(s, "{:<8}{:<8}{:>12.6}  {}", r.test_a, r.test_b, r.p_value, r.method);
    }
    s
}
