use serde::{Deserialize, Serialize};

use super::correlation::{pearson, spearman, CorrelationMethod};
use crate::error::{Error, Result};
use crate::participant::{column, Measure, ParticipantRecord};

/// One unique unordered pair of the matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCell {
    pub a: String,
    pub b: String,
    pub rho: Option<f64>,
    pub p: Option<f64>,
    /// Why the cell is undefined, when it is.
    pub note: Option<String>,
}

/// Upper-triangular correlation matrix stored as its unique pairs in
/// row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    pub method: CorrelationMethod,
    pub cells: Vec<CorrelationCell>,
    pub excluded: Vec<String>,
}

impl CorrelationMatrix {
    pub fn cell(&self, a: &str, b: &str) -> Option<&CorrelationCell> {
        self.cells.iter().find(|c| (c.a == a && c.b == b) || (c.a == b && c.b == a))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Correlates every unique pair of named columns.
pub fn correlation_matrix(columns: &[(String, Vec<f64>)], method: CorrelationMethod) -> Result<CorrelationMatrix> {
    if columns.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: columns.len() });
    }
    let n = columns[0].1.len();
    if let Some((name, _)) = columns.iter().find(|(_, c)| c.len() != n) {
        return Err(Error::Domain(format!("column {name} is incomplete")));
    }
    let mut cells = Vec::new();
    for (i, (a, x)) in columns.iter().enumerate() {
        for (b, y) in &columns[i + 1..] {
            let r = match method {
                CorrelationMethod::Spearman => spearman(x, y),
                CorrelationMethod::Pearson => pearson(x, y),
            };
            let cell = match r {
                Ok(t) => CorrelationCell {
                    a: a.clone(),
                    b: b.clone(),
                    rho: Some(t.statistic),
                    p: Some(t.p_value),
                    note: None,
                },
                Err(Error::UndefinedCorrelation(m)) => {
                    CorrelationCell { a: a.clone(), b: b.clone(), rho: None, p: None, note: Some(m) }
                }
                Err(e) => return Err(e),
            };
            cells.push(cell);
        }
    }
    Ok(CorrelationMatrix {
        labels: columns.iter().map(|(l, _)| l.clone()).collect(),
        method,
        cells,
        excluded: Vec::new(),
    })
}

/// Correlation matrix over participant measures. emNSA and FMA-HW columns
/// are dropped when constant across participants.
pub fn correlation_matrix_for(
    records: &[ParticipantRecord],
    measures: &[Measure],
    method: CorrelationMethod,
) -> Result<CorrelationMatrix> {
    let mut excluded = Vec::new();
    let mut cols = Vec::new();
    for &m in measures {
        let c = column(records, m);
        if m.excluded_when_constant() && c.windows(2).all(|w| w[0] == w[1]) {
            excluded.push(m.label().to_string());
            continue;
        }
        cols.push((m.label().to_string(), c));
    }
    let mut mat = correlation_matrix(&cols, method)?;
    mat.excluded = excluded;
    Ok(mat)
}
