//! Small-sample statistics: ranks, correlation, exact signed-rank, Friedman
//! with pairwise post-hoc, Lilliefors normality screening and descriptives.

mod correlation;
mod descriptive;
mod friedman;
mod matrix;
mod normality;
mod rank;
pub mod report;
mod wilcoxon;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use correlation::{pearson, spearman, spearman_exact, spearman_with, CorrelationMethod};
pub use descriptive::{descriptives, Descriptives};
pub use friedman::{friedman, posthoc_pairwise, posthoc_pairwise_with, Correction, PairwiseComparison, PosthocPValue};
pub use matrix::{correlation_matrix, correlation_matrix_for, CorrelationCell, CorrelationMatrix};
pub use normality::{lilliefors_statistic, normality_screen, normality_screen_with};
pub use rank::{average_ranks, tie_groups};
pub use wilcoxon::{wilcoxon_exact_p, wilcoxon_signed_rank, EXACT_LIMIT as WILCOXON_EXACT_LIMIT};

/// Outcome of a hypothesis test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub method: String,
    pub n: usize,
    pub notes: Vec<String>,
}

impl TestResult {
    pub(crate) fn new(statistic: f64, p_value: f64, method: impl Into<String>, n: usize) -> Self {
        Self { statistic, p_value: p_value.clamp(0.0, 1.0), method: method.into(), n, notes: Vec::new() }
    }

    pub(crate) fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }
}

impl fmt::Display for TestResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: stat = {:.4}, p = {:.6} (n = {})", self.method, self.statistic, self.p_value, self.n)?;
        if !self.notes.is_empty() {
            write!(f, " [{}]", self.notes.join("; "))?;
        }
        Ok(())
    }
}
