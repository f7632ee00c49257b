use statrs::distribution::{ContinuousCDF, Normal};

use super::rank::{average_ranks, tie_groups};
use super::TestResult;
use crate::error::{Error, Result};

/// Largest number of non-zero differences for which the p-value is exact.
pub const EXACT_LIMIT: usize = 20;

/// Wilcoxon signed-rank test on paired samples.
///
/// Zero differences are dropped; tied magnitudes get average ranks. The
/// statistic is `W = min(W+, W−)`. For up to [`EXACT_LIMIT`] differences the
/// two-sided p counts every sign assignment whose smaller rank sum is at most
/// `W`; above that a tie-corrected normal approximation is used.
pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64]) -> Result<TestResult> {
    if x.len() != y.len() {
        return Err(Error::Domain(format!("paired samples differ in length: {} vs {}", x.len(), y.len())));
    }
    let diffs: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::Domain("differences must be finite".into()));
    }
    let nonzero: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    let dropped = diffs.len() - nonzero.len();
    if nonzero.is_empty() {
        return Err(Error::Degenerate("all paired differences are zero".into()));
    }
    let mags: Vec<f64> = nonzero.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&mags)?;
    // fold from +0.0: an empty f64 sum is -0.0
    let w_plus = ranks.iter().zip(&nonzero).filter(|(_, d)| **d > 0.0).fold(0.0, |acc, (r, _)| acc + r);
    let n = nonzero.len();
    let total = (n * (n + 1)) as f64 / 2.0;
    let w = w_plus.min(total - w_plus);
    let ties = tie_groups(&mags);

    let mut res = if n <= EXACT_LIMIT {
        TestResult::new(w, wilcoxon_exact_p(&ranks, w), "wilcoxon signed-rank (exact)", n)
    } else {
        let mean = total / 2.0;
        let tie_adj: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
        let var = (n * (n + 1) * (2 * n + 1)) as f64 / 24.0 - tie_adj;
        let z = ((w - mean).abs() - 0.5).max(0.0) / var.sqrt();
        let p = 2.0 * Normal::standard().cdf(-z);
        TestResult::new(w, p, "wilcoxon signed-rank (normal approximation)", n)
            .note(format!("z = {z:.4}, continuity corrected"))
    };
    if dropped > 0 {
        res = res.note(format!("{dropped} zero difference(s) dropped"));
    }
    if !ties.is_empty() {
        res = res.note("tied magnitudes: average ranks");
    }
    Ok(res)
}

/// Exact two-sided p for signed ranks `ranks` and observed `w = min(W+, W−)`.
///
/// Counts sign assignments by dynamic programming over doubled (integer) rank
/// sums.
pub fn wilcoxon_exact_p(ranks: &[f64], w: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max: usize = doubled.iter().sum();
    let mut counts = vec![0f64; max + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            let c = counts[s];
            if c != 0.0 {
                counts[s + r] += c;
            }
        }
        reach += r;
    }
    let w2 = (2.0 * w).round() as usize;
    let hits: f64 = counts.iter().enumerate().filter(|(s, _)| (*s).min(max - *s) <= w2).map(|(_, c)| *c).sum();
    (hits / 2f64.powi(ranks.len() as i32)).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_signed_five() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let r = wilcoxon_signed_rank(&x, &[0.0; 5]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(r.statistic.is_sign_positive());
        assert!((r.p_value - 2.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn identical_is_degenerate() {
        let x = [1.0, 2.0, 3.0];
        assert!(matches!(wilcoxon_signed_rank(&x, &x), Err(Error::Degenerate(_))));
    }

    #[test]
    fn zeros_dropped() {
        let r = wilcoxon_signed_rank(&[1.0, 2.0, 3.0, 4.0], &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(r.n, 3);
        assert!(r.notes.iter().any(|n| n.contains("dropped")));
        assert!((r.p_value - 0.25).abs() < 1e-15);
    }

    #[test]
    fn symmetric_center_is_one() {
        // +1, -2, +3, -4, with W+ = 4, W- = 6: includes centre, p capped at 1
        let r = wilcoxon_signed_rank(&[1.0, -2.0, 3.0, -4.0], &[0.0; 4]).unwrap();
        assert!(r.p_value <= 1.0);
        assert!(r.p_value > 0.5);
    }

    #[test]
    fn large_sample_uses_normal() {
        let x: Vec<f64> = (1..=30).map(|v| v as f64).collect();
        let r = wilcoxon_signed_rank(&x, &vec![0.0; 30]).unwrap();
        assert!(r.method.contains("normal"));
        assert!(r.p_value < 1e-5);
    }
}
