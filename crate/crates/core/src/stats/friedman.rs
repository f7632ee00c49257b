use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use super::rank::{average_ranks, tie_groups};
use super::TestResult;
use crate::error::{Error, Result};

fn check_matrix(rows: &[Vec<f64>]) -> Result<(usize, usize)> {
    let n = rows.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let k = rows[0].len();
    if k < 2 {
        return Err(Error::Domain(format!("need at least two treatments, got {k}")));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != k) {
        return Err(Error::Domain(format!("ragged matrix: row {i} has {} columns, expected {k}", r.len())));
    }
    Ok((n, k))
}

fn row_ranks(rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    rows.iter().map(|r| average_ranks(r)).collect()
}

fn rank_sums(ranks: &[Vec<f64>], k: usize) -> Vec<f64> {
    (0..k).map(|j| ranks.iter().map(|r| r[j]).sum()).collect()
}

/// Friedman test over an `n × k` matrix (rows = subjects, columns = treatments).
///
/// Ranks within each row; with ties the statistic is divided by
/// `1 − Σ(t³−t) / (n(k³−k))`. p from χ² with `k − 1` degrees of freedom.
pub fn friedman(rows: &[Vec<f64>]) -> Result<TestResult> {
    let (n, k) = check_matrix(rows)?;
    let ranks = row_ranks(rows)?;
    let sums = rank_sums(&ranks, k);
    let (nf, kf) = (n as f64, k as f64);
    let ss: f64 = sums.iter().map(|r| r * r).sum();
    let raw = 12.0 / (nf * kf * (kf + 1.0)) * ss - 3.0 * nf * (kf + 1.0);
    let ties: f64 = rows.iter().flat_map(|r| tie_groups(r)).map(|t| (t * t * t - t) as f64).sum();
    let correction = 1.0 - ties / (nf * (kf * kf * kf - kf));
    let chi2 = if correction <= 0.0 || raw.abs() < 1e-12 { 0.0 } else { (raw / correction).max(0.0) };
    let dist = ChiSquared::new(kf - 1.0).expect("k >= 2");
    let p = if chi2 == 0.0 { 1.0 } else { 1.0 - dist.cdf(chi2) };
    let mut res = TestResult::new(chi2, p, "friedman", n)
        .note(format!("rank sums = {:?}", sums.iter().map(|v| (v * 100.0).round() / 100.0).collect::<Vec<_>>()));
    if ties > 0.0 {
        res = res.note("within-row ties: tie-corrected statistic");
    }
    Ok(res)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Correction {
    None,
    Bonferroni,
}

/// How the pairwise p-value is computed from the rank-sum difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PosthocPValue {
    /// Exact distribution of the difference under within-row exchangeability.
    Exact,
    /// Two-sided standard normal tail of Dunn's z.
    Normal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseComparison {
    pub a: usize,
    pub b: usize,
    pub rank_sum_diff: f64,
    pub z: f64,
    /// Unadjusted p from the normal tail of `z`.
    pub p_normal: f64,
    /// Unadjusted p from the chosen method.
    pub p_unadjusted: f64,
    /// `test.p_value` is the corrected p.
    pub test: TestResult,
}

/// Pairwise comparisons after [`friedman`], exact p with Bonferroni correction.
pub fn posthoc_pairwise(rows: &[Vec<f64>], correction: Correction) -> Result<Vec<PairwiseComparison>> {
    posthoc_pairwise_with(rows, correction, PosthocPValue::Exact)
}

/// Dunn-style z on Friedman rank sums, `z = |Rᵢ − Rⱼ| / √(n·k·(k+1)/6)`.
pub fn posthoc_pairwise_with(
    rows: &[Vec<f64>],
    correction: Correction,
    method: PosthocPValue,
) -> Result<Vec<PairwiseComparison>> {
    let (n, k) = check_matrix(rows)?;
    let ranks = row_ranks(rows)?;
    let sums = rank_sums(&ranks, k);
    let se = ((n * k * (k + 1)) as f64 / 6.0).sqrt();
    let m = k * (k - 1) / 2;
    let std_normal = Normal::standard();
    let mut out = Vec::with_capacity(m);
    for a in 0..k {
        for b in a + 1..k {
            let diff = sums[a] - sums[b];
            let z = diff.abs() / se;
            let p_normal = (2.0 * std_normal.cdf(-z)).min(1.0);
            let p_unadjusted = match method {
                PosthocPValue::Normal => p_normal,
                PosthocPValue::Exact => exact_rank_diff_p(&ranks, diff.abs()),
            };
            let p_adj = match correction {
                Correction::None => p_unadjusted,
                Correction::Bonferroni => (p_unadjusted * m as f64).min(1.0),
            };
            let label = match method {
                PosthocPValue::Exact => "friedman post-hoc (exact rank-sum difference)",
                PosthocPValue::Normal => "friedman post-hoc (Dunn z)",
            };
            let mut test = TestResult::new(z, p_adj, label, n);
            if correction == Correction::Bonferroni {
                test = test.note(format!("bonferroni x{m}"));
            }
            out.push(PairwiseComparison { a, b, rank_sum_diff: diff, z, p_normal, p_unadjusted, test });
        }
    }
    Ok(out)
}

/// `P(|Rₐ − R_b| ≥ observed)` when each row's ranks are randomly permuted.
/// The distribution is the same for every column pair.
fn exact_rank_diff_p(ranks: &[Vec<f64>], observed: f64) -> f64 {
    // distribution of doubled differences keeps half-ranks integral
    let mut dist: BTreeMap<i64, f64> = BTreeMap::from([(0, 1.0)]);
    for row in ranks {
        let k = row.len();
        let mut step: BTreeMap<i64, f64> = BTreeMap::new();
        let w = 1.0 / (k * (k - 1)) as f64;
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    let d = (2.0 * (row[i] - row[j])).round() as i64;
                    *step.entry(d).or_default() += w;
                }
            }
        }
        let mut next: BTreeMap<i64, f64> = BTreeMap::new();
        for (s, p) in &dist {
            for (d, q) in &step {
                *next.entry(s + d).or_default() += p * q;
            }
        }
        dist = next;
    }
    let obs2 = (2.0 * observed).round() as i64;
    dist.iter().filter(|(s, _)| s.abs() >= obs2).map(|(_, p)| p).sum::<f64>().min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_columns() {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64; 3]).collect();
        let r = friedman(&rows).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        for c in posthoc_pairwise(&rows, Correction::Bonferroni).unwrap() {
            assert_eq!(c.test.p_value, 1.0);
            assert_eq!(c.p_normal, 1.0);
        }
    }

    #[test]
    fn ragged_is_error() {
        let rows = vec![vec![1.0, 2.0], vec![1.0]];
        assert!(matches!(friedman(&rows), Err(Error::Domain(_))));
        assert!(friedman(&[vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn two_treatments() {
        // 9 of 11 rows favour column 0; rank sums (20, 13)
        let mut rows = vec![vec![2.0, 1.0]; 9];
        rows.extend(vec![vec![1.0, 2.0]; 2]);
        let r = friedman(&rows).unwrap();
        assert!((r.statistic - 49.0 / 11.0).abs() < 1e-9);
        assert!((r.p_value - 0.0348).abs() < 0.0005);
    }

    #[test]
    fn bonferroni_dominates() {
        let rows = vec![
            vec![3.0, 1.0, 2.0],
            vec![2.0, 1.5, 1.0],
            vec![9.0, 4.0, 5.0],
            vec![1.0, 0.5, 0.7],
            vec![4.0, 3.0, 3.5],
        ];
        for method in [PosthocPValue::Exact, PosthocPValue::Normal] {
            let adj = posthoc_pairwise_with(&rows, Correction::Bonferroni, method).unwrap();
            let raw = posthoc_pairwise_with(&rows, Correction::None, method).unwrap();
            for (x, y) in adj.iter().zip(&raw) {
                assert!(x.test.p_value >= y.test.p_value);
            }
        }
    }

    #[test]
    fn exact_distribution_is_normalised() {
        let ranks = vec![vec![1.0, 2.0, 3.0]; 5];
        assert!((exact_rank_diff_p(&ranks, 0.0) - 1.0).abs() < 1e-12);
        // max |diff| = 10 needs every row at +-2 in the same direction: 2 * (1/6)^5
        let p = exact_rank_diff_p(&ranks, 10.0);
        assert!((p - 2.0 / 6f64.powi(5)).abs() < 1e-15);
    }
}
