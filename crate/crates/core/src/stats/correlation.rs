use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::rank::{average_ranks, tie_groups};
use super::TestResult;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorrelationMethod {
    Spearman,
    Pearson,
}

impl CorrelationMethod {
    pub fn label(self) -> &'static str {
        match self {
            CorrelationMethod::Spearman => "spearman",
            CorrelationMethod::Pearson => "pearson",
        }
    }
}

fn check_pair(x: &[f64], y: &[f64], min_n: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Domain(format!("sample lengths differ: {} vs {}", x.len(), y.len())));
    }
    if x.len() < min_n {
        return Err(Error::InsufficientData { needed: min_n, got: x.len() });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Domain("samples must be finite".into()));
    }
    Ok(())
}

fn linear_r(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("a sample has zero variance".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Two-sided p of a correlation coefficient via `t = r·√((n−2)/(1−r²))`.
fn t_test_p(r: f64, n: usize) -> f64 {
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    let t = r * (df / (1.0 - r * r)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    2.0 * dist.cdf(-t.abs())
}

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<TestResult> {
    check_pair(x, y, 4)?;
    let r = linear_r(x, y)?;
    Ok(TestResult::new(r, t_test_p(r, x.len()), "pearson", x.len()))
}

/// Spearman rank correlation with average ranks for ties, p from the
/// t approximation.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<TestResult> {
    spearman_with(x, y, false)
}

/// As [`spearman`]; with `exact` the p-value comes from the full permutation
/// distribution (n ≤ 9 only).
pub fn spearman_with(x: &[f64], y: &[f64], exact: bool) -> Result<TestResult> {
    check_pair(x, y, 4)?;
    let rx = average_ranks(x)?;
    let ry = average_ranks(y)?;
    let rho = linear_r(&rx, &ry)?;
    let n = x.len();
    let mut res = if exact {
        TestResult::new(rho, permutation_p(&rx, &ry, rho)?, "spearman (exact permutation)", n)
    } else {
        TestResult::new(rho, t_test_p(rho, n), "spearman", n)
    };
    if !tie_groups(x).is_empty() || !tie_groups(y).is_empty() {
        res = res.note("ties present: average ranks");
    }
    Ok(res)
}

pub fn spearman_exact(x: &[f64], y: &[f64]) -> Result<TestResult> {
    spearman_with(x, y, true)
}

const PERMUTATION_LIMIT: usize = 9;

fn permutation_p(rx: &[f64], ry: &[f64], rho: f64) -> Result<f64> {
    let n = rx.len();
    if n > PERMUTATION_LIMIT {
        return Err(Error::Domain(format!("exact permutation p limited to n <= {PERMUTATION_LIMIT}, got {n}")));
    }
    let mut perm = ry.to_vec();
    let mut hits = 0u64;
    let mut total = 0u64;
    let threshold = rho.abs() - 1e-12;
    // Heap's algorithm
    let mut c = vec![0usize; n];
    let mut visit = |p: &[f64]| {
        total += 1;
        if let Ok(r) = linear_r(rx, p) {
            if r.abs() >= threshold {
                hits += 1;
            }
        }
    };
    visit(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(hits as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities() {
        let x = [1.0, 4.0, 2.0, 8.0, 5.0];
        assert!((spearman(&x, &x).unwrap().statistic - 1.0).abs() < 1e-12);
        let r = spearman(&[1.0, 2.0, 3.0, 4.0], &[4.0, 3.0, 2.0, 1.0]).unwrap();
        assert!((r.statistic + 1.0).abs() < 1e-12);
        assert_eq!(r.p_value, 0.0);
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 3.0).collect();
        assert!((pearson(&x, &y).unwrap().statistic - 1.0).abs() < 1e-12);
        let z: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &z).unwrap().statistic + 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_point_reversal_needs_four() {
        assert!(matches!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn constant_input_is_undefined() {
        let x = [1.0, 1.0, 1.0, 1.0];
        let y = [1.0, 2.0, 3.0, 4.0];
        assert!(matches!(spearman(&x, &y), Err(Error::UndefinedCorrelation(_))));
        assert!(matches!(pearson(&y, &x), Err(Error::UndefinedCorrelation(_))));
        assert!(spearman(&y, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn exact_permutation_small() {
        // n = 4 perfect order: only the identity and reversal reach |rho| = 1 -> 2/24
        let x = [1.0, 2.0, 3.0, 4.0];
        let r = spearman_exact(&x, &x).unwrap();
        assert!((r.p_value - 2.0 / 24.0).abs() < 1e-12);
        assert!(spearman_exact(&[0.0; 10], &[0.0; 10]).is_err());
    }
}
