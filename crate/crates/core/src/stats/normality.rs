use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};

use super::TestResult;
use crate::error::{Error, Result};

pub const DEFAULT_RESAMPLES: usize = 10_000;

/// Kolmogorov-Smirnov distance to the normal fitted by sample mean and
/// sample standard deviation.
pub fn lilliefors_statistic(x: &[f64]) -> Result<f64> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    if !(var > 0.0) {
        return Err(Error::Degenerate("zero variance".into()));
    }
    let sd = var.sqrt();
    let mut z: Vec<f64> = x.iter().map(|v| (v - mean) / sd).collect();
    z.sort_by(f64::total_cmp);
    let phi = Normal::standard();
    let nf = n as f64;
    let d = z
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = phi.cdf(v);
            ((i + 1) as f64 / nf - f).max(f - i as f64 / nf)
        })
        .fold(0.0, f64::max);
    Ok(d)
}

/// Lilliefors normality screen with a seeded Monte Carlo p-value.
pub fn normality_screen(x: &[f64], seed: u64) -> Result<TestResult> {
    normality_screen_with(x, seed, DEFAULT_RESAMPLES)
}

pub fn normality_screen_with(x: &[f64], seed: u64, resamples: usize) -> Result<TestResult> {
    if x.len() < 5 {
        return Err(Error::InsufficientData { needed: 5, got: x.len() });
    }
    let d = lilliefors_statistic(x)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf = vec![0.0; x.len()];
    let mut exceed = 0usize;
    for _ in 0..resamples {
        for v in buf.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        if lilliefors_statistic(&buf)? >= d {
            exceed += 1;
        }
    }
    let p = (exceed + 1) as f64 / (resamples + 1) as f64;
    Ok(TestResult::new(d, p, "lilliefors (monte carlo)", x.len()).note(format!("{resamples} resamples, seed {seed}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_error() {
        assert!(normality_screen(&[3.0; 10], 1).is_err());
        assert!(normality_screen(&[1.0, 2.0], 1).is_err());
    }

    #[test]
    fn bimodal_rejected() {
        let mut x = vec![0.0; 10];
        x.extend(vec![100.0; 10]);
        let r = normality_screen(&x, 7).unwrap();
        assert!(r.p_value < 0.01, "{r}");
    }
}
