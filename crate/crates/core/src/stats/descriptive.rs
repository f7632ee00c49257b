use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::psychophysics::median;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Descriptives {
    pub n: usize,
    pub mean: f64,
    /// Sample (n − 1) standard deviation; 0 with a note when n = 1.
    pub std: f64,
    pub median: f64,
    pub notes: Vec<String>,
}

pub fn descriptives(x: &[f64]) -> Result<Descriptives> {
    if x.is_empty() {
        return Err(Error::Domain("descriptives of an empty sample".into()));
    }
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let mut notes = Vec::new();
    let std = if n > 1 {
        (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        notes.push("sample standard deviation undefined for n = 1; reported as 0".to_string());
        0.0
    };
    Ok(Descriptives { n, mean, std, median: median(x), notes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_value() {
        let d = descriptives(&[5.0]).unwrap();
        assert_eq!((d.mean, d.std, d.median), (5.0, 0.0, 5.0));
        assert_eq!(d.notes.len(), 1);
        assert!(descriptives(&[]).is_err());
    }

    #[test]
    fn even_median() {
        let d = descriptives(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(d.median, 2.5);
        assert!((d.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }
}
