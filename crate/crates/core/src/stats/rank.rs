use crate::error::{Error, Result};

/// Ranks `1..=n`; tied values share the mean of the positions they occupy.
pub fn average_ranks(x: &[f64]) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::Domain("cannot rank an empty sample".into()));
    }
    if let Some(v) = x.iter().find(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("cannot rank non-finite value {v}")));
    }
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        // positions i..=j hold ranks i+1..=j+1
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    Ok(ranks)
}

/// Sizes of tie groups with more than one member.
pub fn tie_groups(x: &[f64]) -> Vec<usize> {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] == v[i] {
            j += 1;
        }
        if j > i {
            out.push(j - i + 1);
        }
        i = j + 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_and_tied() {
        assert_eq!(average_ranks(&[10.0, 20.0, 30.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(average_ranks(&[5.0, 5.0, 9.0]).unwrap(), vec![1.5, 1.5, 3.0]);
        assert!(average_ranks(&[]).is_err());
        assert!(average_ranks(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn moca_column() {
        let moca = [26.0, 28.0, 30.0, 30.0, 29.0, 26.0, 25.0, 29.0, 29.0, 28.0, 28.0];
        let r = average_ranks(&moca).unwrap();
        // 25 -> 1; 26 x2 -> 2.5; 28 x3 -> 5; 29 x3 -> 8; 30 x2 -> 10.5
        assert_eq!(r, vec![2.5, 5.0, 10.5, 10.5, 8.0, 2.5, 1.0, 8.0, 8.0, 5.0, 5.0]);
        let mut g = tie_groups(&moca);
        g.sort();
        assert_eq!(g, vec![2, 2, 3, 3]);
    }
}
