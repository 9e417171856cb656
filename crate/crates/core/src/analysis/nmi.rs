use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::partition::Partition;

/// Normalised mutual information between two partitions of the same nodes.
///
/// Natural logarithms, `0 log 0 = 0`. A partition with a single community
/// carries no information, so the result is 0 whenever either side has one.
pub fn nmi(a: &Partition, b: &Partition) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::domain(format!(
            "partitions cover {} and {} nodes",
            a.len(),
            b.len()
        )));
    }
    if a.community_count() <= 1 || b.community_count() <= 1 {
        return Ok(0.0);
    }
    let n = a.len() as f64;
    let mut joint: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (&x, &y) in a.assignment().iter().zip(b.assignment()) {
        *joint.entry((x, y)).or_default() += 1.0;
    }
    let rows: Vec<f64> = a.sizes().into_iter().map(|s| s as f64).collect();
    let cols: Vec<f64> = b.sizes().into_iter().map(|s| s as f64).collect();
    let mut num = 0.0;
    for (&(i, j), &c) in &joint {
        num += c * (c * n / (rows[i] * cols[j])).ln();
    }
    let entropy = |sizes: &[f64]| sizes.iter().map(|&s| s * (s / n).ln()).sum::<f64>();
    let den = entropy(&rows) + entropy(&cols);
    Ok((-2.0 * num / den).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Partition {
        Partition::from_assignment(v.to_vec())
    }

    #[test]
    fn identical_is_one() {
        assert!((nmi(&p(&[0, 0, 1, 1]), &p(&[1, 1, 0, 0])).unwrap() - 1.0).abs() < 1e-12);
        assert!((nmi(&p(&[0, 1, 2, 2, 1]), &p(&[0, 1, 2, 2, 1])).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn crossed_halves_are_zero() {
        assert!(nmi(&p(&[0, 0, 1, 1]), &p(&[0, 1, 0, 1])).unwrap().abs() < 1e-12);
    }

    #[test]
    fn single_community_is_zero() {
        assert_eq!(nmi(&p(&[0, 0, 0]), &p(&[0, 0, 0])).unwrap(), 0.0);
        assert_eq!(nmi(&p(&[0, 1, 1]), &p(&[0, 0, 0])).unwrap(), 0.0);
    }

    #[test]
    fn refinement_value() {
        // 2 * 4 ln 2 / (4 ln 2 + 6 ln 2)
        let v = nmi(&p(&[0, 0, 1, 1]), &p(&[0, 1, 2, 2])).unwrap();
        assert!((v - 0.8).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch() {
        assert!(nmi(&p(&[0, 1]), &p(&[0, 1, 1])).is_err());
    }
}
