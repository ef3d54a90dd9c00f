//! Minimum and binned mode of delay vectors.

use std::collections::BTreeMap;

use crate::error::{Result, SimError};

pub fn min_statistic(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(SimError::InvalidInput("min of an empty vector".into()));
    }
    Ok(values.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Most frequent bin `floor(v / bin_width)`, reported by its lower edge.
/// Ties go to the smaller bin. Non-finite values are ignored; if nothing
/// finite remains the result is `+inf`.
pub fn mode_statistic(values: &[f64], bin_width: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(SimError::InvalidInput("mode of an empty vector".into()));
    }
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(SimError::InvalidInput(format!(
            "bin width must be positive and finite, got {bin_width}"
        )));
    }
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for v in values.iter().filter(|v| v.is_finite()) {
        *counts.entry((v / bin_width).floor() as i64).or_default() += 1;
    }
    // BTreeMap iterates bins in ascending order, so `>` keeps the smallest on ties.
    let mut best: Option<(i64, usize)> = None;
    for (&bin, &n) in &counts {
        if best.is_none_or(|(_, m)| n > m) {
            best = Some((bin, n));
        }
    }
    Ok(best.map_or(f64::INFINITY, |(bin, _)| bin as f64 * bin_width))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn min_examples() {
        assert_eq!(min_statistic(&[3.0, 1.0, 2.0]).unwrap(), 1.0);
        assert_eq!(min_statistic(&[4.5]).unwrap(), 4.5);
        assert!(min_statistic(&[]).is_err());
    }

    #[test]
    fn mode_examples() {
        assert_eq!(mode_statistic(&[1.0, 1.0, 2.0], 1.0).unwrap(), 1.0);
        assert_relative_eq!(
            mode_statistic(&[0.101, 0.102, 0.25], 0.01).unwrap(),
            0.10,
            max_relative = 1e-12
        );
        assert_eq!(mode_statistic(&[0.3, 0.5, 0.7], 1e9).unwrap(), 0.0);
        assert_eq!(mode_statistic(&[2.0, 1.0], 1.0).unwrap(), 1.0);
        assert!(mode_statistic(&[], 1.0).is_err());
        assert!(mode_statistic(&[1.0], 0.0).is_err());
        assert_eq!(
            mode_statistic(&[f64::INFINITY], 1.0).unwrap(),
            f64::INFINITY
        );
    }

    proptest! {
        #[test]
        fn mode_is_a_populated_bin(v in prop::collection::vec(0.0f64..10.0, 1..50), w in 0.01f64..3.0) {
            let m = mode_statistic(&v, w).unwrap();
            let bin = (m / w).round() as i64;
            prop_assert!(v.iter().any(|x| (x / w).floor() as i64 == bin));
            prop_assert!(min_statistic(&v).unwrap() <= *v.iter().max_by(|a, b| a.total_cmp(b)).unwrap());
        }
    }
}
