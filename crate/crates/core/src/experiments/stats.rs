//! Aggregation helpers: compensated sums, nearest-rank percentiles and
//! least-squares slopes in log-log space.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Neumaier-compensated sum. Summing the same values in the same order gives
/// the same bits on every platform.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

pub fn mean(values: &[f64]) -> f64 {
    compensated_sum(values.iter().copied()) / values.len() as f64
}

/// Nearest-rank percentile of an ascending slice: the element of 1-based
/// rank `ceil(p / 100 * N)`, clamped to `[1, N]`.
pub fn percentile_nearest_rank(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of an empty sample");
    let n = sorted.len();
    let rank = ((p / 100.0) * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("slope undefined: {eligible} eligible point(s), need at least 2 distinct T")]
    InsufficientPoints { eligible: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Ordinary least squares of `log10(value)` on `log10(T)` over the points
/// with `T >= t_min` and `value > 0`.
pub fn fit_loglog_slope(points: &[(f64, f64)], t_min: f64) -> Result<LogLogFit, FitError> {
    let eligible: Vec<(f64, f64)> = points
        .iter()
        .filter(|(t, v)| *t >= t_min && *t > 0.0 && *v > 0.0)
        .map(|(t, v)| (t.log10(), v.log10()))
        .collect();
    let n = eligible.len();
    let insufficient = FitError::InsufficientPoints { eligible: n };
    if n < 2 {
        return Err(insufficient);
    }
    let mx = eligible.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = eligible.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxx: f64 = eligible.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = eligible.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = eligible.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(insufficient);
    }
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok(LogLogFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        points: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_power_laws() {
        let ts = [1e2f64, 1e3, 1e4, 1e5];
        let linear: Vec<_> = ts.iter().map(|&t| (t, t)).collect();
        let root: Vec<_> = ts.iter().map(|&t| (t, t.sqrt())).collect();
        let f = fit_loglog_slope(&linear, 0.0).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12 && f.intercept.abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!((fit_loglog_slope(&root, 0.0).unwrap().slope - 0.5).abs() < 1e-12);
    }

    #[test]
    fn noisy_cube_root_law() {
        let mut rng = crate::game::RngStream::new(11);
        let pts: Vec<(f64, f64)> = (0..6)
            .map(|k| {
                let t = 10f64.powi(2 + k);
                (t, t.cbrt() * (1.0 + 0.05 * (2.0 * rng.uniform() - 1.0)))
            })
            .collect();
        let fit = fit_loglog_slope(&pts, 0.0).unwrap();
        assert!((fit.slope - 1.0 / 3.0).abs() <= 0.08, "{fit:?}");
    }

    #[test]
    fn threshold_filters_points() {
        let pts = [(10.0, 1.0), (100.0, 10.0), (1000.0, 10.0)];
        let f = fit_loglog_slope(&pts, 100.0).unwrap();
        assert_eq!(f.points, 2);
        assert!(f.slope.abs() < 1e-12);
        assert_eq!(
            fit_loglog_slope(&pts, 1000.0),
            Err(FitError::InsufficientPoints { eligible: 1 })
        );
        assert!(fit_loglog_slope(&[(5.0, 1.0), (5.0, 2.0)], 0.0).is_err());
    }

    #[test]
    fn nearest_rank() {
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(percentile_nearest_rank(&v, 10.0), 1.0);
        assert_eq!(percentile_nearest_rank(&v, 90.0), 9.0);
        assert_eq!(percentile_nearest_rank(&v, 0.0), 1.0);
        assert_eq!(percentile_nearest_rank(&v, 100.0), 10.0);
        assert_eq!(percentile_nearest_rank(&[3.0], 10.0), 3.0);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let values = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(values), 2.0);
    }

    proptest! {
        #[test]
        fn percentiles_are_ordered(mut v in prop::collection::vec(-1e3f64..1e3, 1..200)) {
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let p10 = percentile_nearest_rank(&v, 10.0);
            let p90 = percentile_nearest_rank(&v, 90.0);
            prop_assert!(p10 <= p90);
            prop_assert!(v[0] <= p10 && p90 <= v[v.len() - 1]);
        }
    }
}
