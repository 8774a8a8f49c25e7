//! FTRL over the simplex with the 1/2-Tsallis regularizer `psi(x) = -2 sum sqrt(x_i)`.
//!
//! The minimizer of `<L, x> + psi(x) / eta` has the closed form
//! `x_i = 1 / (eta (L_i + lambda))^2` where the normalizer `lambda` is the
//! unique root of `g(lambda) = sum_i x_i(lambda) - 1` with
//! `eta (L_i + lambda) > 0` for every `i`. We solve in the shifted variable
//! `mu = lambda + min L`, whose root lies in `[1/eta, sqrt(m)/eta]`: at the
//! left end the minimal coordinate alone contributes 1, at the right end every
//! coordinate is at most `1/m`.

use super::LearnerError;
use crate::game::MixedStrategy;

/// Stop once `|g| <= RESIDUAL_TOLERANCE`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 200;

/// Solves the Tsallis FTRL problem for cumulative losses `cum_loss` and
/// learning rate `eta`.
pub fn ftrl_solve(cum_loss: &[f64], eta: f64) -> Result<MixedStrategy, LearnerError> {
    let mut out = vec![0.0; cum_loss.len()];
    ftrl_solve_into(cum_loss, eta, &mut out)?;
    Ok(MixedStrategy::from_normalized(out))
}

/// Allocation-free variant of [`ftrl_solve`]; returns the normalizer
/// `lambda` of the unshifted problem.
pub fn ftrl_solve_into(cum_loss: &[f64], eta: f64, out: &mut [f64]) -> Result<f64, LearnerError> {
    let m = cum_loss.len();
    if m == 0 {
        return Err(LearnerError::NoActions);
    }
    assert_eq!(out.len(), m, "output buffer length mismatch");
    if !(eta.is_finite() && eta > 0.0) {
        return Err(LearnerError::InvalidRate(eta));
    }
    if let Some(index) = cum_loss.iter().position(|l| !l.is_finite()) {
        return Err(LearnerError::NonFinite { index });
    }
    let min_loss = cum_loss.iter().copied().fold(f64::INFINITY, f64::min);

    let mut lo = 1.0 / eta;
    let mut hi = (m as f64).sqrt() / eta;
    let mut mu = 0.5 * (lo + hi);
    let mut residual = f64::NAN;

    for _ in 0..MAX_ITERATIONS {
        let (g, slope) = residual_and_slope(cum_loss, min_loss, eta, mu);
        residual = g;
        if g.abs() <= RESIDUAL_TOLERANCE {
            fill_strategy(cum_loss, min_loss, eta, mu, out);
            return Ok(mu - min_loss);
        }
        // g is decreasing in mu.
        if g > 0.0 {
            lo = mu;
        } else {
            hi = mu;
        }
        let newton = mu - g / slope;
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if next == mu {
            break;
        }
        mu = next;
    }
    Err(LearnerError::NoConvergence { residual })
}

#[inline]
fn residual_and_slope(cum_loss: &[f64], min_loss: f64, eta: f64, mu: f64) -> (f64, f64) {
    let mut sum = 0.0;
    let mut slope = 0.0;
    for &l in cum_loss {
        let inv = 1.0 / (eta * (l - min_loss + mu));
        let x = inv * inv;
        sum += x;
        slope += x * inv;
    }
    (sum - 1.0, -2.0 * eta * slope)
}

fn fill_strategy(cum_loss: &[f64], min_loss: f64, eta: f64, mu: f64, out: &mut [f64]) {
    let mut sum = 0.0;
    for (o, &l) in out.iter_mut().zip(cum_loss) {
        let inv = 1.0 / (eta * (l - min_loss + mu));
        *o = inv * inv;
        sum += *o;
    }
    out.iter_mut().for_each(|o| *o /= sum);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_losses_give_uniform() {
        for eta in [0.01, 0.5, 3.0] {
            let x = ftrl_solve(&[0.0; 4], eta).unwrap();
            for p in x.probs() {
                assert!((p - 0.25).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_losses_give_uniform() {
        for c in [-50.0, 3.5, 1e4] {
            let x = ftrl_solve(&[c; 5], 0.3).unwrap();
            for p in x.probs() {
                assert!((p - 0.2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_action() {
        let x = ftrl_solve(&[42.0], 0.1).unwrap();
        assert_eq!(x.probs(), &[1.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            ftrl_solve(&[0.0, f64::NAN], 0.5),
            Err(LearnerError::NonFinite { index: 1 })
        );
        assert_eq!(ftrl_solve(&[0.0], 0.0), Err(LearnerError::InvalidRate(0.0)));
        assert_eq!(ftrl_solve(&[], 1.0), Err(LearnerError::NoActions));
    }

    #[test]
    fn extreme_losses_stay_positive() {
        let x = ftrl_solve(&[0.0, 1e9, 1e12], 1e-3).unwrap();
        assert!(x.probs().iter().all(|&p| p > 0.0));
        assert!((x.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
