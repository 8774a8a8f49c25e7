use serde::{Deserialize, Serialize};

use super::{EquilibriumError, EquilibriumSolution};
use crate::game::{MixedStrategy, PayoffMatrix};

/// Non-support gaps at or below this value make `omega` infinite.
pub const DEGENERATE_GAP: f64 = 1e-12;

/// Gaps more negative than this mean the supplied pair is not an equilibrium.
const NE_VIOLATION: f64 = 1e-7;

/// `max_i (A y)(i) - min_j (A^T x)(j)`.
///
/// Both inner problems of the duality gap are linear over a simplex, so they
/// are attained at vertices.
pub fn duality_gap(
    a: &PayoffMatrix,
    x: &MixedStrategy,
    y: &MixedStrategy,
) -> Result<f64, EquilibriumError> {
    check_len("x", a.rows(), x.len())?;
    check_len("y", a.cols(), y.len())?;
    Ok(duality_gap_raw(a, x.probs(), y.probs()))
}

/// Unchecked [`duality_gap`] on raw probability slices.
pub fn duality_gap_raw(a: &PayoffMatrix, x: &[f64], y: &[f64]) -> f64 {
    let best_row = a
        .mul_vec(y)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let best_col = a.tr_mul_vec(x).into_iter().fold(f64::INFINITY, f64::min);
    (best_row - best_col).max(0.0)
}

/// Bregman divergence of the 1/2-Tsallis regularizer,
/// `D(target, base) = sum_i (sqrt(target_i) - sqrt(base_i))^2 / sqrt(base_i)`.
pub fn bregman_half_tsallis(
    target: &MixedStrategy,
    base: &MixedStrategy,
) -> Result<f64, EquilibriumError> {
    check_len("base", target.len(), base.len())?;
    let mut total = 0.0;
    for (index, (&t, &b)) in target.probs().iter().zip(base.probs()).enumerate() {
        if b <= 0.0 {
            return Err(EquilibriumError::NonPositiveBase { index, value: b });
        }
        let sb = b.sqrt();
        let d = t.sqrt() - sb;
        total += d * d / sb;
    }
    Ok(total)
}

/// Gap vectors and the derived instance constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceConstants {
    /// `v 1 - A y_star`; zero on the row support.
    pub delta: Vec<f64>,
    /// `A^T x_star - v 1`; zero on the column support.
    pub delta_prime: Vec<f64>,
    /// Sum of `1 / delta(i)` off the support; `inf` (JSON `null`) when degenerate.
    pub omega: f64,
    pub omega_prime: f64,
    /// `sum_i sqrt(x_star(i)) - 1` at the returned equilibrium.
    pub gamma: f64,
    pub gamma_prime: f64,
    /// Smallest off-support gap over both players; `None` for fully mixed equilibria.
    pub delta_min: Option<f64>,
    /// `sum 1/delta(i)^2 + sum 1/delta'(j)^2` off the supports.
    pub opt: f64,
    /// Some off-support gap is at most [`DEGENERATE_GAP`].
    pub degenerate: bool,
}

pub fn instance_constants(
    a: &PayoffMatrix,
    sol: &EquilibriumSolution,
) -> Result<InstanceConstants, EquilibriumError> {
    check_len("x_star", a.rows(), sol.x_star.len())?;
    check_len("y_star", a.cols(), sol.y_star.len())?;
    let v = sol.value;

    let mut delta: Vec<f64> = a.mul_vec(sol.y_star.probs()).iter().map(|r| v - r).collect();
    let mut delta_prime: Vec<f64> = a
        .tr_mul_vec(sol.x_star.probs())
        .iter()
        .map(|c| c - v)
        .collect();
    let row = side_constants("row", &mut delta, &sol.support_i)?;
    let col = side_constants("column", &mut delta_prime, &sol.support_j)?;

    let gamma = |s: &MixedStrategy| s.probs().iter().map(|p| p.sqrt()).sum::<f64>() - 1.0;
    let delta_min = match (row.min_gap, col.min_gap) {
        (Some(r), Some(c)) => Some(r.min(c)),
        (r, c) => r.or(c),
    };
    let degenerate = row.degenerate || col.degenerate;

    Ok(InstanceConstants {
        delta,
        delta_prime,
        omega: row.omega,
        omega_prime: col.omega,
        gamma: gamma(&sol.x_star).max(0.0),
        gamma_prime: gamma(&sol.y_star).max(0.0),
        delta_min,
        opt: if degenerate {
            f64::INFINITY
        } else {
            row.inverse_square_sum + col.inverse_square_sum
        },
        degenerate,
    })
}

struct SideConstants {
    omega: f64,
    inverse_square_sum: f64,
    min_gap: Option<f64>,
    degenerate: bool,
}

fn side_constants(
    side: &'static str,
    gaps: &mut [f64],
    support: &[usize],
) -> Result<SideConstants, EquilibriumError> {
    let mut out = SideConstants {
        omega: 0.0,
        inverse_square_sum: 0.0,
        min_gap: None,
        degenerate: false,
    };
    for (index, gap) in gaps.iter_mut().enumerate() {
        if support.contains(&index) {
            *gap = 0.0;
            continue;
        }
        if *gap < -NE_VIOLATION {
            return Err(EquilibriumError::NotAnEquilibrium {
                side,
                index,
                gap: *gap,
            });
        }
        if *gap <= DEGENERATE_GAP {
            out.degenerate = true;
        } else {
            out.omega += 1.0 / *gap;
            out.inverse_square_sum += 1.0 / (*gap * *gap);
        }
        out.min_gap = Some(out.min_gap.map_or(*gap, |m: f64| m.min(*gap)));
    }
    if out.degenerate {
        out.omega = f64::INFINITY;
    }
    Ok(out)
}

/// Equilibrium plus instance constants, serialized for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameAnalysis {
    #[serde(flatten)]
    pub solution: EquilibriumSolution,
    #[serde(flatten)]
    pub constants: InstanceConstants,
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<(), EquilibriumError> {
    if expected == found {
        Ok(())
    } else {
        Err(EquilibriumError::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}
