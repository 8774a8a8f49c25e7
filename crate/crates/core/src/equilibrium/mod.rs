//! Exact analysis of a zero-sum matrix game: Nash equilibrium, duality gap,
//! 1/2-Tsallis Bregman divergence, instance-dependent constants and the
//! instance generators used by the experiments.

mod analysis;
mod generators;
mod simplex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{GameError, MixedStrategy, PayoffMatrix};

pub use analysis::{
    bregman_half_tsallis, duality_gap, duality_gap_raw, instance_constants, GameAnalysis,
    InstanceConstants, DEGENERATE_GAP,
};
pub use generators::{
    gen_example_2x2, gen_hard_psne_instance, gen_lower_bound_instance, InstanceSpec,
};

/// `x(i) > SUPPORT_THRESHOLD` puts action `i` in the support.
pub const SUPPORT_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquilibriumError {
    #[error("dimension mismatch: {what} has length {found}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("base strategy coordinate {index} is {value}; divergence undefined")]
    NonPositiveBase { index: usize, value: f64 },
    #[error("simplex exceeded {pivots} pivots")]
    PivotLimit { pivots: usize },
    #[error("game LP reported unbounded; payoff shift is broken")]
    Unbounded,
    #[error("not an equilibrium: gap {gap:e} at {side} action {index}")]
    NotAnEquilibrium {
        side: &'static str,
        index: usize,
        gap: f64,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// A Nash equilibrium `(x_star, y_star)` with its value and supports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSolution {
    pub x_star: MixedStrategy,
    pub y_star: MixedStrategy,
    pub value: f64,
    pub support_i: Vec<usize>,
    pub support_j: Vec<usize>,
    pub is_pure: bool,
}

impl EquilibriumSolution {
    /// Wraps a known equilibrium pair; supports use [`SUPPORT_THRESHOLD`].
    pub fn from_strategies(a: &PayoffMatrix, x_star: MixedStrategy, y_star: MixedStrategy) -> Self {
        let value = a.bilinear(x_star.probs(), y_star.probs());
        let support = |s: &MixedStrategy| -> Vec<usize> {
            s.probs()
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > SUPPORT_THRESHOLD)
                .map(|(i, _)| i)
                .collect()
        };
        let support_i = support(&x_star);
        let support_j = support(&y_star);
        let is_pure = support_i.len() == 1 && support_j.len() == 1;
        Self {
            x_star,
            y_star,
            value,
            support_i,
            support_j,
            is_pure,
        }
    }

    /// The PSNE as `(row, column)` when the equilibrium is pure.
    pub fn pure_pair(&self) -> Option<(usize, usize)> {
        self.is_pure.then(|| (self.support_i[0], self.support_j[0]))
    }
}

/// Solves the game by linear programming; see [`simplex`] for the method.
pub fn solve_ne(a: &PayoffMatrix) -> Result<EquilibriumSolution, EquilibriumError> {
    let lp = simplex::solve_game_lp(a)?;
    let x = MixedStrategy::new(lp.x)?;
    let y = MixedStrategy::new(lp.y)?;
    Ok(EquilibriumSolution::from_strategies(a, x, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rps() -> PayoffMatrix {
        PayoffMatrix::new(vec![
            vec![0.0, -1.0, 1.0],
            vec![1.0, 0.0, -1.0],
            vec![-1.0, 1.0, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn rock_paper_scissors_is_uniform() {
        let sol = solve_ne(&rps()).unwrap();
        for p in sol.x_star.probs().iter().chain(sol.y_star.probs()) {
            assert!((p - 1.0 / 3.0).abs() < 1e-10);
        }
        assert!(sol.value.abs() < 1e-10);
        assert!(!sol.is_pure);
        assert_eq!(sol.support_i, vec![0, 1, 2]);
    }

    #[test]
    fn two_by_two_example_equilibrium() {
        let a = gen_example_2x2(0.1).unwrap();
        let sol = solve_ne(&a).unwrap();
        let x = sol.x_star.probs();
        let y = sol.y_star.probs();
        assert!((x[0] - 0.7).abs() < 1e-10 && (x[1] - 0.3).abs() < 1e-10, "{x:?}");
        assert!((y[0] - 0.1).abs() < 1e-10 && (y[1] - 0.9).abs() < 1e-10, "{y:?}");
        // v = x^T A y = 0.7 * 0.27 + 0.3 * (0.09 + 0.18)
        assert!((sol.value - 0.27).abs() < 1e-10);
        assert!(duality_gap(&a, &sol.x_star, &sol.y_star).unwrap() <= 1e-8);
    }

    #[test]
    fn zero_game_has_zero_value() {
        let a = PayoffMatrix::zeros(2, 2).unwrap();
        let sol = solve_ne(&a).unwrap();
        assert_eq!(sol.value, 0.0);
        assert!(duality_gap(&a, &sol.x_star, &sol.y_star).unwrap() <= 1e-12);
    }

    #[test]
    fn single_entry_game() {
        let a = PayoffMatrix::new(vec![vec![-0.4]]).unwrap();
        let sol = solve_ne(&a).unwrap();
        assert!((sol.value + 0.4).abs() < 1e-12);
        assert_eq!(sol.pure_pair(), Some((0, 0)));
    }

    #[test]
    fn hard_instance_has_top_left_psne() {
        let a = gen_hard_psne_instance(6, 5, 0.05, 0.1).unwrap();
        let sol = solve_ne(&a).unwrap();
        assert_eq!(sol.pure_pair(), Some((0, 0)));
        assert!(sol.value.abs() < 1e-10);
    }

    #[test]
    fn minimax_holds_on_rectangular_games() {
        let a = PayoffMatrix::new(vec![
            vec![0.3, -0.7, 0.1, 0.9],
            vec![-0.2, 0.4, -0.5, 0.0],
            vec![0.8, -0.1, 0.2, -0.6],
        ])
        .unwrap();
        let sol = solve_ne(&a).unwrap();
        let ay = a.mul_vec(sol.y_star.probs());
        let atx = a.tr_mul_vec(sol.x_star.probs());
        let max_row = ay.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min_col = atx.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((max_row - sol.value).abs() < 1e-8);
        assert!((min_col - sol.value).abs() < 1e-8);
    }
}
