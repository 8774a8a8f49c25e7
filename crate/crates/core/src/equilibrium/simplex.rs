//! Dense tableau simplex for matrix games.
//!
//! With `B = A + 2` (all entries in `[1, 3]`) the column player's problem is
//! `max sum(w)  s.t.  B w <= 1, w >= 0`. At the optimum `y = w / sum(w)`,
//! the row player's strategy is read off the slack reduced costs (the dual
//! solution `u` of `min sum(u) s.t. B^T u >= 1`), and the game value is
//! `1 / sum(w) - 2`. Pivoting follows Bland's rule, so the method terminates
//! on degenerate problems.

use super::EquilibriumError;
use crate::game::PayoffMatrix;

const PAYOFF_SHIFT: f64 = 2.0;
const PIVOT_EPS: f64 = 1e-12;

pub(crate) struct GameLpSolution {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

pub(crate) fn solve_game_lp(a: &PayoffMatrix) -> Result<GameLpSolution, EquilibriumError> {
    let (m, n) = (a.rows(), a.cols());
    let width = n + m + 1;
    let rhs = n + m;
    // Constraint rows followed by the objective row.
    let mut tab = vec![0.0; (m + 1) * width];
    for i in 0..m {
        let row = &mut tab[i * width..(i + 1) * width];
        for (j, cell) in row.iter_mut().take(n).enumerate() {
            *cell = a.get(i, j) + PAYOFF_SHIFT;
        }
        row[n + i] = 1.0;
        row[rhs] = 1.0;
    }
    for cell in &mut tab[m * width..m * width + n] {
        *cell = -1.0;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    let max_pivots = 100 * (m + n) + 1000;
    let mut pivots = 0;
    loop {
        let objective = &tab[m * width..(m + 1) * width];
        let Some(enter) = (0..n + m).find(|&c| objective[c] < -PIVOT_EPS) else {
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..m {
            let coef = tab[r * width + enter];
            if coef > PIVOT_EPS {
                let ratio = tab[r * width + rhs] / coef;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((best, best_ratio)) => {
                        if ratio < best_ratio - PIVOT_EPS
                            || (ratio <= best_ratio + PIVOT_EPS && basis[r] < basis[best])
                        {
                            Some((r, ratio))
                        } else {
                            Some((best, best_ratio))
                        }
                    }
                };
            }
        }
        // B > 0 keeps every structural column bounded.
        let (pivot_row, _) = leave.ok_or(EquilibriumError::Unbounded)?;
        pivot(&mut tab, width, m + 1, pivot_row, enter);
        basis[pivot_row] = enter;
        pivots += 1;
        if pivots > max_pivots {
            return Err(EquilibriumError::PivotLimit { pivots });
        }
    }

    let mut w = vec![0.0; n];
    for (r, &b) in basis.iter().enumerate() {
        if b < n {
            w[b] = tab[r * width + rhs].max(0.0);
        }
    }
    let u: Vec<f64> = (0..m).map(|i| tab[m * width + n + i].max(0.0)).collect();
    Ok(GameLpSolution {
        x: normalize(u),
        y: normalize(w),
    })
}

fn pivot(tab: &mut [f64], width: usize, rows: usize, pr: usize, pc: usize) {
    let inv = 1.0 / tab[pr * width + pc];
    for cell in &mut tab[pr * width..(pr + 1) * width] {
        *cell *= inv;
    }
    tab[pr * width + pc] = 1.0;
    let pivot_row: Vec<f64> = tab[pr * width..(pr + 1) * width].to_vec();
    for r in (0..rows).filter(|&r| r != pr) {
        let factor = tab[r * width + pc];
        if factor == 0.0 {
            continue;
        }
        for (cell, p) in tab[r * width..(r + 1) * width].iter_mut().zip(&pivot_row) {
            *cell -= factor * p;
        }
        tab[r * width + pc] = 0.0;
    }
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let sum: f64 = v.iter().sum();
    v.iter_mut().for_each(|p| *p /= sum);
    v
}
