//! Independent reference implementations and randomized checks shared by the
//! integration tests and the acceptance harness.

#![allow(dead_code)]

use banditgame::equilibrium::{duality_gap_raw, solve_ne};
use banditgame::game::{PayoffMatrix, RngStream};
use banditgame::learners::ftrl_solve;

pub fn uniform_in(rng: &mut RngStream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.uniform()
}

pub fn random_simplex(rng: &mut RngStream, len: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| -rng.uniform().max(1e-300).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

pub fn random_matrix(rng: &mut RngStream, m: usize, n: usize) -> PayoffMatrix {
    let rows = (0..m)
        .map(|_| (0..n).map(|_| uniform_in(rng, -1.0, 1.0)).collect())
        .collect();
    PayoffMatrix::new(rows).unwrap()
}

/// FTRL minimizer by plain bisection on `mu = lambda + min L` over
/// `[1/eta, sqrt(m)/eta]`, run until the bracket stops shrinking.
pub fn ftrl_bisection_oracle(cum_loss: &[f64], eta: f64) -> Vec<f64> {
    let m = cum_loss.len() as f64;
    let min = cum_loss.iter().copied().fold(f64::INFINITY, f64::min);
    let mass = |mu: f64| -> f64 {
        cum_loss
            .iter()
            .map(|l| 1.0 / (eta * (l - min + mu)).powi(2))
            .sum()
    };
    let (mut lo, mut hi) = (1.0 / eta, m.sqrt() / eta);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mass(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = 0.5 * (lo + hi);
    let x: Vec<f64> = cum_loss
        .iter()
        .map(|l| 1.0 / (eta * (l - min + mu)).powi(2))
        .collect();
    let total: f64 = x.iter().sum();
    x.into_iter().map(|v| v / total).collect()
}

/// Largest coordinate difference between `ftrl_solve` and the oracle on one
/// random case with `m` in `2..=10`.
pub fn ftrl_oracle_case(rng: &mut RngStream) -> f64 {
    let m = 2 + (rng.next_u64() % 9) as usize;
    let scale = 10f64.powf(uniform_in(rng, -1.0, 4.0));
    let cum_loss: Vec<f64> = (0..m).map(|_| uniform_in(rng, 0.0, scale)).collect();
    let eta = 10f64.powf(uniform_in(rng, -3.0, 0.0));
    let ours = ftrl_solve(&cum_loss, eta).unwrap();
    let oracle = ftrl_bisection_oracle(&cum_loss, eta);
    ours.probs()
        .iter()
        .zip(&oracle)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Solves `M z = rhs` by Gaussian elimination with partial pivoting.
fn solve_linear(mut mat: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let k = rhs.len();
    for col in 0..k {
        let pivot = (col..k).max_by(|&a, &b| mat[a][col].abs().total_cmp(&mat[b][col].abs()))?;
        if mat[pivot][col].abs() < 1e-12 {
            return None;
        }
        mat.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..k {
            let f = mat[row][col] / mat[col][col];
            for c in col..k {
                mat[row][c] -= f * mat[col][c];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut z = vec![0.0; k];
    for row in (0..k).rev() {
        let s: f64 = (row + 1..k).map(|c| mat[row][c] * z[c]).sum();
        z[row] = (rhs[row] - s) / mat[row][row];
    }
    Some(z)
}

fn subsets(len: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << len))
        .map(|mask| (0..len).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

/// Mixed strategy on `support` (length `len`) making every payoff in
/// `targets` equal, with the common payoff. `payoff(t, s)` is the payoff of
/// target `t` against support action `s`.
fn equalizer(
    len: usize,
    support: &[usize],
    targets: &[usize],
    payoff: impl Fn(usize, usize) -> f64,
) -> Option<(Vec<f64>, f64)> {
    let k = support.len();
    let mut mat = Vec::new();
    let mut rhs = Vec::new();
    for &t in targets {
        let mut row: Vec<f64> = support.iter().map(|&s| payoff(t, s)).collect();
        row.push(-1.0);
        mat.push(row);
        rhs.push(0.0);
    }
    let mut ones = vec![1.0; k];
    ones.push(0.0);
    mat.push(ones);
    rhs.push(1.0);
    let z = solve_linear(mat, rhs)?;
    let mut full = vec![0.0; len];
    for (p, &s) in z[..k].iter().zip(support) {
        if *p < -1e-12 {
            return None;
        }
        full[s] = p.max(0.0);
    }
    Some((full, z[k]))
}

/// Equilibrium of a small nondegenerate game by enumerating equal-size
/// support pairs and checking best responses.
pub fn support_enumeration(a: &PayoffMatrix) -> Option<(Vec<f64>, Vec<f64>, f64)> {
    let (m, n) = (a.rows(), a.cols());
    let tol = 1e-10;
    for rows in subsets(m) {
        for cols in subsets(n).into_iter().filter(|c| c.len() == rows.len()) {
            let Some((y, v)) = equalizer(n, &cols, &rows, |i, j| a.get(i, j)) else {
                continue;
            };
            let Some((x, w)) = equalizer(m, &rows, &cols, |j, i| a.get(i, j)) else {
                continue;
            };
            let ay = a.mul_vec(&y);
            let atx = a.tr_mul_vec(&x);
            let row_ok = ay.iter().all(|&p| p <= v + tol);
            let col_ok = atx.iter().all(|&q| q >= w - tol);
            if row_ok && col_ok && (v - w).abs() < 1e-9 {
                return Some((x, y, v));
            }
        }
    }
    None
}

/// `(value error, duality gap of the solver's pair)` on one random 3x3 game.
pub fn ne_oracle_case(rng: &mut RngStream) -> (f64, f64) {
    let a = random_matrix(rng, 3, 3);
    let (_, _, v) = support_enumeration(&a).expect("random games are nondegenerate");
    let sol = solve_ne(&a).unwrap();
    let gap = duality_gap_raw(&a, sol.x_star.probs(), sol.y_star.probs());
    ((sol.value - v).abs(), gap)
}

/// `a <= b + sqrt(a c)` with `a, c > 0` implies `a <= 2 b + c`. Returns
/// `None` when the premise fails.
pub fn lemma_sqrt_bound(a: f64, b: f64, c: f64) -> Option<bool> {
    if !(a > 0.0 && c > 0.0) || a > b + (a * c).sqrt() {
        return None;
    }
    let slack = 1e-12 * (a.abs() + b.abs() + c.abs());
    Some(a <= 2.0 * b + c + slack)
}

pub fn lemma_sqrt_bound_case(rng: &mut RngStream) -> bool {
    let a = 10f64.powf(uniform_in(rng, -3.0, 3.0));
    let c = 10f64.powf(uniform_in(rng, -3.0, 3.0));
    let tight = a - (a * c).sqrt();
    let b = if rng.uniform() < 0.2 {
        tight
    } else {
        tight + uniform_in(rng, 0.0, 2.0) * a.max(c)
    };
    // Rounding can break the premise by an ulp; nudge b up in that case.
    let b = if a > b + (a * c).sqrt() { b + 1e-12 * a } else { b };
    lemma_sqrt_bound(a, b, c).unwrap_or(false)
}

/// Both sides of `sum z_t / sqrt t <= min_s sqrt(a log2(T/s)) + 2 b sqrt s`.
pub fn lemma_weighted_sum(z: &[f64], a: f64, b: f64) -> (f64, f64) {
    let t_max = z.len() as f64;
    let lhs: f64 = z
        .iter()
        .enumerate()
        .map(|(t, v)| v / ((t + 1) as f64).sqrt())
        .sum();
    let rhs = (1..=z.len())
        .map(|s| (a * (t_max / s as f64).log2()).sqrt() + 2.0 * b * (s as f64).sqrt())
        .fold(f64::INFINITY, f64::min);
    (lhs, rhs)
}

pub fn lemma_weighted_sum_case(rng: &mut RngStream) -> bool {
    let len = 1 + (rng.next_u64() % 400) as usize;
    let b = uniform_in(rng, 0.01, 2.0);
    let density = rng.uniform();
    let z: Vec<f64> = (0..len)
        .map(|_| {
            if rng.uniform() < density {
                uniform_in(rng, 0.0, b)
            } else {
                0.0
            }
        })
        .collect();
    let energy: f64 = z.iter().map(|v| v * v).sum();
    let a = energy * (1.0 + uniform_in(rng, 0.0, 1.0)) + 1e-12;
    let (lhs, rhs) = lemma_weighted_sum(&z, a, b);
    lhs <= rhs * (1.0 + 1e-12)
}

/// `(max x * sum x, (1/2 + sqrt(n)/2) * sum x^2)`.
pub fn lemma_ratio(x: &[f64]) -> (f64, f64) {
    let max = x.iter().copied().fold(0.0, f64::max);
    let sum: f64 = x.iter().sum();
    let squares: f64 = x.iter().map(|v| v * v).sum();
    let n = x.len() as f64;
    (max * sum, (0.5 + 0.5 * n.sqrt()) * squares)
}

pub fn lemma_ratio_case(rng: &mut RngStream) -> bool {
    let n = 2 + (rng.next_u64() % 50) as usize;
    let scale = 10f64.powf(uniform_in(rng, -3.0, 3.0));
    let x: Vec<f64> = (0..n).map(|_| scale * rng.uniform()).collect();
    let (lhs, rhs) = lemma_ratio(&x);
    lhs <= rhs * (1.0 + 1e-12)
}

/// Relative error between the two sides at the equality configuration.
pub fn lemma_ratio_equality_case(rng: &mut RngStream) -> f64 {
    let n = 2 + (rng.next_u64() % 50) as usize;
    let outlier = 10f64.powf(uniform_in(rng, -3.0, 3.0));
    let rest = outlier / ((n as f64).sqrt() + 1.0);
    let mut x = vec![rest; n];
    x[(rng.next_u64() % n as u64) as usize] = outlier;
    let (lhs, rhs) = lemma_ratio(&x);
    (lhs - rhs).abs() / rhs
}

/// `|DGap(x,y) - DGap(x',y')| - (|x - x'|_1 + |y - y'|_1)`; never positive
/// beyond rounding.
pub fn lipschitz_excess(a: &PayoffMatrix, x: &[f64], y: &[f64], xp: &[f64], yp: &[f64]) -> f64 {
    let l1 = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(p, q)| (p - q).abs()).sum::<f64>();
    let change = (duality_gap_raw(a, x, y) - duality_gap_raw(a, xp, yp)).abs();
    change - (l1(x, xp) + l1(y, yp))
}

pub fn lipschitz_case(rng: &mut RngStream) -> bool {
    let m = 1 + (rng.next_u64() % 8) as usize;
    let n = 1 + (rng.next_u64() % 8) as usize;
    let a = random_matrix(rng, m, n);
    let x = random_simplex(rng, m);
    let y = random_simplex(rng, n);
    // Mix toward another point so both large and tiny perturbations occur.
    let w = 10f64.powf(uniform_in(rng, -6.0, 0.0));
    let mix = |u: &[f64], v: Vec<f64>| -> Vec<f64> {
        u.iter().zip(v).map(|(p, q)| (1.0 - w) * p + w * q).collect()
    };
    let xp = mix(&x, random_simplex(rng, m));
    let yp = mix(&y, random_simplex(rng, n));
    lipschitz_excess(&a, &x, &y, &xp, &yp) <= 1e-12
}
