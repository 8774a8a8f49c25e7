use serde::{Deserialize, Serialize};

use super::EquilibriumError;
use crate::game::PayoffMatrix;

/// `[[0, 3 eps], [1 - eps, 2 eps]]` for `0 < eps < 1/3`; its unique
/// equilibrium is `x = (1 - 3 eps, 3 eps)`, `y = (eps, 1 - eps)`.
pub fn gen_example_2x2(epsilon: f64) -> Result<PayoffMatrix, EquilibriumError> {
    if !(epsilon > 0.0 && epsilon < 1.0 / 3.0) {
        return Err(EquilibriumError::InvalidParameter(format!(
            "epsilon must lie in (0, 1/3), got {epsilon}"
        )));
    }
    Ok(PayoffMatrix::new(vec![
        vec![0.0, 3.0 * epsilon],
        vec![1.0 - epsilon, 2.0 * epsilon],
    ])?)
}

/// Hard PSNE-identification instance with the unique PSNE at `(0, 0)`.
///
/// Row 0 is `(0, 2 d_min, 2 d_1, ..., 2 d_1)`, column 0 is its negation, and
/// the remaining `(m-1) x (n-1)` block is 0 on the diagonal, +1 above it and
/// -1 below it. Row gaps are `2 d_min` for row 1 and `2 d_1` beyond; column
/// gaps likewise.
pub fn gen_hard_psne_instance(
    m: usize,
    n: usize,
    d_min: f64,
    d_1: f64,
) -> Result<PayoffMatrix, EquilibriumError> {
    let mut problems = Vec::new();
    if m < 3 || n < 3 {
        problems.push(format!("need m, n >= 3, got {m} x {n}"));
    }
    if !(d_min > 0.0 && d_min.is_finite()) {
        problems.push(format!("d_min must be positive, got {d_min}"));
    }
    if !(d_1 > 0.0 && 2.0 * d_1 <= 1.0) {
        problems.push(format!("d_1 must satisfy 0 < 2 d_1 <= 1, got {d_1}"));
    }
    if d_min > d_1 {
        problems.push(format!("d_min ({d_min}) must not exceed d_1 ({d_1})"));
    }
    if !problems.is_empty() {
        return Err(EquilibriumError::InvalidParameter(problems.join("; ")));
    }
    Ok(PayoffMatrix::from_fn(m, n, |i, j| match (i, j) {
        (0, 0) => 0.0,
        (0, 1) => 2.0 * d_min,
        (1, 0) => -2.0 * d_min,
        (0, _) => 2.0 * d_1,
        (_, 0) => -2.0 * d_1,
        _ if i == j => 0.0,
        _ if j > i => 1.0,
        _ => -1.0,
    })?)
}

/// `A = 1_m delta'^T - delta 1_n^T`, i.e. `A(i, j) = delta'(j) - delta(i)`.
/// Gaps must lie in `[0, 1/4]` and each vector needs a zero coordinate; the
/// zero coordinates form a PSNE.
pub fn gen_lower_bound_instance(
    delta: &[f64],
    delta_prime: &[f64],
) -> Result<PayoffMatrix, EquilibriumError> {
    let check = |name: &str, v: &[f64]| -> Result<(), EquilibriumError> {
        if v.is_empty() {
            return Err(EquilibriumError::InvalidParameter(format!("{name} is empty")));
        }
        if let Some((i, g)) = v.iter().enumerate().find(|(_, g)| !(0.0..=0.25).contains(*g)) {
            return Err(EquilibriumError::InvalidParameter(format!(
                "{name}[{i}] = {g} outside [0, 1/4]"
            )));
        }
        if !v.contains(&0.0) {
            return Err(EquilibriumError::InvalidParameter(format!(
                "{name} needs a zero coordinate"
            )));
        }
        Ok(())
    };
    check("delta", delta)?;
    check("delta_prime", delta_prime)?;
    Ok(PayoffMatrix::from_fn(delta.len(), delta_prime.len(), |i, j| {
        delta_prime[j] - delta[i]
    })?)
}

/// A named instance: a generator with its parameters, or an explicit matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "lowercase")]
pub enum InstanceSpec {
    Example2x2 {
        epsilon: f64,
    },
    HardPsne {
        m: usize,
        n: usize,
        d_min: f64,
        d_1: f64,
    },
    LowerBound {
        delta: Vec<f64>,
        delta_prime: Vec<f64>,
    },
    Matrix {
        entries: PayoffMatrix,
    },
}

impl InstanceSpec {
    pub fn build(&self) -> Result<PayoffMatrix, EquilibriumError> {
        match self {
            InstanceSpec::Example2x2 { epsilon } => gen_example_2x2(*epsilon),
            InstanceSpec::HardPsne { m, n, d_min, d_1 } => {
                gen_hard_psne_instance(*m, *n, *d_min, *d_1)
            }
            InstanceSpec::LowerBound { delta, delta_prime } => {
                gen_lower_bound_instance(delta, delta_prime)
            }
            InstanceSpec::Matrix { entries } => Ok(entries.clone()),
        }
    }
}
