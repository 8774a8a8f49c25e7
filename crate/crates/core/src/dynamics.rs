//! Self-play under bandit feedback and the metrics computed from a run.
//!
//! Each round both learners publish a mixed strategy, actions are drawn
//! independently, nature draws `r_t` in `{-1, +1}` with mean `A(i_t, j_t)`,
//! and the row player observes loss `1 - r_t` while the column player observes
//! `1 + r_t`. Neither learner ever sees the opponent.
//!
//! A run keeps only streaming aggregates: the expected payoff profiles
//! `sum_t A y_t` and `sum_t A^T x_t` (exact conditional expectations given the
//! recorded mixed strategies), realized action counts, strategy sums and the
//! iterates at rounds `1, 2, 4, ...` plus the final round.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equilibrium::{
    bregman_half_tsallis, duality_gap_raw, EquilibriumError, EquilibriumSolution,
};
use crate::game::{sample_index, sample_outcome_unchecked, MixedStrategy, PayoffMatrix, RngStream};
use crate::learners::{Learner, LearnerError};

/// Longest horizon for which the full trajectory may be stored.
pub const MAX_TRAJECTORY_ROUNDS: u64 = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("horizon must be at least one round")]
    EmptyHorizon,
    #[error("{side} learner has {found} actions but the matrix needs {expected}")]
    DimensionMismatch {
        side: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{side} learner failed in round {round}: {source}")]
    Learner {
        side: &'static str,
        round: u64,
        #[source]
        source: LearnerError,
    },
    #[error("trajectory recording is capped at {MAX_TRAJECTORY_ROUNDS} rounds, got {0}")]
    TrajectoryTooLong(u64),
    #[error("need at least one trial")]
    NoTrials,
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelfPlayOptions {
    /// Store every round (debug; horizon at most [`MAX_TRAJECTORY_ROUNDS`]).
    pub record_trajectory: bool,
    /// Give the column player its own outcome sample with the same mean
    /// instead of sharing `r_t` with the row player.
    pub independent_outcomes: bool,
}

/// Iterates at one checkpoint round `t`, with the leaders of play up to and
/// including round `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub t: u64,
    pub x: MixedStrategy,
    pub y: MixedStrategy,
    /// Most frequently realized `(row, column)` actions so far.
    pub realized_leader: (usize, usize),
    /// Actions with the largest accumulated mixed-strategy mass so far.
    pub mixed_leader: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStep {
    pub t: u64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub row_action: usize,
    pub col_action: usize,
    pub row_outcome: f64,
    pub col_outcome: f64,
}

/// Streaming summary of one self-play run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub horizon: u64,
    pub seed: u64,
    pub stream: u64,
    /// `sum_t (A y_t)(i)`.
    pub row_loss_profile: Vec<f64>,
    /// `sum_t (A^T x_t)(j)`.
    pub col_loss_profile: Vec<f64>,
    /// `sum_t x_t^T A y_t`.
    pub expected_payoff_sum: f64,
    pub realized_row_counts: Vec<u64>,
    pub realized_col_counts: Vec<u64>,
    pub avg_x: MixedStrategy,
    pub avg_y: MixedStrategy,
    pub checkpoints: Vec<Checkpoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<TrajectoryStep>>,
}

/// Rounds at which iterates are kept: powers of two up to `horizon`, plus
/// `horizon` itself.
pub fn checkpoint_rounds(horizon: u64) -> Vec<u64> {
    let mut rounds: Vec<u64> = std::iter::successors(Some(1u64), |t| t.checked_mul(2))
        .take_while(|&t| t <= horizon)
        .collect();
    if rounds.last() != Some(&horizon) && horizon > 0 {
        rounds.push(horizon);
    }
    rounds
}

/// Plays `horizon` rounds of `row` against `col` on `a`.
pub fn run_selfplay<R: Learner + ?Sized, C: Learner + ?Sized>(
    a: &PayoffMatrix,
    row: &mut R,
    col: &mut C,
    horizon: u64,
    mut rng: RngStream,
    options: SelfPlayOptions,
) -> Result<TrialRecord, DynamicsError> {
    if horizon == 0 {
        return Err(DynamicsError::EmptyHorizon);
    }
    let (m, n) = (a.rows(), a.cols());
    if row.num_actions() != m {
        return Err(DynamicsError::DimensionMismatch {
            side: "row",
            expected: m,
            found: row.num_actions(),
        });
    }
    if col.num_actions() != n {
        return Err(DynamicsError::DimensionMismatch {
            side: "column",
            expected: n,
            found: col.num_actions(),
        });
    }
    if options.record_trajectory && horizon > MAX_TRAJECTORY_ROUNDS {
        return Err(DynamicsError::TrajectoryTooLong(horizon));
    }

    let mut row_profile = vec![0.0; m];
    let mut col_profile = vec![0.0; n];
    let mut sum_x = vec![0.0; m];
    let mut sum_y = vec![0.0; n];
    let mut row_counts = vec![0u64; m];
    let mut col_counts = vec![0u64; n];
    let mut payoff_sum = 0.0;
    let mut ay = vec![0.0; m];
    let mut atx = vec![0.0; n];

    let checkpoint_at = checkpoint_rounds(horizon);
    let mut next_checkpoint = 0;
    let mut checkpoints = Vec::with_capacity(checkpoint_at.len());
    let mut trajectory = options
        .record_trajectory
        .then(|| Vec::with_capacity(horizon as usize));

    for t in 1..=horizon {
        let x = row.strategy().map_err(|source| DynamicsError::Learner {
            side: "row",
            round: t,
            source,
        })?;
        let y = col.strategy().map_err(|source| DynamicsError::Learner {
            side: "column",
            round: t,
            source,
        })?;
        let (xs, ys) = (x.probs(), y.probs());

        a.mul_vec_into(ys, &mut ay);
        a.tr_mul_vec_into(xs, &mut atx);
        payoff_sum += xs.iter().zip(&ay).map(|(p, v)| p * v).sum::<f64>();
        row_profile.iter_mut().zip(&ay).for_each(|(s, v)| *s += v);
        col_profile.iter_mut().zip(&atx).for_each(|(s, v)| *s += v);
        sum_x.iter_mut().zip(xs).for_each(|(s, v)| *s += v);
        sum_y.iter_mut().zip(ys).for_each(|(s, v)| *s += v);

        let i = sample_index(xs, &mut rng);
        let j = sample_index(ys, &mut rng);
        let mean = a.get(i, j);
        let r = sample_outcome_unchecked(mean, &mut rng);
        let r_col = if options.independent_outcomes {
            sample_outcome_unchecked(mean, &mut rng)
        } else {
            r
        };
        row_counts[i] += 1;
        col_counts[j] += 1;

        let at_checkpoint = checkpoint_at.get(next_checkpoint) == Some(&t);
        if at_checkpoint || trajectory.is_some() {
            let (x, y) = (x.clone(), y.clone());
            if let Some(steps) = trajectory.as_mut() {
                steps.push(TrajectoryStep {
                    t,
                    x: x.probs().to_vec(),
                    y: y.probs().to_vec(),
                    row_action: i,
                    col_action: j,
                    row_outcome: r,
                    col_outcome: r_col,
                });
            }
            if at_checkpoint {
                checkpoints.push(Checkpoint {
                    t,
                    x,
                    y,
                    realized_leader: (argmax(&row_counts), argmax(&col_counts)),
                    mixed_leader: (argmax(&sum_x), argmax(&sum_y)),
                });
                next_checkpoint += 1;
            }
        }

        row.update(i, 1.0 - r).map_err(|source| DynamicsError::Learner {
            side: "row",
            round: t,
            source,
        })?;
        col.update(j, 1.0 + r_col)
            .map_err(|source| DynamicsError::Learner {
                side: "column",
                round: t,
                source,
            })?;
    }

    Ok(TrialRecord {
        horizon,
        seed: rng.seed(),
        stream: rng.stream(),
        row_loss_profile: row_profile,
        col_loss_profile: col_profile,
        expected_payoff_sum: payoff_sum,
        realized_row_counts: row_counts,
        realized_col_counts: col_counts,
        avg_x: average(sum_x),
        avg_y: average(sum_y),
        checkpoints,
        trajectory,
    })
}

fn average(sum: Vec<f64>) -> MixedStrategy {
    let total: f64 = sum.iter().sum();
    MixedStrategy::from_normalized(sum.into_iter().map(|s| s / total).collect())
}

/// Index of the largest element, lowest index on ties.
pub fn argmax<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Pseudo-regret of both players over one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegretSummary {
    pub reg_row: f64,
    pub reg_col: f64,
    /// `(reg_row + reg_col) / T`, the duality gap of the average iterates.
    pub dgap_avg: f64,
}

impl RegretSummary {
    pub fn total(&self) -> f64 {
        self.reg_row + self.reg_col
    }
}

/// Regret against the best fixed action in hindsight, evaluated on the
/// recorded mixed strategies (the best fixed mixed strategy is a vertex).
pub fn pseudo_regret(record: &TrialRecord, a: &PayoffMatrix) -> Result<RegretSummary, DynamicsError> {
    if record.row_loss_profile.len() != a.rows() {
        return Err(DynamicsError::DimensionMismatch {
            side: "row",
            expected: a.rows(),
            found: record.row_loss_profile.len(),
        });
    }
    if record.col_loss_profile.len() != a.cols() {
        return Err(DynamicsError::DimensionMismatch {
            side: "column",
            expected: a.cols(),
            found: record.col_loss_profile.len(),
        });
    }
    let best_row = record
        .row_loss_profile
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let best_col = record
        .col_loss_profile
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let reg_row = best_row - record.expected_payoff_sum;
    let reg_col = record.expected_payoff_sum - best_col;
    Ok(RegretSummary {
        reg_row,
        reg_col,
        dgap_avg: (reg_row + reg_col) / record.horizon as f64,
    })
}

/// Distance of the last iterate from the equilibrium at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IteratePoint {
    pub t: u64,
    /// `D(x_star, x_t) + D(y_star, y_t)`; `None` when an iterate has a zero
    /// coordinate and the divergence is undefined.
    pub bregman_sum: Option<f64>,
    pub dgap: f64,
}

pub fn last_iterate_metrics(
    record: &TrialRecord,
    sol: &EquilibriumSolution,
    a: &PayoffMatrix,
) -> Result<Vec<IteratePoint>, DynamicsError> {
    record
        .checkpoints
        .iter()
        .map(|cp| {
            let bregman = match (
                bregman_half_tsallis(&sol.x_star, &cp.x),
                bregman_half_tsallis(&sol.y_star, &cp.y),
            ) {
                (Ok(dx), Ok(dy)) => Some(dx + dy),
                (Err(EquilibriumError::NonPositiveBase { .. }), _)
                | (_, Err(EquilibriumError::NonPositiveBase { .. })) => None,
                (Err(e), _) | (_, Err(e)) => return Err(e.into()),
            };
            if cp.x.len() != a.rows() || cp.y.len() != a.cols() {
                return Err(DynamicsError::DimensionMismatch {
                    side: "checkpoint",
                    expected: a.rows(),
                    found: cp.x.len(),
                });
            }
            Ok(IteratePoint {
                t: cp.t,
                bregman_sum: bregman,
                dgap: duality_gap_raw(a, cp.x.probs(), cp.y.probs()),
            })
        })
        .collect()
}

/// Most frequently played row and column over the whole run.
pub fn identify_psne(record: &TrialRecord) -> (usize, usize) {
    (
        argmax(&record.realized_row_counts),
        argmax(&record.realized_col_counts),
    )
}

/// Like [`identify_psne`] but on accumulated mixed-strategy mass.
pub fn identify_psne_mixed(record: &TrialRecord) -> (usize, usize) {
    (argmax(record.avg_x.probs()), argmax(record.avg_y.probs()))
}

/// Per-side plurality vote; lowest index wins ties.
pub fn majority_vote(votes: &[(usize, usize)]) -> Option<(usize, usize)> {
    if votes.is_empty() {
        return None;
    }
    let tally = |pick: fn(&(usize, usize)) -> usize| {
        let size = votes.iter().map(pick).max().unwrap_or(0) + 1;
        let mut counts = vec![0usize; size];
        votes.iter().for_each(|v| counts[pick(v)] += 1);
        argmax(&counts)
    };
    Some((tally(|v| v.0), tally(|v| v.1)))
}

/// Runs `count` independent jobs in parallel on the current rayon pool. Job
/// `k` receives its index; results come back in index order, so anything
/// computed from them is independent of scheduling.
pub fn run_indexed<T, F>(count: u64, job: F) -> Result<Vec<T>, DynamicsError>
where
    T: Send,
    F: Fn(u64) -> Result<T, DynamicsError> + Sync + Send,
{
    (0..count).into_par_iter().map(job).collect()
}

/// Runs `trials` independent self-play runs, trial `k` on stream
/// `(master_seed, k)`, and returns the plurality of their PSNE guesses.
pub fn boosted_identify<R, C, F>(
    a: &PayoffMatrix,
    factory: F,
    horizon: u64,
    trials: u64,
    master_seed: u64,
) -> Result<(usize, usize), DynamicsError>
where
    R: Learner,
    C: Learner,
    F: Fn() -> (R, C) + Sync + Send,
{
    if trials == 0 {
        return Err(DynamicsError::NoTrials);
    }
    let votes = run_indexed(trials, |k| {
        let (mut row, mut col) = factory();
        let record = run_selfplay(
            a,
            &mut row,
            &mut col,
            horizon,
            RngStream::with_stream(master_seed, k),
            SelfPlayOptions::default(),
        )?;
        Ok(identify_psne(&record))
    })?;
    Ok(majority_vote(&votes).expect("at least one vote"))
}
