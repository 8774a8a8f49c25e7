//! Game primitives: payoff matrices, mixed strategies and the seeded random
//! stream that drives action and outcome sampling.
//!
//! # Random streams
//!
//! [`RngStream`] wraps `ChaCha8Rng` from `rand_chacha` 0.3.1 (8-round ChaCha,
//! 64-bit stream id). The key is derived from the 64-bit seed with
//! `rand_core` 0.6's `seed_from_u64` (PCG32 expansion) and the stream id selects
//! one of 2^64 non-overlapping keystreams. Trial `k` of an experiment with
//! master seed `s` always uses `(s, k)`, so results do not depend on how trials
//! are scheduled across threads. Uniform variates are built from the top 53 bits
//! of `next_u64`, which keeps sequences bit-identical across platforms.

use std::fmt;
use std::path::Path;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance on `sum(probs) - 1` for simplex membership.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("payoff matrix must have at least one row and one column")]
    EmptyMatrix,
    #[error("ragged payoff matrix: row {row} has {found} entries, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("payoff entry at ({row}, {col}) is {value}, outside [-1, 1]")]
    EntryOutOfRange { row: usize, col: usize, value: f64 },
    #[error("strategy is empty")]
    EmptyStrategy,
    #[error("strategy coordinate {index} is {value}, expected a finite nonnegative number")]
    NegativeProbability { index: usize, value: f64 },
    #[error("strategy sums to {sum}, not 1 within {SIMPLEX_TOLERANCE:e}")]
    NotNormalized { sum: f64 },
    #[error("outcome mean {0} outside [-1, 1]")]
    MeanOutOfRange(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

/// Payoff matrix `A` of a two-player zero-sum game, row-major.
///
/// `A(i, j)` is the expected reward of the row player and the expected loss of
/// the column player when the pair `(i, j)` is played.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct PayoffMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl PayoffMatrix {
    /// Validates a rectangular array of payoffs in `[-1, 1]`.
    pub fn new(entries: Vec<Vec<f64>>) -> Result<Self, GameError> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(GameError::EmptyMatrix);
        }
        let mut flat = Vec::with_capacity(rows * cols);
        for (i, row) in entries.iter().enumerate() {
            if row.len() != cols {
                return Err(GameError::Ragged {
                    row: i,
                    expected: cols,
                    found: row.len(),
                });
            }
            for (j, &value) in row.iter().enumerate() {
                if !(-1.0..=1.0).contains(&value) {
                    return Err(GameError::EntryOutOfRange { row: i, col: j, value });
                }
                flat.push(value);
            }
        }
        Ok(Self {
            rows,
            cols,
            entries: flat,
        })
    }

    /// Builds a matrix from a generator function over `(row, col)`.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        f: impl Fn(usize, usize) -> f64,
    ) -> Result<Self, GameError> {
        Self::new(
            (0..rows)
                .map(|i| (0..cols).map(|j| f(i, j)).collect())
                .collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self, GameError> {
        Self::from_fn(rows, cols, |_, _| 0.0)
    }

    /// Parses the plain-text format: a header line `m n` followed by `m`
    /// lines of `n` whitespace-separated decimals. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn parse_text(text: &str) -> Result<Self, GameError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (header_line, header) = lines.next().ok_or(GameError::Parse {
            line: 1,
            message: "missing `m n` header".into(),
        })?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        let parse_dim = |s: &str| {
            s.parse::<usize>().map_err(|_| GameError::Parse {
                line: header_line,
                message: format!("invalid dimension `{s}`"),
            })
        };
        if dims.len() != 2 {
            return Err(GameError::Parse {
                line: header_line,
                message: format!("expected `m n`, found `{header}`"),
            });
        }
        let (m, n) = (parse_dim(dims[0])?, parse_dim(dims[1])?);

        let mut rows = Vec::with_capacity(m);
        for (line_no, line) in lines {
            if rows.len() == m {
                return Err(GameError::Parse {
                    line: line_no,
                    message: format!("unexpected extra row (header declares {m} rows)"),
                });
            }
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>().map_err(|_| GameError::Parse {
                        line: line_no,
                        message: format!("invalid number `{tok}`"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != n {
                return Err(GameError::Parse {
                    line: line_no,
                    message: format!("expected {n} entries, found {}", row.len()),
                });
            }
            if let Some(value) = row.iter().find(|v| !(-1.0..=1.0).contains(*v)) {
                return Err(GameError::Parse {
                    line: line_no,
                    message: format!("entry {value} outside [-1, 1]"),
                });
            }
            rows.push(row);
        }
        if rows.len() != m {
            return Err(GameError::Parse {
                line: text.lines().count().max(1),
                message: format!("expected {m} rows, found {}", rows.len()),
            });
        }
        Self::new(rows)
    }

    pub fn load(path: &Path) -> Result<Self, GameError> {
        let text = std::fs::read_to_string(path).map_err(|e| GameError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse_text(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// `out = A y`.
    pub fn mul_vec_into(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(y).map(|(a, b)| a * b).sum();
        }
    }

    /// `out = A^T x`.
    pub fn tr_mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        out.fill(0.0);
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += xi * a;
            }
        }
    }

    pub fn mul_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.mul_vec_into(y, &mut out);
        out
    }

    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        self.tr_mul_vec_into(x, &mut out);
        out
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter()
            .enumerate()
            .map(|(i, &xi)| xi * self.row(i).iter().zip(y).map(|(a, b)| a * b).sum::<f64>())
            .sum()
    }
}

impl TryFrom<Vec<Vec<f64>>> for PayoffMatrix {
    type Error = GameError;

    fn try_from(value: Vec<Vec<f64>>) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<PayoffMatrix> for Vec<Vec<f64>> {
    fn from(value: PayoffMatrix) -> Self {
        value.to_rows()
    }
}

impl fmt::Display for PayoffMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|v| format!("{v:>8.4}")).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Probability vector over a player's actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MixedStrategy(Vec<f64>);

impl MixedStrategy {
    /// Accepts a vector whose coordinates are nonnegative and sum to one within
    /// [`SIMPLEX_TOLERANCE`]; the result is re-normalized by its sum.
    pub fn new(mut probs: Vec<f64>) -> Result<Self, GameError> {
        if probs.is_empty() {
            return Err(GameError::EmptyStrategy);
        }
        if let Some((index, &value)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(GameError::NegativeProbability { index, value });
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(GameError::NotNormalized { sum });
        }
        probs.iter_mut().for_each(|p| *p /= sum);
        Ok(Self(probs))
    }

    pub fn uniform(len: usize) -> Self {
        assert!(len > 0, "uniform strategy over zero actions");
        Self(vec![1.0 / len as f64; len])
    }

    pub fn point_mass(len: usize, index: usize) -> Self {
        assert!(index < len, "point mass index {index} out of range {len}");
        let mut probs = vec![0.0; len];
        probs[index] = 1.0;
        Self(probs)
    }

    /// Wraps a vector the caller has already normalized (e.g. a solver output
    /// that was divided by its sum).
    pub(crate) fn from_normalized(probs: Vec<f64>) -> Self {
        debug_assert!(!probs.is_empty());
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() <= SIMPLEX_TOLERANCE);
        Self(probs)
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    #[inline]
    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for MixedStrategy {
    type Error = GameError;

    fn try_from(value: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<MixedStrategy> for Vec<f64> {
    fn from(value: MixedStrategy) -> Self {
        value.0
    }
}

impl std::ops::Index<usize> for MixedStrategy {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

/// Seeded, splittable random stream (ChaCha8, see module docs).
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Child stream `stream` of `seed`. Distinct stream ids share the key but
    /// never overlap.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform variate in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Draws an index with probability `probs[i]` by inverse-CDF search.
#[inline]
pub fn sample_index(probs: &[f64], rng: &mut RngStream) -> usize {
    let u = rng.uniform();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last_positive = i;
            if u < acc {
                return i;
            }
        }
    }
    // Rounding left the cumulative sum just under `u`.
    last_positive
}

pub fn sample_action(strategy: &MixedStrategy, rng: &mut RngStream) -> usize {
    sample_index(strategy.probs(), rng)
}

/// Draws from the `{-1, +1}` Bernoulli distribution with mean `mean`:
/// `+1` with probability `(1 + mean) / 2`.
pub fn sample_outcome(mean: f64, rng: &mut RngStream) -> Result<f64, GameError> {
    if !(-1.0..=1.0).contains(&mean) {
        return Err(GameError::MeanOutOfRange(mean));
    }
    Ok(sample_outcome_unchecked(mean, rng))
}

#[inline]
pub(crate) fn sample_outcome_unchecked(mean: f64, rng: &mut RngStream) -> f64 {
    if rng.uniform() < (1.0 + mean) / 2.0 {
        1.0
    } else {
        -1.0
    }
}
