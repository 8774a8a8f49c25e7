//! Bandit learners behind a common strongly-uncoupled interface: a learner
//! only ever sees its own action and the scalar loss it observed.

mod exp3;
mod fixed;
pub mod ftrl;
mod tsallis;
mod ucb1;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::MixedStrategy;

pub use exp3::Exp3;
pub use fixed::FixedStrategy;
pub use ftrl::{ftrl_solve, ftrl_solve_into};
pub use tsallis::TsallisInf;
pub use ucb1::Ucb1;

/// Played actions below this probability indicate a corrupted learner state.
pub const MIN_PLAYED_PROBABILITY: f64 = 1e-15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnerError {
    #[error("learner needs at least one action")]
    NoActions,
    #[error("learning rate must be positive and finite, got {0}")]
    InvalidRate(f64),
    #[error("cumulative loss at index {index} is not finite")]
    NonFinite { index: usize },
    #[error("normalizer solve did not converge (last residual {residual:e})")]
    NoConvergence { residual: f64 },
    #[error("played action {action} has probability {probability:e}; state is corrupted")]
    VanishingProbability { action: usize, probability: f64 },
    #[error("action {action} out of range for {actions} actions")]
    ActionOutOfRange { action: usize, actions: usize },
    #[error("loss observation {0} outside [0, 2]")]
    LossOutOfRange(f64),
}

/// A bandit algorithm seen from one player's side.
///
/// Each round the driver calls [`Learner::strategy`] and then
/// [`Learner::update`] with the action it sampled from that strategy and the
/// observed loss in `[0, 2]` (`1 - r` for the row player, `1 + r` for the
/// column player).
pub trait Learner {
    fn num_actions(&self) -> usize;

    /// Index `t >= 1` of the round about to be played.
    fn round(&self) -> u64;

    /// Strategy for the current round. Repeated calls within a round return
    /// the cached value.
    fn strategy(&mut self) -> Result<&MixedStrategy, LearnerError>;

    fn update(&mut self, action: usize, loss: f64) -> Result<(), LearnerError>;
}

pub(crate) fn check_feedback(actions: usize, action: usize, loss: f64) -> Result<(), LearnerError> {
    if action >= actions {
        return Err(LearnerError::ActionOutOfRange { action, actions });
    }
    if !(0.0..=2.0).contains(&loss) {
        return Err(LearnerError::LossOutOfRange(loss));
    }
    Ok(())
}

/// Algorithms that can be named in configs and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LearnerKind {
    Tsallis,
    Exp3,
    Ucb1,
    /// Plays the uniform distribution every round.
    Uniform,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 4] = [
        LearnerKind::Tsallis,
        LearnerKind::Exp3,
        LearnerKind::Ucb1,
        LearnerKind::Uniform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::Tsallis => "tsallis",
            LearnerKind::Exp3 => "exp3",
            LearnerKind::Ucb1 => "ucb1",
            LearnerKind::Uniform => "uniform",
        }
    }

    pub fn build(self, actions: usize) -> AnyLearner {
        match self {
            LearnerKind::Tsallis => AnyLearner::Tsallis(TsallisInf::new(actions)),
            LearnerKind::Exp3 => AnyLearner::Exp3(Exp3::new(actions)),
            LearnerKind::Ucb1 => AnyLearner::Ucb1(Ucb1::new(actions)),
            LearnerKind::Uniform => {
                AnyLearner::Fixed(FixedStrategy::new(MixedStrategy::uniform(actions)))
            }
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LearnerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                format!("unknown algorithm `{s}` (expected one of tsallis, exp3, ucb1, uniform)")
            })
    }
}

/// Enum dispatch over the shipped learners.
#[derive(Debug, Clone)]
pub enum AnyLearner {
    Tsallis(TsallisInf),
    Exp3(Exp3),
    Ucb1(Ucb1),
    Fixed(FixedStrategy),
}

macro_rules! dispatch {
    ($self:ident, $l:ident => $e:expr) => {
        match $self {
            AnyLearner::Tsallis($l) => $e,
            AnyLearner::Exp3($l) => $e,
            AnyLearner::Ucb1($l) => $e,
            AnyLearner::Fixed($l) => $e,
        }
    };
}

impl Learner for AnyLearner {
    fn num_actions(&self) -> usize {
        dispatch!(self, l => l.num_actions())
    }

    fn round(&self) -> u64 {
        dispatch!(self, l => l.round())
    }

    fn strategy(&mut self) -> Result<&MixedStrategy, LearnerError> {
        dispatch!(self, l => l.strategy())
    }

    fn update(&mut self, action: usize, loss: f64) -> Result<(), LearnerError> {
        dispatch!(self, l => l.update(action, loss))
    }
}
