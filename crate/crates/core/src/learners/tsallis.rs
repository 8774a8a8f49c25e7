use super::{check_feedback, ftrl::ftrl_solve_into, Learner, LearnerError, MIN_PLAYED_PROBABILITY};
use crate::game::MixedStrategy;

/// 1/2-Tsallis-INF: FTRL with the 1/2-Tsallis regularizer, learning rate
/// `eta_t = 1 / (2 sqrt(t))` and importance-weighted loss estimates.
///
/// Cumulative losses are kept in unshifted form: the estimator
/// `1[i_t = i] loss / x_t(i) - 1` differs from the stored increment by the
/// constant `-1` on every coordinate, which leaves the FTRL solution unchanged.
#[derive(Debug, Clone)]
pub struct TsallisInf {
    cum_loss: Vec<f64>,
    round: u64,
    last_strategy: MixedStrategy,
    fresh: bool,
}

impl TsallisInf {
    pub fn new(actions: usize) -> Self {
        assert!(actions > 0, "Tsallis-INF needs at least one action");
        Self {
            cum_loss: vec![0.0; actions],
            round: 1,
            last_strategy: MixedStrategy::uniform(actions),
            fresh: false,
        }
    }

    /// Resumes from a given cumulative loss vector at round `round >= 1`.
    pub fn from_state(cum_loss: Vec<f64>, round: u64) -> Result<Self, LearnerError> {
        if cum_loss.is_empty() {
            return Err(LearnerError::NoActions);
        }
        if let Some(index) = cum_loss.iter().position(|l| !l.is_finite()) {
            return Err(LearnerError::NonFinite { index });
        }
        assert!(round >= 1, "rounds are numbered from 1");
        let actions = cum_loss.len();
        Ok(Self {
            cum_loss,
            round,
            last_strategy: MixedStrategy::uniform(actions),
            fresh: false,
        })
    }

    pub fn learning_rate(round: u64) -> f64 {
        0.5 / (round as f64).sqrt()
    }

    pub fn cum_loss(&self) -> &[f64] {
        &self.cum_loss
    }

    /// Most recently computed strategy.
    pub fn last_strategy(&self) -> &MixedStrategy {
        &self.last_strategy
    }
}

impl Learner for TsallisInf {
    fn num_actions(&self) -> usize {
        self.cum_loss.len()
    }

    fn round(&self) -> u64 {
        self.round
    }

    fn strategy(&mut self) -> Result<&MixedStrategy, LearnerError> {
        if !self.fresh {
            let eta = Self::learning_rate(self.round);
            ftrl_solve_into(&self.cum_loss, eta, self.last_strategy.as_mut_slice())?;
            self.fresh = true;
        }
        Ok(&self.last_strategy)
    }

    fn update(&mut self, action: usize, loss: f64) -> Result<(), LearnerError> {
        check_feedback(self.cum_loss.len(), action, loss)?;
        self.strategy()?;
        let probability = self.last_strategy[action];
        if probability < MIN_PLAYED_PROBABILITY {
            return Err(LearnerError::VanishingProbability {
                action,
                probability,
            });
        }
        self.cum_loss[action] += loss / probability;
        if !self.cum_loss[action].is_finite() {
            return Err(LearnerError::NonFinite { index: action });
        }
        self.round += 1;
        self.fresh = false;
        Ok(())
    }
}
