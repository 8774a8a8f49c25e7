use super::{check_feedback, Learner, LearnerError};
use crate::game::MixedStrategy;

/// Plays the same mixed strategy every round and ignores feedback.
#[derive(Debug, Clone)]
pub struct FixedStrategy {
    strategy: MixedStrategy,
    round: u64,
}

impl FixedStrategy {
    pub fn new(strategy: MixedStrategy) -> Self {
        Self { strategy, round: 1 }
    }
}

impl Learner for FixedStrategy {
    fn num_actions(&self) -> usize {
        self.strategy.len()
    }

    fn round(&self) -> u64 {
        self.round
    }

    fn strategy(&mut self) -> Result<&MixedStrategy, LearnerError> {
        Ok(&self.strategy)
    }

    fn update(&mut self, action: usize, loss: f64) -> Result<(), LearnerError> {
        check_feedback(self.strategy.len(), action, loss)?;
        self.round += 1;
        Ok(())
    }
}
