use super::{check_feedback, Learner, LearnerError};
use crate::game::MixedStrategy;

/// UCB1 on rewards remapped to `[0, 1]`.
///
/// A loss observation `l in [0, 2]` corresponds to reward `r = 1 - l` in
/// `[-1, 1]`, stored as `(r + 1) / 2 = 1 - l / 2`. The first `m` rounds pull
/// every arm once; afterwards the arm maximizing
/// `mean + sqrt(2 ln t / count)` is played, ties going to the lowest index.
#[derive(Debug, Clone)]
pub struct Ucb1 {
    counts: Vec<u64>,
    reward_sums: Vec<f64>,
    round: u64,
    last_strategy: MixedStrategy,
    fresh: bool,
}

impl Ucb1 {
    pub fn new(actions: usize) -> Self {
        assert!(actions > 0, "UCB1 needs at least one action");
        Self {
            counts: vec![0; actions],
            reward_sums: vec![0.0; actions],
            round: 1,
            last_strategy: MixedStrategy::point_mass(actions, 0),
            fresh: false,
        }
    }

    /// Resumes from per-arm pull counts and `[0, 1]` reward sums; the round is
    /// one past the total number of pulls.
    pub fn from_state(counts: Vec<u64>, reward_sums: Vec<f64>) -> Self {
        assert_eq!(counts.len(), reward_sums.len());
        let actions = counts.len();
        let round = counts.iter().sum::<u64>() + 1;
        Self {
            counts,
            reward_sums,
            round,
            last_strategy: MixedStrategy::point_mass(actions, 0),
            fresh: false,
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn reward_sums(&self) -> &[f64] {
        &self.reward_sums
    }

    fn choose(&self) -> usize {
        if let Some(unpulled) = self.counts.iter().position(|&c| c == 0) {
            return unpulled;
        }
        let log_t = (self.round as f64).ln();
        let mut best = 0;
        let mut best_index = f64::NEG_INFINITY;
        for (arm, (&count, &sum)) in self.counts.iter().zip(&self.reward_sums).enumerate() {
            let n = count as f64;
            let index = sum / n + (2.0 * log_t / n).sqrt();
            if index > best_index {
                best_index = index;
                best = arm;
            }
        }
        best
    }
}

impl Learner for Ucb1 {
    fn num_actions(&self) -> usize {
        self.counts.len()
    }

    fn round(&self) -> u64 {
        self.round
    }

    fn strategy(&mut self) -> Result<&MixedStrategy, LearnerError> {
        if !self.fresh {
            let arm = self.choose();
            let probs = self.last_strategy.as_mut_slice();
            probs.fill(0.0);
            probs[arm] = 1.0;
            self.fresh = true;
        }
        Ok(&self.last_strategy)
    }

    fn update(&mut self, action: usize, loss: f64) -> Result<(), LearnerError> {
        check_feedback(self.counts.len(), action, loss)?;
        self.counts[action] += 1;
        self.reward_sums[action] += 1.0 - 0.5 * loss;
        self.round += 1;
        self.fresh = false;
        Ok(())
    }
}
