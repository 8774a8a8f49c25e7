use super::{check_feedback, Learner, LearnerError, MIN_PLAYED_PROBABILITY};
use crate::game::MixedStrategy;

/// Anytime Exp3: exponential weights over importance-weighted cumulative
/// losses with rate `eta_t = sqrt(ln m / (m t))`.
#[derive(Debug, Clone)]
pub struct Exp3 {
    cum_loss: Vec<f64>,
    round: u64,
    last_strategy: MixedStrategy,
    fresh: bool,
}

impl Exp3 {
    pub fn new(actions: usize) -> Self {
        assert!(actions > 0, "Exp3 needs at least one action");
        Self {
            cum_loss: vec![0.0; actions],
            round: 1,
            last_strategy: MixedStrategy::uniform(actions),
            fresh: false,
        }
    }

    pub fn learning_rate(&self) -> f64 {
        let m = self.cum_loss.len() as f64;
        (m.ln() / (m * self.round as f64)).sqrt()
    }

    pub fn cum_loss(&self) -> &[f64] {
        &self.cum_loss
    }
}

impl Learner for Exp3 {
    fn num_actions(&self) -> usize {
        self.cum_loss.len()
    }

    fn round(&self) -> u64 {
        self.round
    }

    fn strategy(&mut self) -> Result<&MixedStrategy, LearnerError> {
        if !self.fresh {
            let eta = self.learning_rate();
            let min = self.cum_loss.iter().copied().fold(f64::INFINITY, f64::min);
            let probs = self.last_strategy.as_mut_slice();
            let mut sum = 0.0;
            for (p, &l) in probs.iter_mut().zip(&self.cum_loss) {
                *p = (-eta * (l - min)).exp();
                sum += *p;
            }
            probs.iter_mut().for_each(|p| *p /= sum);
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
        self.round += 1;
        self.fresh = false;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_losses_give_uniform() {
        let mut l = Exp3::new(4);
        assert_eq!(l.strategy().unwrap().probs(), &[0.25; 4]);
    }

    #[test]
    fn weights_follow_exponential_rule() {
        let mut l = Exp3::new(2);
        l.update(0, 1.0).unwrap();
        assert_eq!(l.cum_loss(), &[2.0, 0.0]);
        let eta = (2f64.ln() / 4.0).sqrt();
        let x = l.strategy().unwrap();
        let expected = (-2.0 * eta).exp() / (1.0 + (-2.0 * eta).exp());
        assert!((x[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn single_action_is_point_mass() {
        let mut l = Exp3::new(1);
        l.update(0, 2.0).unwrap();
        assert_eq!(l.strategy().unwrap().probs(), &[1.0]);
    }
}
