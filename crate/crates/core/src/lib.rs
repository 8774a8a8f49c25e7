//! Simulation of uncoupled no-regret learning in two-player zero-sum matrix
//! games under bandit feedback, built around the 1/2-Tsallis-INF algorithm.
//!
//! - [`game`]: payoff matrices, mixed strategies, seeded sampling.
//! - [`learners`]: Tsallis-INF, Exp3 and UCB1 behind the [`learners::Learner`] trait.
//! - [`equilibrium`]: Nash equilibria, duality gap, Bregman divergence,
//!   instance constants and instance generators.
//! - [`dynamics`]: the self-play loop and its regret/convergence metrics.
//! - [`experiments`]: regret-scaling and PSNE-identification experiments.
//! - [`cli`]: the `banditgame` command line.

pub mod cli;
pub mod dynamics;
pub mod equilibrium;
pub mod experiments;
pub mod game;
pub mod learners;
