//! The regret-scaling and PSNE-identification experiments, their result
//! schema and writers.
//!
//! Trial `k` of every configuration draws from stream `k` of the master
//! seed, so configurations share random numbers and a result depends only on
//! the config, never on the thread count.

pub mod config;
pub mod output;
pub mod stats;
mod svg;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dynamics::{checkpoint_rounds, pseudo_regret, run_indexed, run_selfplay, DynamicsError, SelfPlayOptions};
use crate::equilibrium::{gen_example_2x2, gen_hard_psne_instance, instance_constants, solve_ne, EquilibriumError};
use crate::game::RngStream;
use crate::learners::LearnerKind;

pub use config::{preset, EpsilonRule, ExperimentConfig, PsneIdConfig, RegretScalingConfig, PRESET_NAMES};
pub use output::{read_results, write_results, OutputFormat};
pub use stats::{fit_loglog_slope, percentile_nearest_rank, FitError, LogLogFit};

pub const RNG_DESCRIPTION: &str =
    "ChaCha8 (rand_chacha 0.3.1), seed_from_u64(master_seed), stream = trial index";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid config:\n  {}", .0.join("\n  "))]
    InvalidConfig(Vec<String>),
    #[error("{context}: {source}")]
    Trial {
        context: String,
        #[source]
        source: DynamicsError,
    },
    #[error("{context}: {source}")]
    Instance {
        context: String,
        #[source]
        source: EquilibriumError,
    },
    #[error("instance with d_min = {d_min} is degenerate (no unique PSNE)")]
    Degenerate { d_min: f64 },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the config's compact JSON form.
    pub config_hash: String,
    pub master_seed: u64,
    pub code_version: String,
    pub rng: String,
}

impl Provenance {
    pub fn for_config(config: &ExperimentConfig) -> Self {
        Provenance {
            config_hash: config_hash(config),
            master_seed: config.master_seed(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            rng: RNG_DESCRIPTION.to_string(),
        }
    }
}

pub fn config_hash(config: &ExperimentConfig) -> String {
    let json = serde_json::to_vec(config).expect("configs always serialize");
    Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
}

/// One (algorithm, T) cell of the regret experiment. The metric is
/// `reg_row + reg_col` per trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegretRow {
    pub algorithm: LearnerKind,
    #[serde(rename = "T")]
    pub horizon: u64,
    pub epsilon: f64,
    pub mean_regret: f64,
    pub p10: f64,
    pub p90: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Success rate at one checkpoint of the PSNE experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsneRow {
    pub d_min: f64,
    pub d_1: f64,
    pub m: usize,
    pub n: usize,
    pub t: u64,
    pub t_over_opt: f64,
    /// Fraction of trials whose most played pair is the PSNE.
    pub success_rate: f64,
    /// Same, with the leader taken on accumulated strategy mass.
    pub mixed_success_rate: f64,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ResultRow {
    Regret(RegretRow),
    Psne(PsneRow),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FitRecord {
    /// Log-log slope of mean regret against T; `fit` is `None` when fewer
    /// than two horizons reach `t_min`.
    LogLog {
        algorithm: LearnerKind,
        t_min: u64,
        fit: Option<LogLogFit>,
    },
    /// First checkpoint whose success rate reaches `target`.
    Threshold {
        d_min: f64,
        opt: f64,
        horizon: u64,
        target: f64,
        first_t: Option<u64>,
        first_t_over_opt: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub provenance: Provenance,
    pub rows: Vec<ResultRow>,
    pub fits: Vec<FitRecord>,
}

impl ExperimentResult {
    pub fn empty(config: ExperimentConfig) -> Self {
        ExperimentResult {
            provenance: Provenance::for_config(&config),
            config,
            rows: Vec::new(),
            fits: Vec::new(),
        }
    }

    pub fn regret_rows(&self) -> impl Iterator<Item = &RegretRow> {
        self.rows.iter().filter_map(|r| match r {
            ResultRow::Regret(row) => Some(row),
            ResultRow::Psne(_) => None,
        })
    }

    pub fn psne_rows(&self) -> impl Iterator<Item = &PsneRow> {
        self.rows.iter().filter_map(|r| match r {
            ResultRow::Psne(row) => Some(row),
            ResultRow::Regret(_) => None,
        })
    }

    /// The fitted slope for `algorithm`, if defined.
    pub fn slope(&self, algorithm: LearnerKind) -> Option<f64> {
        self.fits.iter().find_map(|f| match f {
            FitRecord::LogLog { algorithm: a, fit, .. } if *a == algorithm => fit.map(|f| f.slope),
            _ => None,
        })
    }

    /// `first_t_over_opt` of the threshold record for `d_min`.
    pub fn first_hit(&self, d_min: f64) -> Option<f64> {
        self.fits.iter().find_map(|f| match f {
            FitRecord::Threshold { d_min: d, first_t_over_opt, .. } if *d == d_min => *first_t_over_opt,
            _ => None,
        })
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult, ExperimentError> {
    match config {
        ExperimentConfig::RegretScaling(c) => run_regret_scaling(c),
        ExperimentConfig::PsneIdentification(c) => run_psne_identification(c),
    }
}

fn check(problems: Vec<String>) -> Result<(), ExperimentError> {
    if problems.is_empty() {
        Ok(())
    } else {
        Err(ExperimentError::InvalidConfig(problems))
    }
}

fn summarize(mut values: Vec<f64>) -> (f64, f64, f64) {
    let mean = stats::mean(&values);
    values.sort_by(f64::total_cmp);
    (
        mean,
        percentile_nearest_rank(&values, 10.0),
        percentile_nearest_rank(&values, 90.0),
    )
}

pub fn run_regret_scaling(config: &RegretScalingConfig) -> Result<ExperimentResult, ExperimentError> {
    check(config.validate())?;
    let mut result = ExperimentResult::empty(ExperimentConfig::RegretScaling(config.clone()));
    let options = SelfPlayOptions {
        record_trajectory: false,
        independent_outcomes: config.independent_outcomes,
    };
    for &algorithm in &config.algorithms {
        let mut points = Vec::new();
        for &horizon in &config.horizons {
            let epsilon = config.epsilon.epsilon(horizon);
            let a = gen_example_2x2(epsilon).map_err(|source| ExperimentError::Instance {
                context: format!("T = {horizon}"),
                source,
            })?;
            let regrets = run_indexed(config.trials, |k| {
                let (mut row, mut col) = (algorithm.build(2), algorithm.build(2));
                let rng = RngStream::with_stream(config.master_seed, k);
                let record = run_selfplay(&a, &mut row, &mut col, horizon, rng, options)?;
                Ok(pseudo_regret(&record, &a)?.total())
            })
            .map_err(|source| ExperimentError::Trial {
                context: format!("{algorithm} at T = {horizon}"),
                source,
            })?;
            let (mean_regret, p10, p90) = summarize(regrets);
            points.push((horizon as f64, mean_regret));
            result.rows.push(ResultRow::Regret(RegretRow {
                algorithm,
                horizon,
                epsilon,
                mean_regret,
                p10,
                p90,
                trials: config.trials,
                seed: config.master_seed,
            }));
        }
        result.fits.push(FitRecord::LogLog {
            algorithm,
            t_min: config.fit_t_min,
            fit: fit_loglog_slope(&points, config.fit_t_min as f64).ok(),
        });
    }
    Ok(result)
}

pub fn run_psne_identification(config: &PsneIdConfig) -> Result<ExperimentResult, ExperimentError> {
    check(config.validate())?;
    let mut result = ExperimentResult::empty(ExperimentConfig::PsneIdentification(config.clone()));
    let (m, n) = (config.m, config.n);
    for &d_min in &config.d_min_values {
        let context = || format!("d_min = {d_min}");
        let a = gen_hard_psne_instance(m, n, d_min, config.d_1)
            .and_then(|a| {
                let sol = solve_ne(&a)?;
                let constants = instance_constants(&a, &sol)?;
                Ok((a, sol, constants))
            })
            .map_err(|source| ExperimentError::Instance {
                context: context(),
                source,
            });
        let (a, sol, constants) = a?;
        let psne = match sol.pure_pair() {
            Some(pair) if !constants.degenerate => pair,
            _ => return Err(ExperimentError::Degenerate { d_min }),
        };
        let opt = constants.opt;
        let horizon = (config.horizon_multiplier * opt).ceil() as u64;
        let rounds = checkpoint_rounds(horizon);
        let hits = run_indexed(config.trials, |k| {
            let (mut row, mut col) = (LearnerKind::Tsallis.build(m), LearnerKind::Tsallis.build(n));
            let rng = RngStream::with_stream(config.master_seed, k);
            let record = run_selfplay(&a, &mut row, &mut col, horizon, rng, SelfPlayOptions::default())?;
            Ok(record
                .checkpoints
                .iter()
                .map(|cp| (cp.realized_leader == psne, cp.mixed_leader == psne))
                .collect::<Vec<_>>())
        })
        .map_err(|source| ExperimentError::Trial {
            context: context(),
            source,
        })?;
        let mut first_t = None;
        for (c, &t) in rounds.iter().enumerate() {
            let realized = hits.iter().filter(|h| h[c].0).count();
            let mixed = hits.iter().filter(|h| h[c].1).count();
            let success_rate = realized as f64 / config.trials as f64;
            if first_t.is_none() && success_rate >= config.success_target {
                first_t = Some(t);
            }
            result.rows.push(ResultRow::Psne(PsneRow {
                d_min,
                d_1: config.d_1,
                m,
                n,
                t,
                t_over_opt: t as f64 / opt,
                success_rate,
                mixed_success_rate: mixed as f64 / config.trials as f64,
                trials: config.trials,
                seed: config.master_seed,
            }));
        }
        result.fits.push(FitRecord::Threshold {
            d_min,
            opt,
            horizon,
            target: config.success_target,
            first_t,
            first_t_over_opt: first_t.map(|t| t as f64 / opt),
        });
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_regret(horizons: Vec<u64>, trials: u64) -> RegretScalingConfig {
        RegretScalingConfig {
            horizons,
            trials,
            algorithms: vec![LearnerKind::Tsallis],
            epsilon: EpsilonRule::CubeRootDecay,
            fit_t_min: 1,
            master_seed: 5,
            independent_outcomes: false,
        }
    }

    #[test]
    fn single_horizon_has_undefined_slope() {
        let result = run_regret_scaling(&tiny_regret(vec![64], 1)).unwrap();
        assert_eq!(result.rows.len(), 1);
        assert_eq!(result.slope(LearnerKind::Tsallis), None);
        assert!(matches!(result.fits[0], FitRecord::LogLog { fit: None, .. }));
    }

    #[test]
    fn percentiles_bracket_and_trials_match() {
        let result = run_regret_scaling(&tiny_regret(vec![64, 256], 9)).unwrap();
        for row in result.regret_rows() {
            assert!(row.p10 <= row.p90);
            assert_eq!(row.trials, 9);
        }
        assert!(result.slope(LearnerKind::Tsallis).is_some());
    }

    #[test]
    fn invalid_config_lists_problems() {
        let err = run_regret_scaling(&tiny_regret(vec![], 0)).unwrap_err();
        match err {
            ExperimentError::InvalidConfig(p) => assert_eq!(p.len(), 2),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn easy_psne_instance_is_identified() {
        let config = PsneIdConfig {
            m: 3,
            n: 3,
            d_1: 0.2,
            d_min_values: vec![0.2],
            horizon_multiplier: 64.0,
            trials: 40,
            master_seed: 9,
            success_target: 0.75,
        };
        let result = run_psne_identification(&config).unwrap();
        let last = result.psne_rows().last().unwrap();
        assert!(last.success_rate >= 0.75, "{last:?}");
        assert!(result.first_hit(0.2).is_some());
    }

    #[test]
    fn psne_rejects_oversized_gap() {
        let config = PsneIdConfig {
            m: 3,
            n: 3,
            d_1: 0.6,
            d_min_values: vec![0.4],
            horizon_multiplier: 1.0,
            trials: 1,
            master_seed: 0,
            success_target: 0.75,
        };
        assert!(matches!(
            run_psne_identification(&config),
            Err(ExperimentError::InvalidConfig(_))
        ));
    }

    #[test]
    fn results_are_reproducible() {
        let cfg = tiny_regret(vec![32, 128], 5);
        assert_eq!(run_regret_scaling(&cfg).unwrap(), run_regret_scaling(&cfg).unwrap());
    }

    #[test]
    fn provenance_hash_tracks_config() {
        let a = ExperimentConfig::RegretScaling(tiny_regret(vec![32], 1));
        let mut b = a.clone();
        b.set_master_seed(6);
        assert_eq!(config_hash(&a).len(), 64);
        assert_ne!(config_hash(&a), config_hash(&b));
    }
}
