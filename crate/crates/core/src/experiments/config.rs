use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::learners::LearnerKind;

/// How the 2x2 example's epsilon is chosen for each horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonRule {
    Fixed(f64),
    /// `epsilon = T^(-1/3)`.
    CubeRootDecay,
}

pub const CUBE_ROOT_RULE: &str = "T^(-1/3)";

impl EpsilonRule {
    pub fn epsilon(self, horizon: u64) -> f64 {
        match self {
            EpsilonRule::Fixed(eps) => eps,
            EpsilonRule::CubeRootDecay => (horizon as f64).powf(-1.0 / 3.0),
        }
    }
}

impl Serialize for EpsilonRule {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            EpsilonRule::Fixed(eps) => s.serialize_f64(*eps),
            EpsilonRule::CubeRootDecay => s.serialize_str(CUBE_ROOT_RULE),
        }
    }
}

impl<'de> Deserialize<'de> for EpsilonRule {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Fixed(f64),
            Rule(String),
        }
        match Raw::deserialize(d)? {
            Raw::Fixed(eps) => Ok(EpsilonRule::Fixed(eps)),
            Raw::Rule(s) if s.replace(' ', "") == CUBE_ROOT_RULE => Ok(EpsilonRule::CubeRootDecay),
            Raw::Rule(s) => Err(serde::de::Error::custom(format!(
                "unknown epsilon rule `{s}` (expected a number or \"{CUBE_ROOT_RULE}\")"
            ))),
        }
    }
}

/// Regret of self-play on the 2x2 example across horizons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegretScalingConfig {
    pub horizons: Vec<u64>,
    pub trials: u64,
    pub algorithms: Vec<LearnerKind>,
    pub epsilon: EpsilonRule,
    /// Only horizons `T >= fit_t_min` enter the slope fit.
    pub fit_t_min: u64,
    pub master_seed: u64,
    #[serde(default)]
    pub independent_outcomes: bool,
}

impl RegretScalingConfig {
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if self.horizons.is_empty() {
            problems.push("horizons: must not be empty".to_string());
        }
        if self.horizons.contains(&0) {
            problems.push("horizons: every horizon must be positive".to_string());
        }
        if self.horizons.windows(2).any(|w| w[0] >= w[1]) {
            problems.push("horizons: must be strictly increasing".to_string());
        }
        if self.trials == 0 {
            problems.push("trials: must be at least 1".to_string());
        }
        if self.algorithms.is_empty() {
            problems.push("algorithms: must name at least one algorithm".to_string());
        }
        for (k, a) in self.algorithms.iter().enumerate() {
            if self.algorithms[..k].contains(a) {
                problems.push(format!("algorithms: `{a}` listed twice"));
            }
        }
        for &t in &self.horizons {
            let eps = self.epsilon.epsilon(t);
            if !(eps > 0.0 && eps < 1.0 / 3.0) {
                problems.push(format!(
                    "epsilon: value {eps} at T = {t} is outside (0, 1/3)"
                ));
                break;
            }
        }
        problems
    }
}

/// PSNE identification on the hard instance for several `d_min` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsneIdConfig {
    pub m: usize,
    pub n: usize,
    pub d_1: f64,
    pub d_min_values: Vec<f64>,
    /// Horizon is `ceil(horizon_multiplier * OPT)`.
    pub horizon_multiplier: f64,
    pub trials: u64,
    pub master_seed: u64,
    #[serde(default = "default_success_target")]
    pub success_target: f64,
}

fn default_success_target() -> f64 {
    0.75
}

impl PsneIdConfig {
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if self.m < 3 || self.n < 3 {
            problems.push(format!("m, n: need at least 3 actions each, got {} x {}", self.m, self.n));
        }
        if !(self.d_1 > 0.0 && 2.0 * self.d_1 <= 1.0) {
            problems.push(format!("d_1: must satisfy 0 < 2 d_1 <= 1, got {}", self.d_1));
        }
        if self.d_min_values.is_empty() {
            problems.push("d_min_values: must not be empty".to_string());
        }
        for &d in &self.d_min_values {
            if !(d > 0.0 && d <= self.d_1) {
                problems.push(format!("d_min_values: {d} must lie in (0, d_1 = {}]", self.d_1));
            }
        }
        if !(self.horizon_multiplier > 0.0 && self.horizon_multiplier.is_finite()) {
            problems.push(format!(
                "horizon_multiplier: must be positive, got {}",
                self.horizon_multiplier
            ));
        }
        if self.trials == 0 {
            problems.push("trials: must be at least 1".to_string());
        }
        if !(self.success_target > 0.0 && self.success_target <= 1.0) {
            problems.push(format!(
                "success_target: must lie in (0, 1], got {}",
                self.success_target
            ));
        }
        problems
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    RegretScaling(RegretScalingConfig),
    PsneIdentification(PsneIdConfig),
}

impl ExperimentConfig {
    pub fn validate(&self) -> Vec<String> {
        match self {
            ExperimentConfig::RegretScaling(c) => c.validate(),
            ExperimentConfig::PsneIdentification(c) => c.validate(),
        }
    }

    pub fn master_seed(&self) -> u64 {
        match self {
            ExperimentConfig::RegretScaling(c) => c.master_seed,
            ExperimentConfig::PsneIdentification(c) => c.master_seed,
        }
    }

    pub fn set_master_seed(&mut self, seed: u64) {
        match self {
            ExperimentConfig::RegretScaling(c) => c.master_seed = seed,
            ExperimentConfig::PsneIdentification(c) => c.master_seed = seed,
        }
    }

    pub fn set_trials(&mut self, trials: u64) {
        match self {
            ExperimentConfig::RegretScaling(c) => c.trials = trials,
            ExperimentConfig::PsneIdentification(c) => c.trials = trials,
        }
    }
}

pub const PRESET_NAMES: [&str; 4] = ["fig1-desk", "fig1-full", "fig2-desk", "fig2-full"];

pub const DEFAULT_SEED: u64 = 20_240_601;

/// Named configurations: `*-desk` finish in minutes on a laptop, `*-full`
/// match the published scale and take hours.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let all_algorithms = vec![LearnerKind::Tsallis, LearnerKind::Exp3, LearnerKind::Ucb1];
    Some(match name {
        "fig1-desk" => ExperimentConfig::RegretScaling(RegretScalingConfig {
            horizons: (12..=18).map(|e| 1u64 << e).collect(),
            trials: 64,
            algorithms: all_algorithms,
            epsilon: EpsilonRule::CubeRootDecay,
            fit_t_min: 1 << 15,
            master_seed: DEFAULT_SEED,
            independent_outcomes: false,
        }),
        "fig1-full" => ExperimentConfig::RegretScaling(RegretScalingConfig {
            horizons: (0..=8)
                .map(|k| 10f64.powf(3.0 + 0.5 * k as f64).round() as u64)
                .collect(),
            trials: 512,
            algorithms: all_algorithms,
            epsilon: EpsilonRule::CubeRootDecay,
            fit_t_min: 100_000,
            master_seed: DEFAULT_SEED,
            independent_outcomes: false,
        }),
        "fig2-desk" => ExperimentConfig::PsneIdentification(PsneIdConfig {
            m: 16,
            n: 16,
            d_1: 0.2,
            d_min_values: vec![0.1, 0.05, 0.04, 0.004],
            horizon_multiplier: 64.0,
            trials: 200,
            master_seed: DEFAULT_SEED,
            success_target: 0.75,
        }),
        "fig2-full" => ExperimentConfig::PsneIdentification(PsneIdConfig {
            m: 256,
            n: 256,
            d_1: 0.1,
            d_min_values: vec![0.05, 0.02, 0.01, 0.005, 0.002, 0.001],
            horizon_multiplier: 128.0,
            trials: 512,
            master_seed: DEFAULT_SEED,
            success_target: 0.75,
        }),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for name in PRESET_NAMES {
            let cfg = preset(name).unwrap();
            assert!(cfg.validate().is_empty(), "{name}: {:?}", cfg.validate());
        }
        assert!(preset("fig3").is_none());
    }

    #[test]
    fn epsilon_rule_serde() {
        let rule: EpsilonRule = serde_json::from_str("\"T^(-1/3)\"").unwrap();
        assert_eq!(rule, EpsilonRule::CubeRootDecay);
        assert!((rule.epsilon(1000) - 0.1).abs() < 1e-12);
        let fixed: EpsilonRule = serde_json::from_str("0.05").unwrap();
        assert_eq!(fixed, EpsilonRule::Fixed(0.05));
        assert_eq!(serde_json::to_string(&rule).unwrap(), "\"T^(-1/3)\"");
        assert!(serde_json::from_str::<EpsilonRule>("\"sqrt\"").is_err());
    }

    #[test]
    fn validation_lists_every_problem() {
        let cfg = RegretScalingConfig {
            horizons: vec![100, 50],
            trials: 0,
            algorithms: vec![],
            epsilon: EpsilonRule::Fixed(0.5),
            fit_t_min: 0,
            master_seed: 0,
            independent_outcomes: false,
        };
        let problems = cfg.validate();
        assert_eq!(problems.len(), 4, "{problems:?}");
    }

    #[test]
    fn psne_validation_rejects_large_gap() {
        let mut cfg = match preset("fig2-desk").unwrap() {
            ExperimentConfig::PsneIdentification(c) => c,
            _ => unreachable!(),
        };
        cfg.d_1 = 0.6;
        cfg.d_min_values = vec![0.4];
        let problems = cfg.validate();
        assert!(problems.iter().any(|p| p.starts_with("d_1")), "{problems:?}");
    }

    #[test]
    fn config_json_is_tagged() {
        let cfg = preset("fig2-desk").unwrap();
        let json = serde_json::to_string(&cfg).unwrap();
        assert!(json.starts_with("{\"experiment\":\"psne-identification\""));
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&json).unwrap(), cfg);
    }
}
