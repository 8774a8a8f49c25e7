use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::{svg, ExperimentConfig, ExperimentError, ExperimentResult, ResultRow};

pub const REGRET_CSV_HEADER: &str = "algorithm,T,epsilon,mean_regret,p10,p90,trials,seed";
pub const PSNE_CSV_HEADER: &str = "d_min,d_1,m,n,t,t_over_opt,success_rate,trials,seed";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Svg => "svg",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "svg" => Ok(OutputFormat::Svg),
            _ => Err(format!("unknown output format `{s}` (expected csv, json or svg)")),
        }
    }
}

pub fn csv_header(config: &ExperimentConfig) -> &'static str {
    match config {
        ExperimentConfig::RegretScaling(_) => REGRET_CSV_HEADER,
        ExperimentConfig::PsneIdentification(_) => PSNE_CSV_HEADER,
    }
}

/// CSV text: the schema's header, then one line per row. Floats use the
/// shortest representation that parses back to the same value.
pub fn to_csv(result: &ExperimentResult) -> String {
    let mut out = String::new();
    out.push_str(csv_header(&result.config));
    out.push('\n');
    for row in &result.rows {
        match row {
            ResultRow::Regret(r) => writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.algorithm, r.horizon, r.epsilon, r.mean_regret, r.p10, r.p90, r.trials, r.seed
            ),
            ResultRow::Psne(r) => writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.d_min, r.d_1, r.m, r.n, r.t, r.t_over_opt, r.success_rate, r.trials, r.seed
            ),
        }
        .expect("writing to a String cannot fail");
    }
    out
}

pub fn to_json(result: &ExperimentResult) -> String {
    let mut json = serde_json::to_string_pretty(result).expect("results always serialize");
    json.push('\n');
    json
}

pub fn write_results(
    result: &ExperimentResult,
    path: &Path,
    format: OutputFormat,
) -> Result<(), ExperimentError> {
    let text = match format {
        OutputFormat::Csv => to_csv(result),
        OutputFormat::Json => to_json(result),
        OutputFormat::Svg => svg::render(result),
    };
    fs::write(path, text).map_err(|e| ExperimentError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn read_results(path: &Path) -> Result<ExperimentResult, ExperimentError> {
    let io = |message: String| ExperimentError::Io {
        path: path.display().to_string(),
        message,
    };
    let text = fs::read_to_string(path).map_err(|e| io(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| io(e.to_string()))
}
