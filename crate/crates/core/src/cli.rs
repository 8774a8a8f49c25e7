//! The `banditgame` command line.
//!
//! Exit codes: 0 on success, 1 on a runtime failure, 2 on a usage or
//! validation error.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dynamics::{
    identify_psne, majority_vote, pseudo_regret, run_indexed, run_selfplay, DynamicsError,
    RegretSummary, SelfPlayOptions, TrajectoryStep, MAX_TRAJECTORY_ROUNDS,
};
use crate::equilibrium::{
    gen_example_2x2, gen_hard_psne_instance, gen_lower_bound_instance, instance_constants,
    solve_ne, EquilibriumError, GameAnalysis,
};
use crate::experiments::{
    preset, run_experiment, write_results, ExperimentConfig, ExperimentError, ExperimentResult,
    FitRecord, OutputFormat, ResultRow, PRESET_NAMES,
};
use crate::game::{GameError, PayoffMatrix, RngStream};
use crate::learners::LearnerKind;

pub const THREADS_ENV: &str = "BANDITGAME_THREADS";

#[derive(Parser)]
#[command(name = "banditgame", version)]
#[command(about = "Uncoupled bandit learning in zero-sum matrix games")]
struct Cli {
    /// Worker threads (default: BANDITGAME_THREADS, else all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a Nash equilibrium and the game value
    Solve {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Also write the solution as JSON
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Equilibrium plus gap vectors, omega, gamma, delta_min and OPT
    Analyze {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Also write the analysis as JSON
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Self-play runs with pseudo-regret and PSNE guesses
    Run {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Row player's algorithm
        #[arg(long, default_value = "tsallis")]
        algorithm: LearnerKind,
        /// Column player's algorithm (defaults to --algorithm)
        #[arg(long)]
        opponent: Option<LearnerKind>,
        /// Horizon T
        #[arg(short = 'T', long = "horizon")]
        horizon: u64,
        /// Independent runs S; their PSNE guesses are combined by majority vote
        #[arg(short = 'S', long, default_value_t = 1)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Draw the column player's outcome independently of the row player's
        #[arg(long)]
        two_sample: bool,
        /// Also write per-run results as JSON
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write every round of the first run as JSON (T at most 10^4)
        #[arg(long, value_name = "FILE")]
        debug_trajectory: Option<PathBuf>,
    },
    /// Regret-scaling experiment on the 2x2 example
    RegretExp(ExperimentArgs),
    /// PSNE-identification experiment on the hard instance
    PsneExp(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    Example2x2,
    Hardpsne,
    Lowerbound,
}

#[derive(Args)]
#[group(skip)]
struct InstanceArgs {
    /// Built-in instance family
    #[arg(long = "gen", value_enum, required_unless_present = "matrix", conflicts_with = "matrix")]
    generator: Option<Generator>,
    /// Matrix file: "m n" then m rows of n entries
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// example2x2: epsilon in (0, 1/3)
    #[arg(long)]
    eps: Option<f64>,
    /// hardpsne: rows
    #[arg(short, long)]
    m: Option<usize>,
    /// hardpsne: columns (defaults to m)
    #[arg(short, long)]
    n: Option<usize>,
    /// hardpsne: gap of the second action
    #[arg(long)]
    d_min: Option<f64>,
    /// hardpsne: gap of the remaining actions
    #[arg(long = "d1")]
    d_1: Option<f64>,
    /// lowerbound: comma-separated row gaps
    #[arg(long, value_delimiter = ',')]
    delta: Option<Vec<f64>>,
    /// lowerbound: comma-separated column gaps
    #[arg(long, value_delimiter = ',')]
    delta_prime: Option<Vec<f64>>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment config
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Named config: fig1-desk, fig1-full, fig2-desk, fig2-full
    #[arg(long)]
    preset: Option<String>,
    /// Override the trial count
    #[arg(long)]
    trials: Option<u64>,
    /// Override the master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output path prefix; writes PREFIX.csv and PREFIX.json
    #[arg(short, long, default_value = "results")]
    out: PathBuf,
    /// Also write PREFIX.svg
    #[arg(long)]
    svg: bool,
    /// Print the effective config and exit
    #[arg(long)]
    print_config: bool,
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<EquilibriumError> for Failure {
    fn from(e: EquilibriumError) -> Self {
        match e {
            EquilibriumError::InvalidParameter(_)
            | EquilibriumError::Game(_)
            | EquilibriumError::DimensionMismatch { .. } => Failure::usage(e.to_string()),
            _ => Failure::runtime(e.to_string()),
        }
    }
}

impl From<DynamicsError> for Failure {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::EmptyHorizon | DynamicsError::TrajectoryTooLong(_) | DynamicsError::NoTrials => {
                Failure::usage(e.to_string())
            }
            _ => Failure::runtime(e.to_string()),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::InvalidConfig(_) | ExperimentError::Degenerate { .. } => {
                Failure::usage(e.to_string())
            }
            _ => Failure::runtime(e.to_string()),
        }
    }
}

/// Parses the process arguments, runs the command and returns the exit code.
pub fn main() -> i32 {
    run(std::env::args_os())
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    configure_threads(cli.threads)?;
    match cli.command {
        Command::Solve { instance, json } => cmd_solve(&instance, json.as_deref()),
        Command::Analyze { instance, json } => cmd_analyze(&instance, json.as_deref()),
        Command::Run {
            instance,
            algorithm,
            opponent,
            horizon,
            trials,
            seed,
            two_sample,
            json,
            debug_trajectory,
        } => cmd_run(RunArgs {
            a: load_instance(&instance)?,
            row: algorithm,
            col: opponent.unwrap_or(algorithm),
            horizon,
            trials,
            seed,
            two_sample,
            json,
            debug_trajectory,
        }),
        Command::RegretExp(args) => cmd_experiment(&args, ExperimentKind::Regret),
        Command::PsneExp(args) => cmd_experiment(&args, ExperimentKind::Psne),
    }
}

fn configure_threads(flag: Option<usize>) -> Result<(), Failure> {
    let threads = match flag {
        Some(t) => Some(t),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse().map_err(|_| {
                Failure::usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))
            })?),
            Err(_) => None,
        },
    };
    match threads {
        Some(0) => Err(Failure::usage("thread count must be positive")),
        Some(t) => {
            // A second call in the same process (tests) keeps the first pool.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            Ok(())
        }
        None => Ok(()),
    }
}

fn require<T: Copy>(value: Option<T>, generator: &str, flag: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::usage(format!("--gen {generator} needs --{flag}")))
}

fn load_instance(args: &InstanceArgs) -> Result<PayoffMatrix, Failure> {
    if let Some(path) = &args.matrix {
        return PayoffMatrix::load(path).map_err(|e| match e {
            GameError::Io { .. } => Failure::runtime(e.to_string()),
            _ => Failure::usage(format!("{}: {e}", path.display())),
        });
    }
    let a = match args.generator.expect("clap enforces one instance source") {
        Generator::Example2x2 => gen_example_2x2(require(args.eps, "example2x2", "eps")?)?,
        Generator::Hardpsne => {
            let m = require(args.m, "hardpsne", "m")?;
            gen_hard_psne_instance(
                m,
                args.n.unwrap_or(m),
                require(args.d_min, "hardpsne", "d-min")?,
                require(args.d_1, "hardpsne", "d1")?,
            )?
        }
        Generator::Lowerbound => {
            let missing = |flag: &str| Failure::usage(format!("--gen lowerbound needs --{flag}"));
            let delta = args.delta.as_ref().ok_or_else(|| missing("delta"))?;
            let delta_prime = args.delta_prime.as_ref().ok_or_else(|| missing("delta-prime"))?;
            gen_lower_bound_instance(delta, delta_prime)?
        }
    };
    Ok(a)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))
}

/// Fixed-point with trailing zeros removed.
fn num(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{v:.9}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn vector(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|&x| num(x)).collect();
    format!("({})", parts.join(", "))
}

fn cmd_solve(args: &InstanceArgs, json: Option<&Path>) -> Result<(), Failure> {
    let a = load_instance(args)?;
    let sol = solve_ne(&a)?;
    println!("x_star = {}", vector(sol.x_star.probs()));
    println!("y_star = {}", vector(sol.y_star.probs()));
    println!("value = {}", num(sol.value));
    println!("support_i = {:?}", sol.support_i);
    println!("support_j = {:?}", sol.support_j);
    if let Some((i, j)) = sol.pure_pair() {
        println!("pure equilibrium at ({i}, {j})");
    }
    if let Some(path) = json {
        write_json(path, &sol)?;
    }
    Ok(())
}

fn cmd_analyze(args: &InstanceArgs, json: Option<&Path>) -> Result<(), Failure> {
    let a = load_instance(args)?;
    let solution = solve_ne(&a)?;
    let constants = instance_constants(&a, &solution)?;
    println!("x_star = {}", vector(solution.x_star.probs()));
    println!("y_star = {}", vector(solution.y_star.probs()));
    println!("value = {}", num(solution.value));
    println!("delta = {}", vector(&constants.delta));
    println!("delta_prime = {}", vector(&constants.delta_prime));
    println!("omega = {}", num(constants.omega));
    println!("omega_prime = {}", num(constants.omega_prime));
    println!("gamma = {}", num(constants.gamma));
    println!("gamma_prime = {}", num(constants.gamma_prime));
    match constants.delta_min {
        Some(d) => println!("delta_min = {}", num(d)),
        None => println!("delta_min = none (fully mixed)"),
    }
    println!("OPT = {}", num(constants.opt));
    if constants.degenerate {
        println!("degenerate: some off-support gap is zero");
    }
    if let Some(path) = json {
        write_json(path, &GameAnalysis { solution, constants })?;
    }
    Ok(())
}

struct RunArgs {
    a: PayoffMatrix,
    row: LearnerKind,
    col: LearnerKind,
    horizon: u64,
    trials: u64,
    seed: u64,
    two_sample: bool,
    json: Option<PathBuf>,
    debug_trajectory: Option<PathBuf>,
}

#[derive(Serialize)]
struct RunReport {
    row_algorithm: LearnerKind,
    col_algorithm: LearnerKind,
    horizon: u64,
    seed: u64,
    two_sample: bool,
    runs: Vec<RunEntry>,
    psne_vote: Option<(usize, usize)>,
}

#[derive(Serialize)]
struct RunEntry {
    stream: u64,
    #[serde(flatten)]
    regret: RegretSummary,
    psne_guess: (usize, usize),
    #[serde(skip)]
    trajectory: Option<Vec<TrajectoryStep>>,
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    if args.horizon == 0 {
        return Err(Failure::usage("horizon T must be at least 1"));
    }
    if args.trials == 0 {
        return Err(Failure::usage("-S must be at least 1"));
    }
    if args.debug_trajectory.is_some() && args.horizon > MAX_TRAJECTORY_ROUNDS {
        return Err(Failure::usage(format!(
            "--debug-trajectory needs T <= {MAX_TRAJECTORY_ROUNDS}, got {}",
            args.horizon
        )));
    }
    let (m, n) = (args.a.rows(), args.a.cols());
    let runs = run_indexed(args.trials, |k| {
        let options = SelfPlayOptions {
            record_trajectory: k == 0 && args.debug_trajectory.is_some(),
            independent_outcomes: args.two_sample,
        };
        let (mut row, mut col) = (args.row.build(m), args.col.build(n));
        let rng = RngStream::with_stream(args.seed, k);
        let record = run_selfplay(&args.a, &mut row, &mut col, args.horizon, rng, options)?;
        Ok(RunEntry {
            stream: k,
            regret: pseudo_regret(&record, &args.a)?,
            psne_guess: identify_psne(&record),
            trajectory: record.trajectory,
        })
    })?;
    for r in &runs {
        println!(
            "run {}: reg_row = {} reg_col = {} dgap_avg = {} psne_guess = {:?}",
            r.stream,
            num(r.regret.reg_row),
            num(r.regret.reg_col),
            num(r.regret.dgap_avg),
            r.psne_guess
        );
    }
    let guesses: Vec<(usize, usize)> = runs.iter().map(|r| r.psne_guess).collect();
    let psne_vote = majority_vote(&guesses);
    if runs.len() > 1 {
        let mean = |f: fn(&RegretSummary) -> f64| {
            runs.iter().map(|r| f(&r.regret)).sum::<f64>() / runs.len() as f64
        };
        println!(
            "mean: reg_row = {} reg_col = {} dgap_avg = {} psne_vote = {:?}",
            num(mean(|r| r.reg_row)),
            num(mean(|r| r.reg_col)),
            num(mean(|r| r.dgap_avg)),
            psne_vote.expect("at least one run")
        );
    }
    if let Some(path) = &args.debug_trajectory {
        let steps = runs[0].trajectory.as_ref().expect("recorded for run 0");
        write_json(path, steps)?;
    }
    if let Some(path) = &args.json {
        write_json(
            path,
            &RunReport {
                row_algorithm: args.row,
                col_algorithm: args.col,
                horizon: args.horizon,
                seed: args.seed,
                two_sample: args.two_sample,
                runs,
                psne_vote,
            },
        )?;
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq)]
enum ExperimentKind {
    Regret,
    Psne,
}

fn resolve_config(args: &ExperimentArgs, kind: ExperimentKind) -> Result<ExperimentConfig, Failure> {
    let mut config = match (&args.preset, &args.config) {
        (Some(name), _) => preset(name).ok_or_else(|| {
            Failure::usage(format!(
                "unknown preset `{name}`; available presets: {}",
                PRESET_NAMES.join(", ")
            ))
        })?,
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?
        }
        (None, None) => unreachable!("clap requires --config or --preset"),
    };
    let matches = matches!(
        (&config, kind),
        (ExperimentConfig::RegretScaling(_), ExperimentKind::Regret)
            | (ExperimentConfig::PsneIdentification(_), ExperimentKind::Psne)
    );
    if !matches {
        let expected = match kind {
            ExperimentKind::Regret => "regret-scaling",
            ExperimentKind::Psne => "psne-identification",
        };
        return Err(Failure::usage(format!("this command needs a {expected} config")));
    }
    if let Some(trials) = args.trials {
        config.set_trials(trials);
    }
    if let Some(seed) = args.seed {
        config.set_master_seed(seed);
    }
    let problems = config.validate();
    if !problems.is_empty() {
        return Err(ExperimentError::InvalidConfig(problems).into());
    }
    Ok(config)
}

fn with_extension(prefix: &Path, format: OutputFormat) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(".");
    name.push(format.extension());
    PathBuf::from(name)
}

fn print_summary(result: &ExperimentResult) {
    for row in &result.rows {
        match row {
            ResultRow::Regret(r) => println!(
                "{:<8} T = {:<8} eps = {:.4}  mean regret = {:>10.3}  [p10 {:.3}, p90 {:.3}]",
                r.algorithm, r.horizon, r.epsilon, r.mean_regret, r.p10, r.p90
            ),
            ResultRow::Psne(r) => println!(
                "d_min = {:<6} t = {:<9} t/OPT = {:>8.4}  success = {:.3}",
                r.d_min, r.t, r.t_over_opt, r.success_rate
            ),
        }
    }
    for fit in &result.fits {
        match fit {
            FitRecord::LogLog { algorithm, t_min, fit: Some(f) } => println!(
                "slope {algorithm}: {:.4} (T >= {t_min}, {} points, r^2 = {:.3})",
                f.slope, f.points, f.r_squared
            ),
            FitRecord::LogLog { algorithm, t_min, fit: None } => {
                println!("slope {algorithm}: undefined (fewer than 2 horizons with T >= {t_min})")
            }
            FitRecord::Threshold { d_min, opt, target, first_t_over_opt, .. } => match first_t_over_opt {
                Some(r) => println!("d_min = {d_min}: OPT = {opt:.1}, success >= {target} first at t/OPT = {r:.4}"),
                None => println!("d_min = {d_min}: OPT = {opt:.1}, success never reached {target}"),
            },
        }
    }
}

fn cmd_experiment(args: &ExperimentArgs, kind: ExperimentKind) -> Result<(), Failure> {
    let config = resolve_config(args, kind)?;
    if args.print_config {
        println!(
            "{}",
            serde_json::to_string_pretty(&config).expect("configs always serialize")
        );
        return Ok(());
    }
    let start = Instant::now();
    let result = run_experiment(&config)?;
    let elapsed = start.elapsed();
    print_summary(&result);
    let mut formats = vec![OutputFormat::Csv, OutputFormat::Json];
    if args.svg {
        formats.push(OutputFormat::Svg);
    }
    for format in formats {
        let path = with_extension(&args.out, format);
        write_results(&result, &path, format)?;
        println!("wrote {}", path.display());
    }
    println!("wall-clock: {:.1} s", elapsed.as_secs_f64());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(num(0.7000000000000001), "0.7");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(250.0), "250");
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(vector(&[0.7, 0.3]), "(0.7, 0.3)");
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn output_paths_append_extension() {
        let p = with_extension(Path::new("out/fig1.desk"), OutputFormat::Csv);
        assert_eq!(p, PathBuf::from("out/fig1.desk.csv"));
    }
}
