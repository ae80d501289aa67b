//! Command-line driver: configuration, trial dispatch and result emission.
//!
//! Output schemas (stable field order):
//!
//! * JSON: one object `{tool_version, command, instance, parameters, trials, best_value,
//!   best_seed, best_solution, validation}`. Each trial is `{seed, value, steps,
//!   temperatures, flags}`. Floats carry 17 significant digits.
//! * CSV: header `record,instance,seed,value,steps,temperatures,flags`. Solves write one
//!   `trial` row per trial then a `best` row. `validate` writes one row per metric,
//!   with the metric name in `record`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mcpp_core::maxcut::{informative_schedule, parse_gset, solve_maxkcut};
use mcpp_core::polynomial::Polynomial;
use mcpp_core::solver::sample_initial;
use mcpp_core::stardisc::{default_theta, parse_points, solve_stardisc};
use mcpp_core::validation::{
    boltzmann_distribution, build_ctmc, certify_equilibrium, check_detailed_balance,
    mean_field_gap, stationary_distribution,
};
use mcpp_core::{AnnealSchedule, Partition, SolveFlags, StepController};
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

pub const TOOL_VERSION: &str = concat!("mcpp-ode ", env!("CARGO_PKG_VERSION"));

/// Caps the number of concurrently running trials.
pub const THREADS_ENV: &str = "MCPP_ODE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "mcpp-ode",
    version,
    about = "Annealed softmax ODE solver for MCPP instances"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// MAX-k-CUT on a G-Set graph file.
    Maxcut {
        instance: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Lower t1 below the temperature at which the uniform state turns stable.
        #[arg(long)]
        t1_auto: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Lower bound on the star discrepancy of a point file (`N d` header, then rows).
    Stardisc {
        instance: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Build a random small instance and report the validation diagnostics.
    Validate {
        /// Block sizes, e.g. `2x3x2`.
        #[arg(long, default_value = "2x2")]
        size: String,
        #[arg(long, default_value_t = 1.0)]
        temp: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Solver parameters; unset values take the per-problem defaults.
#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub eps0: Option<f64>,
    /// Step error tolerance.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Step adjust ratio.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub tol_eq: Option<f64>,
    /// FE steps allowed per temperature.
    #[arg(long)]
    pub max_steps: Option<usize>,
    #[arg(long)]
    pub max_temps: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("internal failure: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

impl From<mcpp_core::Error> for CliError {
    fn from(e: mcpp_core::Error) -> Self {
        // every core error stems from the instance or the parameters
        CliError::Config(e.to_string())
    }
}

/// Serializes floats with 17 significant digits, non-finite values as `null`.
pub mod f17 {
    use serde::Serializer;
    use serde_json::value::RawValue;

    pub fn format(x: f64) -> String {
        if x.is_finite() {
            format!("{x:.16e}")
        } else {
            "null".to_string()
        }
    }

    fn raw<S: Serializer>(x: f64, s: S) -> Result<S::Ok, S::Error> {
        let v = RawValue::from_string(format(x)).map_err(serde::ser::Error::custom)?;
        s.serialize_some(&v)
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        raw(*x, s)
    }

    pub mod option {
        use serde::Serializer;

        pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match x {
                Some(v) => super::raw(*v, s),
                None => s.serialize_none(),
            }
        }
    }

    pub mod vec {
        use serde::ser::SerializeSeq;
        use serde::Serializer;

        struct One(f64);

        impl serde::Serialize for One {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                super::raw(self.0, s)
            }
        }

        pub fn serialize<S: Serializer>(x: &[f64], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(x.len()))?;
            for &v in x {
                seq.serialize_element(&One(v))?;
            }
            seq.end()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub k: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    #[serde(serialize_with = "f17::serialize")]
    pub t1: f64,
    #[serde(serialize_with = "f17::serialize")]
    pub gamma: f64,
    #[serde(serialize_with = "f17::serialize")]
    pub eps0: f64,
    #[serde(serialize_with = "f17::serialize")]
    pub theta: f64,
    #[serde(serialize_with = "f17::serialize")]
    pub rho: f64,
    #[serde(serialize_with = "f17::serialize")]
    pub tol_eq: f64,
    pub max_steps: usize,
    pub max_temps: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialFlags {
    pub certified: bool,
    pub stalled: bool,
    pub budget_exhausted: bool,
    pub step_limit_hits: usize,
}

impl TrialFlags {
    fn single(f: SolveFlags) -> Self {
        TrialFlags {
            certified: f.certified,
            stalled: f.stalled,
            budget_exhausted: f.budget_exhausted,
            step_limit_hits: f.step_limit_hits,
        }
    }

    /// Both box problems of a star-discrepancy trial; certified only if both were.
    fn pair(a: SolveFlags, b: SolveFlags) -> Self {
        TrialFlags {
            certified: a.certified && b.certified,
            stalled: a.stalled || b.stalled,
            budget_exhausted: a.budget_exhausted || b.budget_exhausted,
            step_limit_hits: a.step_limit_hits + b.step_limit_hits,
        }
    }

    /// `|`-joined names of the set flags, for CSV.
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.certified {
            parts.push("certified".to_string());
        }
        if self.stalled {
            parts.push("stalled".to_string());
        }
        if self.budget_exhausted {
            parts.push("budget_exhausted".to_string());
        }
        if self.step_limit_hits > 0 {
            parts.push(format!("step_limit_hits={}", self.step_limit_hits));
        }
        parts.join("|")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    #[serde(serialize_with = "f17::serialize")]
    pub value: f64,
    pub steps: usize,
    pub temperatures: usize,
    pub flags: TrialFlags,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BestSolution {
    /// One part label per vertex.
    Labels(Vec<usize>),
    /// Corner of the box attaining the value.
    Point(#[serde(serialize_with = "f17::vec::serialize")] Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub block_sizes: Vec<usize>,
    #[serde(serialize_with = "f17::serialize")]
    pub temperature: f64,
    pub states: usize,
    #[serde(serialize_with = "f17::serialize")]
    pub detailed_balance_residual: f64,
    /// `‖π − Boltzmann‖_∞` for the solved stationary distribution.
    #[serde(serialize_with = "f17::serialize")]
    pub stationary_error: f64,
    /// `‖ȳ − E[x]‖_∞`, measured only.
    #[serde(serialize_with = "f17::serialize")]
    pub mean_field_gap: f64,
    #[serde(serialize_with = "f17::serialize")]
    pub epsilon: f64,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub tool_version: String,
    pub command: String,
    pub instance: String,
    pub parameters: Option<Parameters>,
    pub trials: Vec<TrialRecord>,
    #[serde(serialize_with = "f17::option::serialize")]
    pub best_value: Option<f64>,
    pub best_seed: Option<u64>,
    pub best_solution: Option<BestSolution>,
    pub validation: Option<ValidationSummary>,
}

impl ResultRecord {
    fn solve(command: &str, instance: String, parameters: Parameters) -> Self {
        ResultRecord {
            tool_version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            instance,
            parameters: Some(parameters),
            trials: Vec::new(),
            best_value: None,
            best_seed: None,
            best_solution: None,
            validation: None,
        }
    }
}

/// Serializes a record; JSON ends with a newline.
pub fn emit(record: &ResultRecord, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(record)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => emit_csv(record),
    }
}

fn emit_csv(record: &ResultRecord) -> Result<String, CliError> {
    let internal = |e: csv::Error| CliError::Internal(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "record",
        "instance",
        "seed",
        "value",
        "steps",
        "temperatures",
        "flags",
    ])
    .map_err(internal)?;
    let inst = record.instance.as_str();
    for t in &record.trials {
        w.write_record([
            "trial",
            inst,
            &t.seed.to_string(),
            &f17::format(t.value),
            &t.steps.to_string(),
            &t.temperatures.to_string(),
            &t.flags.label(),
        ])
        .map_err(internal)?;
    }
    if let Some(v) = &record.validation {
        let seed = record
            .parameters
            .as_ref()
            .map(|p| p.seed.to_string())
            .unwrap_or_default();
        for (name, value) in [
            ("detailed_balance_residual", v.detailed_balance_residual),
            ("stationary_error", v.stationary_error),
            ("mean_field_gap", v.mean_field_gap),
            ("epsilon", v.epsilon),
        ] {
            w.write_record([name, inst, &seed, &f17::format(value), "", "", ""])
                .map_err(internal)?;
        }
    } else {
        let best = record.best_value.map(f17::format).unwrap_or_default();
        let seed = record.best_seed.map(|s| s.to_string()).unwrap_or_default();
        w.write_record(["best", inst, &seed, &best, "", "", ""])
            .map_err(internal)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

fn instance_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn read_instance(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!(
            "--{name} must be positive, got {v}"
        )))
    }
}

/// Applies the overrides on top of `base`, validating everything.
fn resolve(
    args: &SolverArgs,
    mut base: AnnealSchedule,
    default_theta: f64,
) -> Result<(AnnealSchedule, StepController, Parameters), CliError> {
    if args.trials == 0 {
        return Err(CliError::Config("--trials must be positive".into()));
    }
    if let Some(v) = args.t1 {
        base.t1 = positive("t1", v)?;
    }
    if let Some(v) = args.gamma {
        base.gamma = v;
    }
    if let Some(v) = args.eps0 {
        base.eps0 = positive("eps0", v)?;
    }
    if let Some(v) = args.tol_eq {
        base.limits.tol_eq = positive("tol-eq", v)?;
    }
    if let Some(v) = args.max_steps {
        base.limits.max_steps = v;
    }
    if let Some(v) = args.max_temps {
        base.max_temps = v;
    }
    base.validate()?;
    let theta = positive("theta", args.theta.unwrap_or(default_theta))?;
    let ctrl = StepController::new(theta, args.rho.unwrap_or(1.1))?;
    let params = Parameters {
        k: None,
        trials: args.trials,
        seed: args.seed,
        t1: base.t1,
        gamma: base.gamma,
        eps0: base.eps0,
        theta,
        rho: ctrl.rho,
        tol_eq: base.limits.tol_eq,
        max_steps: base.limits.max_steps,
        max_temps: base.max_temps,
    };
    Ok((base, ctrl, params))
}

fn run_maxcut(
    path: &Path,
    k: usize,
    t1_auto: bool,
    args: &SolverArgs,
) -> Result<ResultRecord, CliError> {
    let graph = parse_gset(&read_instance(path)?)?;
    let base = if t1_auto {
        informative_schedule(&graph, k)
    } else {
        AnnealSchedule::maxcut_default()
    };
    let (schedule, ctrl, mut params) = resolve(args, base, 1e-5)?;
    params.k = Some(k);
    let report = solve_maxkcut(&graph, k, args.trials, &schedule, &ctrl, args.seed)?;
    let mut rec = ResultRecord::solve("maxcut", instance_id(path), params);
    rec.trials = report
        .trials
        .iter()
        .map(|t| TrialRecord {
            seed: t.seed,
            value: t.cut,
            steps: t.steps,
            temperatures: t.temperatures,
            flags: TrialFlags::single(t.flags),
        })
        .collect();
    let best = report.best();
    rec.best_value = Some(best.cut);
    rec.best_seed = Some(best.seed);
    rec.best_solution = Some(BestSolution::Labels(best.assignment.labels.clone()));
    Ok(rec)
}

fn run_stardisc(path: &Path, args: &SolverArgs) -> Result<ResultRecord, CliError> {
    let points = parse_points(&read_instance(path)?)?;
    let (schedule, ctrl, params) = resolve(
        args,
        AnnealSchedule::stardisc_default(),
        default_theta(&points),
    )?;
    let report = solve_stardisc(&points, args.trials, &schedule, &ctrl, args.seed)?;
    let mut rec = ResultRecord::solve("stardisc", instance_id(path), params);
    rec.trials = report
        .trials
        .iter()
        .map(|t| TrialRecord {
            seed: t.seed,
            value: t.value(),
            steps: t.steps,
            temperatures: t.temperatures,
            flags: TrialFlags::pair(t.open_flags, t.closed_flags),
        })
        .collect();
    let best = report.best();
    rec.best_value = Some(best.value());
    rec.best_seed = Some(best.seed);
    let corner = if best.open_value >= best.closed_value {
        &best.open_corner
    } else {
        &best.closed_corner
    };
    rec.best_solution = Some(BestSolution::Point(corner.clone()));
    Ok(rec)
}

fn parse_size(size: &str) -> Result<Vec<usize>, CliError> {
    size.split('x')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Config(format!("--size expects e.g. 2x3, got {size:?}")))
}

fn run_validate(size: &str, temp: f64, seed: u64) -> Result<ResultRecord, CliError> {
    let sizes = parse_size(size)?;
    let temp = positive("temp", temp)?;
    let p = Partition::new(sizes.clone())?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let f = Polynomial::random(&p, 3, 2 * p.num_blocks() + 2, &mut rng);
    let ctmc = build_ctmc(&f, temp)?;
    let pi = stationary_distribution(&ctmc)?;
    let boltzmann = boltzmann_distribution(&ctmc);
    let stationary_error = pi
        .iter()
        .zip(&boltzmann)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let y0 = sample_initial(&p, seed);
    let gap = mean_field_gap(&f, &ctmc, y0.as_slice())?;

    let schedule = AnnealSchedule::new(temp, 0.95, 1e-3)?;
    let ctrl = StepController::new(1e-8, 1.1)?;
    let eq = mcpp_core::solver::integrate_to_equilibrium(
        &f,
        y0.as_slice(),
        temp,
        &mut ctrl.clone(),
        &schedule.limits,
    )?;
    let cert = certify_equilibrium(&eq.state, &f, temp)?;

    let mut instance = String::new();
    let _ = write!(instance, "random-{size}-seed{seed}");
    Ok(ResultRecord {
        tool_version: TOOL_VERSION.to_string(),
        command: "validate".to_string(),
        instance,
        parameters: None,
        trials: Vec::new(),
        best_value: None,
        best_seed: None,
        best_solution: None,
        validation: Some(ValidationSummary {
            block_sizes: sizes,
            temperature: temp,
            states: ctmc.num_states(),
            detailed_balance_residual: check_detailed_balance(&ctmc),
            stationary_error,
            mean_field_gap: gap,
            epsilon: cert.epsilon,
            certified: cert.passed(),
        }),
    })
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::Config(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))
        })?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Internal(e.to_string()))
}

/// Runs the configured command and returns its record.
pub fn run(config: &RunConfig) -> Result<ResultRecord, CliError> {
    let pool = thread_pool()?;
    pool.install(|| match &config.command {
        Command::Maxcut {
            instance,
            k,
            t1_auto,
            solver,
        } => run_maxcut(instance, *k, *t1_auto, solver),
        Command::Stardisc { instance, solver } => run_stardisc(instance, solver),
        Command::Validate { size, temp, seed } => run_validate(size, *temp, *seed),
    })
}

/// Runs and writes the result where the config says.
pub fn run_and_emit(config: &RunConfig) -> Result<(), CliError> {
    let text = emit(&run(config)?, config.format)?;
    match &config.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
