//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 Born-rule violation
//! (including failed quantum certainty and failed synthesis), 3 classification
//! inconsistency.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::audit::{self, AuditReport};
use crate::error::Error;
use crate::models::{self, Objective, Scenario, SupportPattern, SynthesisOptions};
use crate::ontic::{ModelFile, OntologicalModel, ToleranceConfig};
use crate::quantum::born_probability;

pub const THREADS_ENV: &str = "ONTOSCOPE_THREADS";
pub const MIN_GRID_SIZE: usize = 100;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_BORN: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ontoscope",
    version,
    about = "Build and audit discretized ontological models"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a model and write its full audit report.
    Audit(ModelArgs),
    /// Compare predicted probabilities against the Born rule on every pair.
    BornCheck(ModelArgs),
    /// Degree of epistemicity for every ordered pair of distinct states.
    Omega(ModelArgs),
    /// Guessing probability, min-entropy and indeterminism floor of a measurement.
    Randomness(RandomnessArgs),
    /// Tabulate the dimension-dependent bounds.
    Bounds(BoundsArgs),
    /// Synthesize a finite model with linear programs and write it as JSON.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelSpec {
    KsQubit,
    BbOntic,
    File,
    Synth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum ObjectiveArg {
    #[default]
    Feasibility,
    MaxTotalOverlap,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Feasibility => Objective::Feasibility,
            ObjectiveArg::MaxTotalOverlap => Objective::MaxTotalOverlap,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ToleranceArgs {
    #[arg(long)]
    pub eps_residual: Option<f64>,
    #[arg(long)]
    pub eps_support: Option<f64>,
    #[arg(long)]
    pub eps_core: Option<f64>,
}

impl ToleranceArgs {
    fn apply(&self, base: ToleranceConfig) -> Result<ToleranceConfig, Error> {
        let t = ToleranceConfig {
            eps_support: self.eps_support.unwrap_or(base.eps_support),
            eps_core: self.eps_core.unwrap_or(base.eps_core),
            eps_residual: self.eps_residual.unwrap_or(base.eps_residual),
        };
        t.validate()?;
        Ok(t)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SynthParams {
    /// Support pattern JSON (required for synthesized models).
    #[arg(long)]
    pub pattern: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Feasibility)]
    pub objective: ObjectiveArg,
    #[arg(long, default_value_t = models::DEFAULT_MAX_ITERATIONS)]
    pub max_iterations: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: ModelSpec,
    #[arg(long)]
    pub scenario: PathBuf,
    /// Model JSON (with `--model file`).
    #[arg(long)]
    pub model_file: Option<PathBuf>,
    /// Overrides the scenario's grid size for grid models.
    #[arg(long)]
    pub grid_size: Option<usize>,
    #[command(flatten)]
    pub synth: SynthParams,
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RandomnessArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 2)]
    pub d_min: u64,
    #[arg(long, default_value_t = 10)]
    pub d_max: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[command(flatten)]
    pub synth: SynthParams,
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
    /// Where to write the model JSON; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure of a CLI command together with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::BornViolation { .. }
            | Error::CertaintyViolation { .. }
            | Error::SynthesisFailure { .. } => EXIT_BORN,
            _ => EXIT_USAGE,
        };
        CliError {
            code,
            message: err.to_string(),
        }
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError {
        code: EXIT_USAGE,
        message: format!("cannot read {}: {e}", path.display()),
    })
}

fn parse_with_path<T>(path: &Path, parse: impl FnOnce(&str) -> Result<T, Error>) -> CliResult<T> {
    let text = read_file(path)?;
    parse(&text).map_err(|e| CliError {
        code: EXIT_USAGE,
        message: format!("{}: {e}", path.display()),
    })
}

fn emit(out: Option<&Path>, body: &str) -> CliResult {
    match out {
        Some(path) => fs::write(path, body).map_err(|e| CliError {
            code: EXIT_USAGE,
            message: format!("cannot write {}: {e}", path.display()),
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError {
                    code: EXIT_USAGE,
                    message: e.to_string(),
                })
        }
    }
}

fn csv_rows<T: Serialize>(rows: &[T]) -> CliResult<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).map_err(Error::from)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError {
        code: EXIT_USAGE,
        message: e.to_string(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Pretty JSON followed by a `metadata` object holding everything run-dependent.
fn json_with_metadata<T: Serialize>(body: &T) -> CliResult<String> {
    let mut value = serde_json::to_value(body).map_err(Error::from)?;
    let generated = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    if let Value::Object(map) = &mut value {
        map.insert(
            "metadata".into(),
            json!({
                "tool": concat!("ontoscope ", env!("CARGO_PKG_VERSION")),
                "generated_unix": generated,
            }),
        );
    }
    let mut text = serde_json::to_string_pretty(&value).map_err(Error::from)?;
    text.push('\n');
    Ok(text)
}

fn load_scenario(path: &Path) -> CliResult<Scenario> {
    parse_with_path(path, Scenario::from_json)
}

fn build_model(args: &ModelArgs, scenario: &Scenario) -> CliResult<OntologicalModel> {
    let model = match args.model {
        ModelSpec::KsQubit => {
            let grid = args.grid_size.unwrap_or(scenario.grid_size());
            if grid < MIN_GRID_SIZE {
                return Err(CliError {
                    code: EXIT_USAGE,
                    message: format!("grid size must be at least {MIN_GRID_SIZE}, got {grid}"),
                });
            }
            models::build_ks_qubit(&scenario.clone().with_grid_size(grid)?)?
        }
        ModelSpec::BbOntic => models::build_bb_ontic(scenario)?,
        ModelSpec::File => {
            let path = args.model_file.as_deref().ok_or_else(|| CliError {
                code: EXIT_USAGE,
                message: "--model file requires --model-file".into(),
            })?;
            let file = parse_with_path(path, ModelFile::from_json)?;
            let name = path
                .file_name()
                .map(|n| format!("file:{}", n.to_string_lossy()))
                .unwrap_or_else(|| "file".into());
            file.into_model(name, &scenario.state_map(), None)?
        }
        ModelSpec::Synth => {
            let base = ToleranceConfig::atomic();
            synthesize(scenario, &args.synth, args.tolerances.apply(base)?)?.model
        }
    };
    let tolerances = args.tolerances.apply(*model.tolerances())?;
    Ok(model.with_tolerances(tolerances)?)
}

fn synthesize(
    scenario: &Scenario,
    params: &SynthParams,
    tolerances: ToleranceConfig,
) -> CliResult<models::Synthesis> {
    let path = params.pattern.as_deref().ok_or_else(|| CliError {
        code: EXIT_USAGE,
        message: "synthesis requires --pattern".into(),
    })?;
    let pattern = parse_with_path(path, SupportPattern::from_json)?;
    let options = SynthesisOptions {
        max_iterations: params.max_iterations,
        tolerances,
    };
    Ok(models::synthesize_with(
        scenario,
        pattern.n_points(),
        &pattern,
        params.objective.into(),
        &options,
    )?)
}

fn run_audit(args: &ModelArgs) -> CliResult {
    let scenario = load_scenario(&args.scenario)?;
    let model = build_model(args, &scenario)?;
    let report = audit::classify(&model, &scenario)?;
    let body = match args.output.format {
        Format::Json => json_with_metadata(&report)?,
        Format::Csv => csv_rows(&report.pairs)?,
    };
    emit(args.output.out.as_deref(), &body)?;
    if args.output.out.is_some() {
        println!("{}", audit_summary(&report));
    }
    if !report.flags.classification_consistent {
        return Err(CliError {
            code: EXIT_INCONSISTENT,
            message: format!(
                "classification {} contradicts reciprocal_all={} deterministic_all={}",
                report.classification, report.flags.reciprocal_all, report.flags.deterministic_all
            ),
        });
    }
    Ok(())
}

fn audit_summary(report: &AuditReport) -> String {
    format!(
        "{}: {} (certainty={}, reciprocal={}, deterministic={}), {} pairs, max Born residual {:e}",
        report.model,
        report.classification,
        report.flags.certainty_all,
        report.flags.reciprocal_all,
        report.flags.deterministic_all,
        report.pairs.len(),
        report.max_born_residual()
    )
}

#[derive(Serialize)]
struct BornRow {
    psi: String,
    phi: String,
    predicted: f64,
    born: f64,
    residual: f64,
}

#[derive(Serialize)]
struct BornCheckReport {
    model: String,
    eps_residual: f64,
    max_residual: f64,
    passed: bool,
    pairs: Vec<BornRow>,
}

fn run_born_check(args: &ModelArgs) -> CliResult {
    let scenario = load_scenario(&args.scenario)?;
    let model = build_model(args, &scenario)?;
    let mut rows = Vec::new();
    for psi in scenario.labels() {
        for phi in scenario.labels() {
            let predicted = model.predicted_probability(psi, phi)?;
            let born = born_probability(model.state(psi)?, model.state(phi)?)?;
            rows.push(BornRow {
                psi: psi.to_string(),
                phi: phi.to_string(),
                predicted,
                born,
                residual: (predicted - born).abs(),
            });
        }
    }
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let eps = model.tolerances().eps_residual;
    let report = BornCheckReport {
        model: model.name().to_string(),
        eps_residual: eps,
        max_residual,
        passed: max_residual <= eps,
        pairs: rows,
    };
    let body = match args.output.format {
        Format::Json => json_with_metadata(&report)?,
        Format::Csv => csv_rows(&report.pairs)?,
    };
    emit(args.output.out.as_deref(), &body)?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError {
            code: EXIT_BORN,
            message: format!("max Born residual {max_residual:e} exceeds {eps:e}"),
        })
    }
}

#[derive(Serialize)]
struct OmegaRow {
    psi: String,
    phi: String,
    i_q: f64,
    omega: Option<f64>,
}

fn run_omega(args: &ModelArgs) -> CliResult {
    let scenario = load_scenario(&args.scenario)?;
    let model = build_model(args, &scenario)?;
    let mut rows = Vec::new();
    for psi in scenario.labels() {
        for phi in scenario.labels().filter(|&phi| phi != psi) {
            rows.push(OmegaRow {
                psi: psi.to_string(),
                phi: phi.to_string(),
                i_q: born_probability(model.state(psi)?, model.state(phi)?)?,
                omega: audit::omega(&model, psi, phi)?,
            });
        }
    }
    let body = match args.output.format {
        Format::Json => json_with_metadata(&json!({ "model": model.name(), "pairs": rows }))?,
        Format::Csv => csv_rows(&rows)?,
    };
    emit(args.output.out.as_deref(), &body)
}

#[derive(Serialize)]
struct RandomnessRow<'a> {
    preparation: &'a str,
    dim: usize,
    guessing_probability: f64,
    min_entropy_bits: f64,
    indeterminism_floor: f64,
}

fn run_randomness(args: &RandomnessArgs) -> CliResult {
    let scenario = load_scenario(&args.scenario)?;
    let report = audit::randomness_report(&scenario)?;
    let body = match args.output.format {
        Format::Json => json_with_metadata(&report)?,
        Format::Csv => csv_rows(&[RandomnessRow {
            preparation: &report.preparation,
            dim: report.dim,
            guessing_probability: report.guessing_probability,
            min_entropy_bits: report.min_entropy_bits,
            indeterminism_floor: report.indeterminism_floor,
        }])?,
    };
    emit(args.output.out.as_deref(), &body)
}

fn run_bounds(args: &BoundsArgs) -> CliResult {
    let rows = audit::bounds_table(args.d_min, args.d_max)?;
    let body = match args.output.format {
        Format::Json => json_with_metadata(&json!({ "rows": rows }))?,
        Format::Csv => csv_rows(&rows)?,
    };
    emit(args.output.out.as_deref(), &body)
}

fn run_synth(args: &SynthArgs) -> CliResult {
    let scenario = load_scenario(&args.scenario)?;
    let tolerances = args.tolerances.apply(ToleranceConfig::atomic())?;
    let synthesis = synthesize(&scenario, &args.synth, tolerances)?;
    let mut body = ModelFile::from_model(&synthesis.model).to_json()?;
    body.push('\n');
    emit(args.out.as_deref(), &body)?;
    eprintln!(
        "converged after {} iterations, max Born residual {:e}",
        synthesis.iterations, synthesis.max_born_residual
    );
    Ok(())
}

fn configure_threads() -> CliResult {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value.trim().parse().map_err(|_| CliError {
        code: EXIT_USAGE,
        message: format!("{THREADS_ENV} must be a positive integer, got `{value}`"),
    })?;
    // A pool configured earlier in the same process keeps its size.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build_global();
    Ok(())
}

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    configure_threads()?;
    match &config.command {
        Command::Audit(args) => run_audit(args),
        Command::BornCheck(args) => run_born_check(args),
        Command::Omega(args) => run_omega(args),
        Command::Randomness(args) => run_randomness(args),
        Command::Bounds(args) => run_bounds(args),
        Command::Synth(args) => run_synth(args),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&config) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
