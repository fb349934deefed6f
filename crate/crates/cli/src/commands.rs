use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mbfl_core::bayes::{self, ModelFamily, ModelSpec, RankerConfig, Scope};
use mbfl_core::classifier::{
    self, build_dataset, build_query_vector, predict_scores, Activation, ClassifierKind,
    ClassifierModel, TrainConfig,
};
use mbfl_core::eval::{planted_fault_eval, EvalOptions};
use mbfl_core::io::{self, MatrixFormat};
use mbfl_core::sampling::SamplePlan;
use mbfl_core::toy::{self, DEFAULT_STEP_LIMIT};
use mbfl_core::{rank, FailureObservation, KillMatrix, MutationOperator, Ranking, TestId};
use serde::Serialize;

use crate::manifest::RunManifest;

/// Mutation-based fault localisation from ahead-of-time kill matrices.
#[derive(Debug, Parser)]
#[command(name = "mbfl", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mutate a toy program, run its tests and write the kill matrix.
    Analyze(AnalyzeArgs),
    /// Rank methods for an observed failure.
    Localize(LocalizeArgs),
    /// Train a classifier on a kill matrix.
    Train(TrainArgs),
    /// Reduce a kill matrix by mutant sampling.
    Sample(SampleArgs),
    /// Run the planted-fault evaluation harness.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Program source (.toy).
    #[arg(long)]
    program: PathBuf,
    /// Test file (.toytest).
    #[arg(long)]
    tests: PathBuf,
    /// Comma-separated mutation operators.
    #[arg(long, value_delimiter = ',', default_value = "AOR,ROR,LOR,SOR,COR,ORU,LVR,STD")]
    ops: Vec<MutationOperator>,
    #[arg(long, default_value_t = DEFAULT_STEP_LIMIT)]
    step_limit: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Output matrix (.csv or .json).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Em,
    #[value(name = "pm*", alias = "pmstar")]
    PmStar,
    #[value(name = "pm+", alias = "pmplus")]
    PmPlus,
    Lr,
    Mlp,
}

impl ModelArg {
    fn family(self) -> Option<ModelFamily> {
        match self {
            ModelArg::Em => Some(ModelFamily::ExactMatch),
            ModelArg::PmStar => Some(ModelFamily::PartialMultiplicative),
            ModelArg::PmPlus => Some(ModelFamily::PartialAdditive),
            ModelArg::Lr | ModelArg::Mlp => None,
        }
    }

    fn classifier(self) -> Option<ClassifierKind> {
        match self {
            ModelArg::Lr => Some(ClassifierKind::Lr),
            ModelArg::Mlp => Some(ClassifierKind::Mlp),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScopeArg {
    F,
    #[value(alias = "f+p")]
    Fp,
}

impl From<ScopeArg> for Scope {
    fn from(s: ScopeArg) -> Self {
        match s {
            ScopeArg::F => Scope::Failing,
            ScopeArg::Fp => Scope::FailingPassing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Lr,
    Mlp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ActivationArg {
    Relu,
    Tanh,
}

#[derive(Debug, Args)]
struct ObservationArgs {
    /// Observation JSON: {"failing": [...], "passing": [...]}.
    #[arg(long, conflicts_with_all = ["failing", "passing"])]
    observation: Option<PathBuf>,
    /// Comma-separated failing tests.
    #[arg(long, value_delimiter = ',')]
    failing: Vec<String>,
    /// Comma-separated passing tests.
    #[arg(long, value_delimiter = ',', conflicts_with = "rest_pass")]
    passing: Option<Vec<String>>,
    /// Treat every matrix test not listed as failing as passing.
    #[arg(long)]
    rest_pass: bool,
}

impl ObservationArgs {
    fn is_given(&self) -> bool {
        self.observation.is_some() || !self.failing.is_empty()
    }

    fn resolve(&self, matrix: &KillMatrix) -> Result<FailureObservation, CliError> {
        let mut obs = match &self.observation {
            Some(path) => io::load_observation(path)?,
            None => {
                if self.failing.is_empty() {
                    return Err(CliError::Usage(
                        "an observation is required: --observation or --failing".into(),
                    ));
                }
                FailureObservation {
                    failing: self.failing.iter().map(|t| TestId::new(t.as_str())).collect(),
                    passing: self
                        .passing
                        .as_ref()
                        .map(|p| p.iter().map(|t| TestId::new(t.as_str())).collect()),
                }
            }
        };
        if self.rest_pass {
            obs.passing = Some(
                matrix
                    .tests()
                    .iter()
                    .filter(|t| !obs.failing.contains(*t))
                    .cloned()
                    .collect(),
            );
        }
        obs.validate()?;
        Ok(obs)
    }
}

#[derive(Debug, Args)]
struct TrainFlags {
    #[arg(long, default_value_t = 50)]
    hidden_size: usize,
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    #[arg(long, default_value_t = 0.01)]
    learning_rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "relu")]
    activation: ActivationArg,
}

impl TrainFlags {
    fn config(&self) -> TrainConfig {
        TrainConfig {
            hidden_size: self.hidden_size,
            max_iter: self.max_iter,
            learning_rate: self.learning_rate,
            seed: self.seed,
            activation: match self.activation {
                ActivationArg::Relu => Activation::Relu,
                ActivationArg::Tanh => Activation::Tanh,
            },
            ..TrainConfig::default()
        }
    }
}

#[derive(Debug, Args)]
struct LocalizeArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[command(flatten)]
    obs: ObservationArgs,
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long, value_enum)]
    scope: ScopeArg,
    #[arg(long, default_value_t = 0.001)]
    epsilon: f64,
    /// Pre-trained classifier (lr/mlp only); trained on the fly when omitted.
    #[arg(long)]
    model_file: Option<PathBuf>,
    #[command(flatten)]
    train: TrainFlags,
    /// Only report methods ranked within the top K.
    #[arg(long)]
    top_k: Option<usize>,
    /// Ranking output (.csv or .json).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, value_enum, default_value = "fp")]
    scope: ScopeArg,
    /// Failing tests for F-scope training, which restricts the matrix to them.
    #[command(flatten)]
    obs: ObservationArgs,
    #[command(flatten)]
    train: TrainFlags,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("plan").required(true).args(["rate", "per_method"])))]
struct SampleArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Fraction of mutants kept, in (0, 1].
    #[arg(long, value_parser = parse_rate)]
    rate: Option<f64>,
    /// Mutants kept per method.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    per_method: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long, value_enum)]
    scope: ScopeArg,
    #[arg(long, default_value_t = 0.001)]
    epsilon: f64,
    /// Sample the reference matrix uniformly at this rate before localising.
    #[arg(long, value_parser = parse_rate, conflicts_with = "per_method")]
    rate: Option<f64>,
    /// Sample at most N mutants per method before localising.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    per_method: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Report JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Aligned text table.
    #[arg(long)]
    table: Option<PathBuf>,
}

fn parse_rate(s: &str) -> Result<f64, String> {
    let r: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if r > 0.0 && r <= 1.0 {
        Ok(r)
    } else {
        Err(format!("rate must be in (0, 1], got {r}"))
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(mbfl_core::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_domain() => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<mbfl_core::Error> for CliError {
    fn from(e: mbfl_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(e.into())
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Localize(a) => localize(a),
        Command::Train(a) => train(a),
        Command::Sample(a) => sample(a),
        Command::Evaluate(a) => evaluate(a),
    }
}

fn load_matrix(path: &Path) -> Result<KillMatrix, CliError> {
    Ok(io::load_matrix(path, MatrixFormat::from_path(path))?)
}

fn is_json(path: &Path) -> bool {
    MatrixFormat::from_path(path) == MatrixFormat::Json
}

fn write_matrix(matrix: &KillMatrix, out: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    if is_json(out) {
        let json = io::to_json_string(matrix)?;
        fs::write(out, manifest.embed(&json)?)?;
    } else {
        io::save_matrix(matrix, out, MatrixFormat::Csv)?;
        manifest.write_sidecar(out)?;
    }
    Ok(())
}

fn analyze(a: AnalyzeArgs) -> Result<(), CliError> {
    let program_src = fs::read_to_string(&a.program)?;
    let tests_src = fs::read_to_string(&a.tests)?;
    let ops: BTreeSet<MutationOperator> = a.ops.iter().copied().collect();
    if ops.contains(&MutationOperator::Imported) {
        return Err(CliError::Usage("`imported` is not a mutation operator".into()));
    }
    let matrix = toy::analyze(&program_src, &tests_src, &ops, a.step_limit, a.jobs)?;
    #[derive(Serialize)]
    struct Config {
        ops: Vec<&'static str>,
        step_limit: u64,
    }
    let manifest = RunManifest::new("analyze")
        .input("program", &a.program)
        .input("tests", &a.tests)
        .config(Config {
            ops: ops.iter().map(|o| o.tag()).collect(),
            step_limit: a.step_limit,
        });
    write_matrix(&matrix, &a.out, &manifest)?;
    eprintln!(
        "{} mutants x {} tests over {} methods -> {}",
        matrix.num_mutants(),
        matrix.num_tests(),
        matrix.methods().len(),
        a.out.display()
    );
    Ok(())
}

fn localize(a: LocalizeArgs) -> Result<(), CliError> {
    let matrix = load_matrix(&a.matrix)?;
    let obs = a.obs.resolve(&matrix)?;
    let scope = Scope::from(a.scope);
    let mut manifest = RunManifest::new("localize").input("matrix", &a.matrix);
    if let Some(p) = &a.obs.observation {
        manifest = manifest.input("observation", p);
    }

    let (ranking, model_name): (Ranking, String) = match (a.model.family(), a.model.classifier()) {
        (Some(family), _) => {
            if a.model_file.is_some() {
                return Err(CliError::Usage(
                    "--model-file only applies to lr and mlp".into(),
                ));
            }
            let spec = ModelSpec::new(family, scope);
            let config = RankerConfig { epsilon: a.epsilon };
            manifest = manifest.config(config);
            (bayes::localize(&matrix, &obs, spec, &config)?, spec.to_string())
        }
        (None, Some(kind)) => {
            let scores = match &a.model_file {
                Some(path) => {
                    let model = ClassifierModel::load(path)?;
                    if model.kind() != kind {
                        return Err(CliError::Usage(format!(
                            "model file holds a {} model, not {kind}",
                            model.kind()
                        )));
                    }
                    manifest = manifest.input("model_file", path).config(model.config());
                    let query = build_query_vector(&obs, model.test_index(), scope)?;
                    predict_scores(&model, &query)?
                }
                None => {
                    let cfg = a.train.config();
                    manifest = manifest.config(cfg);
                    classifier::localize_with_classifier(&matrix, &obs, kind, scope, &cfg)?.1
                }
            };
            (rank(&scores), format!("{kind}({scope})"))
        }
        (None, None) => unreachable!("every model is a family or a classifier"),
    };
    let manifest = manifest.model(&model_name);

    let ranking = match a.top_k {
        Some(k) => ranking.top(k),
        None => ranking,
    };
    let csv = ranking.to_csv();
    print!("{csv}");
    if let Some(out) = &a.out {
        if is_json(out) {
            fs::write(out, manifest.embed(&format!("{{\"ranking\": {}}}", ranking.to_json()))?)?;
        } else {
            fs::write(out, &csv)?;
            manifest.write_sidecar(out)?;
        }
    }
    Ok(())
}

fn train(a: TrainArgs) -> Result<(), CliError> {
    let matrix = load_matrix(&a.matrix)?;
    let scope = Scope::from(a.scope);
    let training = match scope {
        Scope::FailingPassing => matrix,
        Scope::Failing => {
            if !a.obs.is_given() {
                return Err(CliError::Usage(
                    "F-scope training needs the failing tests (--failing or --observation)".into(),
                ));
            }
            let obs = a.obs.resolve(&matrix)?;
            let cols: Vec<&str> = obs.failing.iter().map(TestId::as_str).collect();
            matrix.restrict(&cols)?
        }
    };
    let data = build_dataset(&training)?;
    let kind = match a.kind {
        KindArg::Lr => ClassifierKind::Lr,
        KindArg::Mlp => ClassifierKind::Mlp,
    };
    let cfg = a.train.config();
    let model = classifier::train(kind, &data, &cfg)?;
    let manifest = RunManifest::new("train")
        .input("matrix", &a.matrix)
        .model(format!("{kind}({scope})"))
        .config(cfg);
    fs::write(&a.out, manifest.embed(&model.to_json())?)?;
    eprintln!(
        "{kind} trained on {} rows; loss {:.6} -> {:.6}",
        data.len(),
        model.loss_curve()[0],
        model.final_loss().unwrap_or(f64::NAN)
    );
    Ok(())
}

fn sample(a: SampleArgs) -> Result<(), CliError> {
    let matrix = load_matrix(&a.matrix)?;
    let plan = match (a.rate, a.per_method) {
        (Some(rate), None) => SamplePlan::Uniform { rate, seed: a.seed },
        (None, Some(n)) => SamplePlan::Stratified {
            n_per_method: n as usize,
            seed: a.seed,
        },
        _ => unreachable!("clap enforces exactly one plan"),
    };
    let sampled = plan.apply(&matrix)?;
    let manifest = RunManifest::new("sample")
        .input("matrix", &a.matrix)
        .config(plan);
    write_matrix(&sampled, &a.out, &manifest)?;
    eprintln!(
        "kept {} of {} mutants -> {}",
        sampled.num_mutants(),
        matrix.num_mutants(),
        a.out.display()
    );
    Ok(())
}

fn evaluate(a: EvaluateArgs) -> Result<(), CliError> {
    let family = a.model.family().ok_or_else(|| {
        CliError::Usage("evaluate supports the counting models em, pm* and pm+".into())
    })?;
    let matrix = load_matrix(&a.matrix)?;
    let spec = ModelSpec::new(family, a.scope.into());
    let config = RankerConfig { epsilon: a.epsilon };
    let sample = match (a.rate, a.per_method) {
        (Some(rate), _) => Some(SamplePlan::Uniform { rate, seed: a.seed }),
        (_, Some(n)) => Some(SamplePlan::Stratified {
            n_per_method: n as usize,
            seed: a.seed,
        }),
        _ => None,
    };
    let options = EvalOptions { jobs: a.jobs, sample };
    let report = planted_fault_eval(&matrix, spec, &config, &options)?;

    #[derive(Serialize)]
    struct Config {
        epsilon: f64,
        sample: Option<SamplePlan>,
        seed: u64,
    }
    let manifest = RunManifest::new("evaluate")
        .input("matrix", &a.matrix)
        .model(spec.to_string())
        .config(Config {
            epsilon: a.epsilon,
            sample,
            seed: a.seed,
        });
    let table = report.to_table();
    print!("{table}");
    if let Some(out) = &a.out {
        fs::write(out, manifest.embed(&report.to_json())?)?;
    }
    if let Some(path) = &a.table {
        fs::write(path, &table)?;
        manifest.write_sidecar(path)?;
    }
    Ok(())
}
