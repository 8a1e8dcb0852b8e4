//! `flipbound` command line: flipping probabilities, bound evaluation,
//! training and the experiment runners.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error. Errors are printed as
//! a single line `error[usage]: …` or `error[data]: …` on stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use flipbound::bounds::{
    self, bound_compressive_exact, bound_compressive_margin, bound_compressive_split, bound_dataspace,
    bound_dataspace_pointwise_k, bound_ensemble_exploss, bound_ensemble_margin, bound_ldm, margin_profile,
    Constants, Ensemble, MarginProfile, MulticlassScheme,
};
use flipbound::flipkernel::{self, Angle, EntryFamily};
use flipbound::harness::{self, ExperimentReport};
use flipbound::optimizer::{self, ErmMode, TrainConfig};
use flipbound::projection::{self, EntryDistribution, ProjectionSpec};
use flipbound::{Dataset, Error, Matrix};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "flipbound", version, about = "Random-projection flipping probabilities and zero-one loss bounds")]
struct Cli {
    /// Seed for every random component.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Confidence parameter δ.
    #[arg(long, global = true, default_value_t = 0.05)]
    delta: f64,
    /// Output file (models, CSV reports, projected data).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// File of `key = value` lines supplying defaults for long flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Flipping probability f_k(θ) (exact, Chernoff or Monte-Carlo).
    Flip(FlipArgs),
    /// Randomly project a CSV dataset to k dimensions.
    Project(ProjectArgs),
    /// Evaluate a generalization bound.
    Bound {
        #[command(subcommand)]
        kind: BoundCommand,
    },
    /// Monte-Carlo Gaussian width of a point set.
    Width(WidthArgs),
    /// Sufficient projection dimension.
    Suffk {
        #[command(subcommand)]
        kind: SuffkCommand,
    },
    /// Train the bound-minimizing classifier.
    Train(TrainArgs),
    /// Zero-one ERM on low-dimensional data.
    Erm(ErmArgs),
    /// Run an experiment and emit a CSV report.
    Experiment {
        #[command(subcommand)]
        kind: ExperimentCommand,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Method {
    Exact,
    ChernoffGaussian,
    ChernoffSubgaussian,
    MonteCarlo,
}

#[derive(Args, Debug)]
struct FlipArgs {
    #[arg(long)]
    k: usize,
    /// Angle in radians.
    #[arg(long, conflicts_with = "cosine", required_unless_present = "cosine")]
    theta: Option<f64>,
    #[arg(long)]
    cosine: Option<f64>,
    #[arg(long, value_enum, default_value_t = Method::Exact)]
    method: Method,
    /// Monte-Carlo trials.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// Ambient dimension of the Monte-Carlo embedding.
    #[arg(long, default_value_t = 10)]
    dim: usize,
    #[arg(long, value_enum, default_value_t = Family::Gaussian)]
    family: Family,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Family {
    Gaussian,
    Rademacher,
}

impl Family {
    fn distribution(self) -> EntryDistribution {
        match self {
            Family::Gaussian => EntryDistribution::Gaussian { sigma: 1.0 },
            Family::Rademacher => EntryDistribution::Rademacher,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct DataArgs {
    /// CSV file with a header row.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "label")]
    label_column: String,
    #[arg(long, default_value = "1")]
    positive_label: String,
}

impl DataArgs {
    fn load(&self) -> flipbound::Result<Dataset> {
        harness::load_csv(&self.data, &self.label_column, &self.positive_label)
    }
}

#[derive(Args, Debug)]
struct ProjectArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value_t = Family::Gaussian)]
    family: Family,
}

#[derive(Args, Debug)]
struct ProfileArgs {
    /// Cosines, one per line (alternative to --data/--model).
    #[arg(long, conflicts_with_all = ["data", "model"])]
    cosines: Option<PathBuf>,
    #[arg(long, requires = "model")]
    data: Option<PathBuf>,
    /// Model JSON.
    #[arg(long, requires = "data")]
    model: Option<PathBuf>,
    #[arg(long, default_value = "label")]
    label_column: String,
    #[arg(long, default_value = "1")]
    positive_label: String,
}

impl ProfileArgs {
    fn load(&self) -> flipbound::Result<MarginProfile> {
        if let Some(path) = &self.cosines {
            return MarginProfile::from_cosines(read_numbers(path)?);
        }
        match (&self.data, &self.model) {
            (Some(d), Some(m)) => {
                let ds = harness::load_csv(d, &self.label_column, &self.positive_label)?;
                let model = harness::load_model(m)?;
                margin_profile(&ds, &model)
            }
            _ => Err(Error::InvalidParameter("give --cosines or both --data and --model".into())),
        }
    }
}

#[derive(Args, Debug)]
struct ConstantArgs {
    /// VC-bound constant c.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Constant C of the Gaussian-width condition.
    #[arg(long, default_value_t = 1.0)]
    big_c: f64,
    /// Subgaussian norm bound K.
    #[arg(long, default_value_t = 1.0)]
    big_k: f64,
}

impl ConstantArgs {
    fn constants(&self) -> Constants {
        Constants {
            c: self.c,
            big_c: self.big_c,
            big_k: self.big_k,
        }
    }
}

#[derive(Subcommand, Debug)]
enum BoundCommand {
    /// Dataspace bound (optionally uniform over k, or with per-point k).
    Dataspace {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, required_unless_present = "ks")]
        k: Option<usize>,
        /// Union bound over k.
        #[arg(long)]
        srm: bool,
        /// Per-point k values, one per line.
        #[arg(long, conflicts_with = "k")]
        ks: Option<PathBuf>,
    },
    /// Compressive ERM bound, split form.
    Compressive {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        constants: ConstantArgs,
    },
    /// Compressive ERM bound with margin γ.
    Margin {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        gamma: f64,
        #[command(flatten)]
        constants: ConstantArgs,
    },
    /// Compressive ERM bound using the exact flipping probability.
    Exact {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        constants: ConstantArgs,
    },
    /// Margin-distribution bound.
    Ldm {
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Bound for a weighted vote of ±1 base learners.
    Ensemble {
        /// CSV of base-learner predictions (±1), one column per learner, plus the label column.
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long, default_value = "label")]
        label_column: String,
        #[arg(long, default_value = "1")]
        positive_label: String,
        /// Comma-separated weights with ‖α‖₁ ≤ 1.
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<f64>,
        /// VC dimension of the base class.
        #[arg(long)]
        vc_dim: usize,
        /// Projection dimension for the margin form; omit for the exponential-loss form.
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        constants: ConstantArgs,
    },
}

#[derive(Args, Debug)]
struct WidthArgs {
    /// CSV of points (header row, numeric columns only).
    #[arg(long)]
    points: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
}

#[derive(Subcommand, Debug)]
enum SuffkCommand {
    /// Margin-based requirement, using --delta.
    Margin {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        epsilon: f64,
    },
    /// Gaussian-width requirement, using --delta.
    Width {
        #[arg(long)]
        width: f64,
        #[arg(long)]
        gamma: f64,
        #[command(flatten)]
        constants: ConstantArgs,
    },
    /// Width requirement for an m-class reduction, using --delta.
    Multiclass {
        #[arg(long)]
        width: f64,
        #[arg(long)]
        classes: usize,
        #[arg(long)]
        gamma: f64,
        #[arg(long, value_enum, default_value_t = Scheme::OneVsAll)]
        scheme: Scheme,
        #[command(flatten)]
        constants: ConstantArgs,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Scheme {
    OneVsAll,
    OneVsOne,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Choose k by 5-fold cross-validation over --k-grid.
    #[arg(long)]
    cv: bool,
    #[arg(long, value_delimiter = ',', default_values_t = optimizer::DEFAULT_K_GRID)]
    k_grid: Vec<usize>,
    #[arg(long, default_value_t = 300)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-7)]
    grad_tol: f64,
    #[arg(long, default_value_t = 4)]
    restarts: usize,
    /// Radius of the shift ball (default: a quarter of the centroid distance).
    #[arg(long)]
    r_shift: Option<f64>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Mode {
    Exact,
    Surrogate,
}

#[derive(Args, Debug)]
struct ErmArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Loss parameter of the surrogate trainer.
    #[arg(long, default_value_t = 5)]
    surrogate_k: usize,
}

#[derive(Subcommand, Debug)]
enum ExperimentCommand {
    /// Flip/complexity trade-off of the dataspace bound across k.
    Tradeoff {
        #[arg(long, default_value_t = 5000)]
        n: usize,
        #[arg(long, default_value_t = 1.0 / 9.0)]
        cos_variance: f64,
        #[arg(long, default_value_t = 200)]
        k_max: usize,
    },
    /// Bound against holdout error for L_q-regularised logistic fits.
    Modelselect {
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 1.0, 2.0])]
        q_grid: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.001, 0.003, 0.01, 0.02, 0.03])]
        lambda_grid: Vec<f64>,
        #[arg(long, default_value_t = 5)]
        repetitions: u64,
        #[arg(long, default_value_t = 10)]
        k: usize,
    },
    /// Compressive ERM end to end on a CSV dataset.
    Compressive {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1, 2, 3])]
        k_grid: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Family::Gaussian)]
        family: Family,
        #[arg(long, default_value_t = 5)]
        repetitions: u64,
    },
    /// Bound minimizer against plain logistic regression.
    Twogauss {
        #[arg(long, default_value_t = 5)]
        repetitions: u64,
        /// Use a CSV dataset with random half/half splits instead of generated data.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, default_value = "label")]
        label_column: String,
        #[arg(long, default_value = "1")]
        positive_label: String,
        /// Fixed k instead of cross-validation.
        #[arg(long)]
        k: Option<usize>,
    },
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string().replace('\n', " ");
        if e.is_usage() {
            Failure::Usage(msg)
        } else {
            Failure::Data(msg)
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(format!("io error: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read_numbers(path: &Path) -> flipbound::Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        out.push(
            t.parse()
                .map_err(|_| Error::Data(format!("{} line {}: `{t}` is not a number", path.display(), i + 1)))?,
        );
    }
    Ok(out)
}

fn read_points(path: &Path) -> flipbound::Result<Matrix> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::Data(format!("{} line {line}: `{f}` is not a number", path.display())))
            })
            .collect::<flipbound::Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Data(format!("{}: no points", path.display())));
    }
    Matrix::from_rows(&rows)
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n"))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn pretty<T: serde::Serialize>(v: &T) -> CliResult<String> {
    serde_json::to_string_pretty(v).map_err(|e| Failure::Data(e.to_string()))
}

fn emit_report(out: &Option<PathBuf>, report: &ExperimentReport) -> CliResult<()> {
    match out {
        Some(p) => {
            harness::save_report(report, p)?;
            let meta = json!({
                "name": report.name,
                "params": report.params,
                "summary": report.summary,
                "seed": report.seed,
                "rows": report.rows.len(),
                "out": p.display().to_string(),
            });
            println!("{}", pretty(&meta)?);
        }
        None => {
            let dir = tempdir_path();
            harness::save_report(report, &dir)?;
            let text = std::fs::read_to_string(&dir)?;
            let _ = std::fs::remove_file(&dir);
            print!("{text}");
            std::io::stdout().flush()?;
        }
    }
    Ok(())
}

fn tempdir_path() -> PathBuf {
    std::env::temp_dir().join(format!("flipbound-report-{}.csv", std::process::id()))
}

fn run(cli: Cli) -> CliResult<()> {
    let delta = cli.delta;
    let seed = cli.seed;
    match cli.command {
        Command::Flip(a) => {
            let angle = match (a.theta, a.cosine) {
                (Some(t), None) => Angle::from_theta(t)?,
                (None, Some(c)) => Angle::from_cosine(c)?,
                _ => return Err(Failure::Usage("give exactly one of --theta or --cosine".into())),
            };
            let eval = match a.method {
                Method::Exact => flipkernel::flip_exact_eval(a.k, angle)?,
                Method::ChernoffGaussian => flipkernel::flip_chernoff_eval(a.k, angle, EntryFamily::Gaussian)?,
                Method::ChernoffSubgaussian => flipkernel::flip_chernoff_eval(a.k, angle, EntryFamily::Subgaussian)?,
                Method::MonteCarlo => {
                    let (h, u) = projection::vector_pair_at_angle(a.dim, angle.cosine())?;
                    let spec = ProjectionSpec {
                        k: a.k,
                        d: a.dim,
                        distribution: a.family.distribution(),
                        seed,
                    };
                    projection::mc_flip_rate(&h, &u, &spec, a.trials)?.to_eval(a.k, angle.cosine())
                }
            };
            emit(&cli.out, &pretty(&eval)?)
        }
        Command::Project(a) => {
            let ds = a.data.load()?;
            let spec = ProjectionSpec {
                k: a.k,
                d: ds.d(),
                distribution: a.family.distribution(),
                seed,
            };
            let p = projection::project(&ds, &spec)?;
            match &cli.out {
                Some(path) => harness::save_csv(&p.data, path)?,
                None => {
                    let stdout = std::io::stdout();
                    harness::write_csv(&p.data, stdout.lock())?;
                }
            }
            Ok(())
        }
        Command::Bound { kind } => {
            let b = match kind {
                BoundCommand::Dataspace { profile, k, srm, ks } => {
                    let prof = profile.load()?;
                    match (k, ks) {
                        (_, Some(path)) => {
                            let ks = read_numbers(&path)?
                                .into_iter()
                                .map(|v| {
                                    if v >= 1.0 && v.fract() == 0.0 {
                                        Ok(v as usize)
                                    } else {
                                        Err(Failure::Usage(format!("per-point k must be a positive integer, got {v}")))
                                    }
                                })
                                .collect::<CliResult<Vec<usize>>>()?;
                            bound_dataspace_pointwise_k(&prof, &ks, delta)?
                        }
                        (Some(k), None) => bound_dataspace(&prof, k, delta, srm)?,
                        (None, None) => return Err(Failure::Usage("give --k or --ks".into())),
                    }
                }
                BoundCommand::Compressive { profile, k, constants } => {
                    bound_compressive_split(&profile.load()?, k, delta, constants.constants())?
                }
                BoundCommand::Margin {
                    profile,
                    k,
                    gamma,
                    constants,
                } => bound_compressive_margin(&profile.load()?, k, delta, gamma, constants.constants())?,
                BoundCommand::Exact { profile, k, constants } => {
                    bound_compressive_exact(&profile.load()?, k, delta, constants.constants())?
                }
                BoundCommand::Ldm { profile } => bound_ldm(&profile.load()?, delta)?,
                BoundCommand::Ensemble {
                    predictions,
                    label_column,
                    positive_label,
                    alpha,
                    vc_dim,
                    k,
                    constants,
                } => {
                    let ds = harness::load_csv(&predictions, &label_column, &positive_label)?;
                    let ens = Ensemble::new(ds.x().clone(), alpha, ds.labels().to_vec())?;
                    match k {
                        Some(k) => bound_ensemble_margin(&ens, k, delta, vc_dim, constants.constants())?,
                        None => bound_ensemble_exploss(&ens, delta, vc_dim, constants.constants())?,
                    }
                }
            };
            emit(&cli.out, &pretty(&b)?)
        }
        Command::Width(a) => {
            let pts = read_points(&a.points)?;
            let w = bounds::gaussian_width_mc(&pts, a.samples, seed)?;
            emit(&cli.out, &pretty(&w)?)
        }
        Command::Suffk { kind } => {
            let k = match kind {
                SuffkCommand::Margin { gamma, epsilon } => bounds::sufficient_k_margin(gamma, epsilon, delta)?,
                SuffkCommand::Width { width, gamma, constants } => {
                    bounds::sufficient_k_width(width, gamma, delta, constants.constants())?
                }
                SuffkCommand::Multiclass {
                    width,
                    classes,
                    gamma,
                    scheme,
                    constants,
                } => {
                    let scheme = match scheme {
                        Scheme::OneVsAll => MulticlassScheme::OneVsAll,
                        Scheme::OneVsOne => MulticlassScheme::OneVsOne,
                    };
                    bounds::sufficient_k_multiclass(width, classes, gamma, delta, constants.constants(), scheme)?
                }
            };
            emit(&cli.out, &json!({ "k": k }).to_string())
        }
        Command::Train(a) => {
            let ds = a.data.load()?;
            let mut cfg = TrainConfig {
                k: a.k,
                max_iters: a.max_iters,
                grad_tol: a.grad_tol,
                restarts: a.restarts,
                r_shift: a.r_shift,
                seed,
                ..TrainConfig::default()
            };
            cfg.validate()?;
            let mut cv_scores = None;
            if a.cv {
                let sel = optimizer::select_k(&ds, &a.k_grid, 5, &cfg)?;
                cfg.k = sel.k;
                cv_scores = Some(sel.scores);
            }
            let out = optimizer::train_bound_minimizer_traced(&ds, &cfg)?;
            let summary = json!({
                "k": cfg.k,
                "objective": out.model.meta.objective,
                "iterations": out.model.meta.iterations,
                "training_error": out.model.error_rate(&ds)?,
                "r_shift": out.r_shift,
                "shift_epsilon": out.shift_epsilon,
                "cv_scores": cv_scores,
            });
            match &cli.out {
                Some(p) => {
                    harness::save_model(&out.model, p)?;
                    println!("{}", pretty(&summary)?);
                }
                None => println!("{}", harness::model_to_json(&out.model)?),
            }
            Ok(())
        }
        Command::Erm(a) => {
            let ds = a.data.load()?;
            let mode = match a.mode {
                Mode::Exact => ErmMode::Exact,
                Mode::Surrogate => ErmMode::Surrogate {
                    config: TrainConfig {
                        k: a.surrogate_k,
                        seed,
                        ..TrainConfig::default()
                    },
                },
            };
            let model = optimizer::train_erm_lowdim(&ds, mode)?;
            match &cli.out {
                Some(p) => {
                    harness::save_model(&model, p)?;
                    println!("{}", json!({ "training_error": model.error_rate(&ds)? }));
                }
                None => println!("{}", harness::model_to_json(&model)?),
            }
            Ok(())
        }
        Command::Experiment { kind } => {
            let report = match kind {
                ExperimentCommand::Tradeoff { n, cos_variance, k_max } => {
                    harness::experiment_tradeoff(&harness::TradeoffParams {
                        n,
                        cos_variance,
                        delta,
                        k_grid: (1..=k_max).collect(),
                        seed,
                    })?
                }
                ExperimentCommand::Modelselect {
                    q_grid,
                    lambda_grid,
                    repetitions,
                    k,
                } => harness::experiment_modelselect(&harness::ModelSelectParams {
                    q_grid,
                    lambda_grid,
                    seeds: (0..repetitions).map(|r| seed.wrapping_add(r)).collect(),
                    k,
                    delta,
                    ..Default::default()
                })?,
                ExperimentCommand::Compressive {
                    data,
                    k_grid,
                    family,
                    repetitions,
                } => {
                    let ds = data.load()?;
                    harness::experiment_compressive(
                        &ds,
                        &harness::CompressiveParams {
                            k_grid,
                            family: family.distribution(),
                            delta,
                            seeds: (0..repetitions).map(|r| seed.wrapping_add(r)).collect(),
                            ..Default::default()
                        },
                    )?
                }
                ExperimentCommand::Twogauss {
                    repetitions,
                    data,
                    label_column,
                    positive_label,
                    k,
                } => {
                    let dataset = match &data {
                        Some(p) => Some(harness::load_csv(p, &label_column, &positive_label)?),
                        None => None,
                    };
                    // 50 random half/half splits by default when a dataset is given
                    let reps = if dataset.is_some() && repetitions == 5 { 50 } else { repetitions };
                    let mut p = harness::TwoGaussParams {
                        seeds: (0..reps).map(|r| seed.wrapping_add(r)).collect(),
                        data: dataset,
                        ..Default::default()
                    };
                    if let Some(k) = k {
                        p.select_k = false;
                        p.train.k = k;
                    }
                    harness::experiment_twogauss(&p)?
                }
            };
            emit_report(&cli.out, &report)
        }
    }
}

/// Appends `--key value` for every config entry the selected subcommand
/// accepts and the command line does not already set.
fn inject_config(args: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let strs: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let config_path = strs.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            strs.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_string)
        }
    });
    let Some(config_path) = config_path else {
        return Ok(args);
    };
    let config = harness::read_config(Path::new(&config_path))?;

    let root = Cli::command();
    let mut cmd = &root;
    let mut globals: Vec<(String, bool)> = Vec::new();
    let collect = |c: &clap::Command, into: &mut Vec<(String, bool)>| {
        for a in c.get_arguments() {
            if let Some(l) = a.get_long() {
                into.push((l.to_string(), a.get_action().takes_values()));
            }
        }
    };
    collect(cmd, &mut globals);
    for tok in strs.iter().skip(1) {
        if tok.starts_with('-') {
            continue;
        }
        if let Some(sub) = cmd.find_subcommand(tok) {
            cmd = sub;
        }
    }
    let mut accepted = globals;
    collect(cmd, &mut accepted);

    let mut all = Vec::new();
    fn walk(c: &clap::Command, out: &mut Vec<String>) {
        for a in c.get_arguments() {
            if let Some(l) = a.get_long() {
                out.push(l.to_string());
            }
        }
        for s in c.get_subcommands() {
            walk(s, out);
        }
    }
    walk(&root, &mut all);

    let mut out = args;
    let present = |name: &str| strs.iter().any(|a| a == &format!("--{name}") || a.starts_with(&format!("--{name}=")));
    for (key, value) in &config {
        let name = key.replace('_', "-");
        if name == "config" {
            continue;
        }
        if !all.contains(&name) {
            return Err(Failure::Usage(format!("config key `{key}` is not a known option")));
        }
        let Some((_, takes_value)) = accepted.iter().find(|(l, _)| *l == name) else {
            continue;
        };
        if present(&name) {
            continue;
        }
        if *takes_value {
            out.push(format!("--{name}").into());
            out.push(value.into());
        } else {
            match value.as_str() {
                "true" | "yes" | "1" => out.push(format!("--{name}").into()),
                "false" | "no" | "0" => {}
                other => return Err(Failure::Usage(format!("config key `{key}` expects true/false, got `{other}`"))),
            }
        }
    }
    Ok(out)
}

fn report(f: Failure) -> ExitCode {
    match f {
        Failure::Usage(m) => {
            eprintln!("error[usage]: {m}");
            ExitCode::from(1)
        }
        Failure::Data(m) => {
            eprintln!("error[data]: {m}");
            ExitCode::from(2)
        }
    }
}

fn main() -> ExitCode {
    let args = match inject_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(f) => return report(f),
    };
    let matches = match Cli::command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                    ExitCode::from(1)
                } else {
                    ExitCode::SUCCESS
                };
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            return report(Failure::Usage(first.to_string()));
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => return report(Failure::Usage(e.to_string().lines().next().unwrap_or("").to_string())),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report(f),
    }
}

