//! Command-line interface: data generation, training, evaluation, exact
//! attacks, sign-code inspection, growth census, and bound calculation.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use truncal_core::bounds::{sample_complexity, generalization_bound};
use truncal_core::coding::CodeBasis;
use truncal_core::data::{read_dataset, sample_mixture, write_dataset, GaussianMixtureConfig};
use truncal_core::error::Error;
use truncal_core::experiment::{generalization_experiment, ExperimentConfig, DEFAULT_DELTA};
use truncal_core::growth::census_patterns;
use truncal_core::model::Model;
use truncal_core::oracle::{empirical_robust_loss, evaluate};
use truncal_core::train::{train, TrainConfig};
use truncal_core::{Sign, TruncationConfig};

#[derive(Parser)]
#[command(name = "truncal", version, about = "Truncated linear classifiers under l0 attack: exact robustness, training, and bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Format::Json => write!(f, "json"),
            Format::Csv => write!(f, "csv"),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Draw a labeled Gaussian-mixture dataset and write it as CSV
    GenData(GenDataArgs),
    /// Adversarially train a truncated linear classifier
    Train(TrainArgs),
    /// Robust error of a model on a dataset
    Eval(EvalArgs),
    /// Per-sample exact attack: verdicts and worst-case witnesses
    Attack(AttackArgs),
    /// Print the sign-coding tables for one (w, x) instance
    Encode(EncodeArgs),
    /// Sign-pattern census against the growth bounds
    Growth(GrowthArgs),
    /// Generalization-bound calculator (or sample-complexity inversion)
    Bound(BoundArgs),
    /// Train/test generalization-gap experiment over a grid of n
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct GenDataArgs {
    /// Feature dimension
    #[arg(long)]
    d: usize,
    /// Adversary budget; accepted for validation symmetry
    #[arg(long)]
    k: Option<usize>,
    /// Number of samples
    #[arg(long)]
    n: usize,
    /// Mixture mean: single value broadcast to d, or d comma-separated values
    #[arg(long, default_value = "1.0", allow_hyphen_values = true)]
    mu: String,
    /// Diagonal variances: single value broadcast to d, or d values
    #[arg(long, default_value = "1.0")]
    sigma: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// Training dataset CSV
    #[arg(long)]
    data: PathBuf,
    /// Adversary budget
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    /// Initial step size; epoch t uses step/sqrt(t)
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    #[arg(long, default_value_t = 3)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Project weights onto this l2 radius after every step
    #[arg(long)]
    l2_cap: Option<f64>,
    /// Append a constant-1 coordinate before training
    #[arg(long, default_value_t = false)]
    bias: bool,
    /// Output model JSON path
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
}

#[derive(Args)]
struct AttackArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k: usize,
    /// Comma-separated feature vector
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    /// Comma-separated weight vector
    #[arg(long, allow_hyphen_values = true)]
    w: String,
    /// text prints the inspection tables; json emits the raw code
    #[arg(long, value_enum, default_value_t = EncodeFormat::Text)]
    format: EncodeFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EncodeFormat {
    Text,
    Json,
}

impl std::fmt::Display for EncodeFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EncodeFormat::Text => write!(f, "text"),
            EncodeFormat::Json => write!(f, "json"),
        }
    }
}

#[derive(Args)]
struct GrowthArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k: usize,
    /// Number of census points (generated standard-normal unless --data)
    #[arg(long)]
    n: usize,
    /// Optional dataset CSV supplying the points and labels
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k: usize,
    /// Sample count; computes the bound at this n
    #[arg(long, conflicts_with = "epsilon")]
    n: Option<usize>,
    /// Target excess error; inverts for the smallest sufficient n
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "1.0", allow_hyphen_values = true)]
    mu: String,
    #[arg(long, default_value = "1.0")]
    sigma: String,
    /// Comma-separated training-set sizes
    #[arg(long, value_delimiter = ',')]
    n_grid: Vec<usize>,
    #[arg(long)]
    n_test: usize,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 100)]
    epochs: usize,
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    #[arg(long, default_value_t = 2)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn parse_vector(text: &str, d: usize, what: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = text.split(',').collect();
    let values: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Error::InvalidConfig(format!("cannot parse {what} {text:?}")))?;
    if values.len() == 1 {
        return Ok(vec![values[0]; d]);
    }
    if values.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: values.len(),
        });
    }
    Ok(values)
}

/// CLI-level budget validation: subcommands operate with 0 < 2k < d.
fn cli_config(d: usize, k: usize) -> Result<TruncationConfig, Error> {
    if k == 0 {
        return Err(Error::InvalidConfig(
            "k must be at least 1 (the k = 0 classical mode is library-only)".into(),
        ));
    }
    TruncationConfig::new(d, k)
}

fn print_json<T: Serialize>(value: &T, output: Option<&PathBuf>) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)?;
    match output {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            writeln!(f, "{text}")?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct EvalOutput {
    n: usize,
    d: usize,
    k: usize,
    bias: bool,
    robust_loss: f64,
}

#[derive(Serialize)]
struct AttackRow {
    index: usize,
    y: Sign,
    clean_value: f64,
    clean_sign: Sign,
    lo: f64,
    hi: f64,
    misclassified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct AttackReport {
    rows: Vec<AttackRow>,
    summary: EvalOutput,
}

#[derive(Serialize)]
struct InversionOutput {
    epsilon: f64,
    delta: f64,
    d: usize,
    k: usize,
    n: usize,
    total_at_n: f64,
}

fn fmt_vec(v: &[f64]) -> String {
    let cells: Vec<String> = v.iter().map(|a| format!("{a}")).collect();
    format!("({})", cells.join(","))
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::GenData(a) => {
            if let Some(k) = a.k {
                cli_config(a.d, k)?;
            }
            let mix = GaussianMixtureConfig {
                mu: parse_vector(&a.mu, a.d, "--mu")?,
                sigma_diag: parse_vector(&a.sigma, a.d, "--sigma")?,
                n: a.n,
                seed: a.seed,
            };
            let ds = sample_mixture(&mix)?;
            write_dataset(&ds, &a.output)?;
        }
        Command::Train(a) => {
            let ds = read_dataset(&a.data)?;
            let cfg = cli_config(ds.d(), a.k)?;
            let tc = TrainConfig {
                epochs: a.epochs,
                step_size: a.step,
                restarts: a.restarts,
                seed: a.seed,
                l2_cap: a.l2_cap,
                bias: a.bias,
            };
            let report = train(&ds, &cfg, &tc)?;
            let out_cfg = TruncationConfig::new(report.w_hat.dim(), a.k)?;
            let model = Model::new(&report.w_hat, &out_cfg, a.bias)?;
            model.write(&a.output)?;
            let summary = EvalOutput {
                n: ds.len(),
                d: model.d,
                k: model.k,
                bias: model.bias,
                robust_loss: report.best_empirical_robust_loss,
            };
            print_json(&summary, None)?;
        }
        Command::Eval(a) => {
            let model = Model::read(&a.model)?;
            cli_config(model.d, model.k)?;
            let ds = model.prepare(&read_dataset(&a.data)?)?;
            let cfg = model.config()?;
            let w = model.weights()?;
            let loss = empirical_robust_loss(&w, &ds, &cfg)?;
            print_json(
                &EvalOutput {
                    n: ds.len(),
                    d: model.d,
                    k: model.k,
                    bias: model.bias,
                    robust_loss: loss,
                },
                None,
            )?;
        }
        Command::Attack(a) => {
            let model = Model::read(&a.model)?;
            cli_config(model.d, model.k)?;
            let ds = model.prepare(&read_dataset(&a.data)?)?;
            if ds.is_empty() {
                return Err(Error::EmptyDataset);
            }
            let cfg = model.config()?;
            let w = model.weights()?;
            let mut rows = Vec::with_capacity(ds.len());
            let mut errors = 0usize;
            for (index, s) in ds.iter().enumerate() {
                let ev = evaluate(&w, &s.x, s.y, &cfg)?;
                errors += ev.misclassified as usize;
                rows.push(AttackRow {
                    index,
                    y: s.y,
                    clean_value: ev.clean_value,
                    clean_sign: ev.clean_sign,
                    lo: ev.lo,
                    hi: ev.hi,
                    misclassified: ev.misclassified,
                    witness: ev.witness,
                });
            }
            let report = AttackReport {
                summary: EvalOutput {
                    n: ds.len(),
                    d: model.d,
                    k: model.k,
                    bias: model.bias,
                    robust_loss: errors as f64 / ds.len() as f64,
                },
                rows,
            };
            match a.format {
                Format::Json => print_json(&report, a.output.as_ref())?,
                Format::Csv => {
                    let mut text = String::from("index,y,clean_value,misclassified,witness\n");
                    for r in &report.rows {
                        let wit = r
                            .witness
                            .as_ref()
                            .map(|v| {
                                v.iter()
                                    .map(|a| format!("{a}"))
                                    .collect::<Vec<_>>()
                                    .join(";")
                            })
                            .unwrap_or_default();
                        text.push_str(&format!(
                            "{},{},{},{},{}\n",
                            r.index,
                            r.y.as_i8(),
                            r.clean_value,
                            r.misclassified,
                            wit
                        ));
                    }
                    match a.output {
                        Some(path) => std::fs::write(path, text)?,
                        None => print!("{text}"),
                    }
                }
            }
        }
        Command::Encode(a) => {
            let cfg = cli_config(a.d, a.k)?;
            let x = parse_vector(&a.x, a.d, "--x")?;
            let w_vals = parse_vector(&a.w, a.d, "--w")?;
            let w = truncal_core::WeightVector::new(w_vals)?;
            let basis = CodeBasis::new(&cfg)?;
            let code = basis.encode(&w, &x)?;
            let middle: Vec<usize> = (cfg.k()..cfg.d() - cfg.k()).collect();
            let final_sign = basis.decode(&code, &middle)?;
            match a.format {
                EncodeFormat::Json => {
                    #[derive(Serialize)]
                    struct EncodeOutput {
                        d: usize,
                        k: usize,
                        alpha_signs: Vec<Sign>,
                        beta_signs: Vec<Sign>,
                        trunc_sign: Sign,
                    }
                    print_json(
                        &EncodeOutput {
                            d: cfg.d(),
                            k: cfg.k(),
                            alpha_signs: code.alpha_signs.clone(),
                            beta_signs: code.beta_signs.clone(),
                            trunc_sign: final_sign,
                        },
                        None,
                    )?;
                }
                EncodeFormat::Text => {
                    println!("alpha rows (subset indicators of size d-2k = {}):", cfg.kept());
                    println!("{:>4}  {:<18} {:<22} {:>4}", "i", "alpha_i", "x (masked)", "sign");
                    for i in 0..basis.alpha_count() {
                        let av = basis.alpha_vector(i);
                        let masked: Vec<f64> =
                            av.iter().zip(&x).map(|(m, xv)| m * xv + 0.0).collect();
                        println!(
                            "{:>4}  {:<18} {:<22} {:>4}",
                            i + 1,
                            fmt_vec(&av),
                            fmt_vec(&masked),
                            code.alpha_signs[i].to_string()
                        );
                    }
                    println!();
                    println!("beta rows (pairwise comparisons):");
                    println!(
                        "{:>4}  {:<18} {:<22} {:>4}  conclusion",
                        "j", "beta_j", "x (masked)", "sign"
                    );
                    for j in 0..basis.beta_count() {
                        let bv = basis.beta_vector(j);
                        let masked: Vec<f64> =
                            bv.iter().zip(&x).map(|(m, xv)| m * xv + 0.0).collect();
                        let (p, q) = basis.beta_pair(j);
                        let concl = match code.beta_signs[j] {
                            Sign::Plus => format!("w{0}x{0} >= w{1}x{1}", p + 1, q + 1),
                            Sign::Minus => format!("w{0}x{0} < w{1}x{1}", p + 1, q + 1),
                        };
                        println!(
                            "{:>4}  {:<18} {:<22} {:>4}  {}",
                            j + 1,
                            fmt_vec(&bv),
                            fmt_vec(&masked),
                            code.beta_signs[j].to_string(),
                            concl
                        );
                    }
                    println!();
                    println!("sign of the truncated inner product: {final_sign}");
                }
            }
        }
        Command::Growth(a) => {
            let cfg = cli_config(a.d, a.k)?;
            if a.n <= a.d + 1 {
                return Err(Error::Precondition(format!(
                    "need n > d + 1, got n = {}, d = {}",
                    a.n, a.d
                )));
            }
            let (xs, ys): (Vec<Vec<f64>>, Vec<Sign>) = match a.data {
                Some(path) => {
                    let ds = read_dataset(&path)?;
                    if ds.d() != cfg.d() {
                        return Err(Error::DimensionMismatch {
                            expected: cfg.d(),
                            actual: ds.d(),
                        });
                    }
                    let xs = ds.iter().map(|s| s.x.clone()).collect();
                    let ys = ds.iter().map(|s| s.y).collect();
                    (xs, ys)
                }
                None => {
                    use rand::{Rng, SeedableRng};
                    use rand_distr::{Distribution, StandardNormal};
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.seed ^ 0xDA7A);
                    let xs = (0..a.n)
                        .map(|_| (0..a.d).map(|_| StandardNormal.sample(&mut rng)).collect())
                        .collect();
                    let ys = (0..a.n)
                        .map(|_| {
                            if rng.random::<bool>() {
                                Sign::Plus
                            } else {
                                Sign::Minus
                            }
                        })
                        .collect();
                    (xs, ys)
                }
            };
            if xs.len() != a.n {
                return Err(Error::Precondition(format!(
                    "--n {} does not match dataset rows {}",
                    a.n,
                    xs.len()
                )));
            }
            let report = census_patterns(&xs, Some(&ys), &cfg, a.trials, a.seed)?;
            print_json(&report, None)?;
        }
        Command::Bound(a) => {
            cli_config(a.d, a.k)?;
            match (a.n, a.epsilon) {
                (Some(n), None) => {
                    let report = generalization_bound(n, a.d, a.k, a.delta)?;
                    print_json(&report, None)?;
                }
                (None, Some(eps)) => {
                    let n = sample_complexity(eps, a.delta, a.d, a.k)?;
                    let total = generalization_bound(n, a.d, a.k, a.delta)?.total;
                    print_json(
                        &InversionOutput {
                            epsilon: eps,
                            delta: a.delta,
                            d: a.d,
                            k: a.k,
                            n,
                            total_at_n: total,
                        },
                        None,
                    )?;
                }
                _ => {
                    return Err(Error::Precondition(
                        "provide exactly one of --n or --epsilon".into(),
                    ))
                }
            }
        }
        Command::Experiment(a) => {
            let cfg = cli_config(a.d, a.k)?;
            let ec = ExperimentConfig {
                mix: GaussianMixtureConfig {
                    mu: parse_vector(&a.mu, a.d, "--mu")?,
                    sigma_diag: parse_vector(&a.sigma, a.d, "--sigma")?,
                    n: 0,
                    seed: a.seed,
                },
                cfg,
                tc: TrainConfig {
                    epochs: a.epochs,
                    step_size: a.step,
                    restarts: a.restarts,
                    seed: a.seed,
                    l2_cap: None,
                    bias: false,
                },
                n_grid: a.n_grid.clone(),
                n_test: a.n_test,
                trials: a.trials,
                delta: a.delta,
            };
            let report = generalization_experiment(&ec)?;
            match a.format {
                Format::Json => print_json(&report, a.output.as_ref())?,
                Format::Csv => {
                    let mut text = String::from("n,trial,train_loss,test_loss,gap,bound\n");
                    for r in &report.rows {
                        text.push_str(&format!(
                            "{},{},{},{},{},{}\n",
                            r.n, r.trial, r.train_loss, r.test_loss, r.gap, r.bound
                        ));
                    }
                    match a.output {
                        Some(path) => std::fs::write(path, text)?,
                        None => print!("{text}"),
                    }
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Inconsistency(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
