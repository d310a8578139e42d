use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use surrogate_core::bench::{make_sobol_dataset, reference_u, SobolSpec};
use surrogate_core::io::{self, DataSource, ExperimentConfig, ModelFile, Provenance};
use surrogate_core::pipeline::{predict, sweep_grid};
use surrogate_core::{relative_error, Dataset, Error};

#[derive(Parser)]
#[command(name = "surrogate", version, about = "Sparse random feature surrogates on a kernel PCA reduction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write G-function train/validation/test CSVs sampled on a Sobol sequence.
    GenSobol(GenSobol),
    /// Fit a surrogate from an experiment config.
    Fit(Fit),
    /// Predict responses for the points in a CSV file.
    Predict(Predict),
    /// Relative error of a model on a labelled CSV file.
    Evaluate(Evaluate),
    /// Turn a fit report into plot-ready CSV.
    Report(Report),
}

#[derive(Args)]
struct GenSobol {
    #[arg(long)]
    dim: usize,
    /// Use the reference coefficients 1, 2, 5, 20, 50, 100, 500, ..., 500.
    #[arg(long, alias = "paper-u", conflicts_with = "u")]
    reference_u: bool,
    /// Comma-separated G-function coefficients.
    #[arg(long, value_delimiter = ',')]
    u: Option<Vec<f64>>,
    #[arg(long)]
    train: usize,
    #[arg(long)]
    val: usize,
    #[arg(long)]
    test: usize,
    /// Leading sequence points to discard.
    #[arg(long, default_value_t = 1)]
    skip: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct Fit {
    /// Experiment config (TOML).
    config: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the model output path.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Override the report output path.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct Predict {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    input: PathBuf,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Evaluate {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
}

#[derive(Args)]
struct Report {
    /// Report file written by `fit`.
    reports: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Also write per-iteration global-best losses.
    #[arg(long)]
    traces: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(msg) => Failure::Usage(msg),
            other => Failure::Data(other),
        }
    }
}

type CliResult = std::result::Result<(), Failure>;

fn gen_sobol(args: GenSobol) -> CliResult {
    let u = match (args.reference_u, args.u) {
        (true, _) => reference_u(args.dim)?,
        (false, Some(u)) => u,
        (false, None) => return Err(Failure::Usage("one of --reference-u or --u is required".into())),
    };
    let spec = SobolSpec {
        dim: args.dim,
        u,
        n_train: args.train,
        n_val: args.val,
        n_test: args.test,
        skip: args.skip,
    };
    let split = make_sobol_dataset(&spec)?;
    std::fs::create_dir_all(&args.out_dir).map_err(|e| Failure::Data(Error::Io {
        path: args.out_dir.clone(),
        source: e,
    }))?;
    for (name, data) in [("train", &split.train), ("val", &split.validation), ("test", &split.test)] {
        let path = args.out_dir.join(format!("{name}.csv"));
        io::save_csv(data, &path)?;
        println!("{}: {} rows", path.display(), data.len());
    }
    Ok(())
}

fn load_data(cfg: &ExperimentConfig) -> Result<(Dataset, Dataset, Option<Dataset>), Error> {
    match &cfg.data {
        DataSource::Csv { train, validation, test } => Ok((
            io::load_csv(train)?,
            io::load_csv(validation)?,
            test.as_ref().map(io::load_csv).transpose()?,
        )),
        DataSource::Sobol { .. } => {
            let spec = cfg.data.sobol_spec()?.expect("sobol source");
            let split = make_sobol_dataset(&spec)?;
            Ok((split.train, split.validation, Some(split.test)))
        }
    }
}

fn fit(args: Fit) -> CliResult {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let model_path = args.model.unwrap_or_else(|| cfg.output.model.clone());
    let report_path = args.report.unwrap_or_else(|| cfg.output.report.clone());
    let (train, val, test) = load_data(&cfg)?;
    let pipeline = cfg.pipeline();
    pipeline.validate(train.dim(), train.len())?;
    let (model, reports, grid) = sweep_grid(&train, &val, &pipeline, &cfg.grid)?;

    println!("k,best_val_error,final_val_error,switch_iteration");
    for r in &reports {
        let switch = r.switch_iteration.map(|s| s.to_string()).unwrap_or_else(|| "-".into());
        match &r.failure {
            None => println!("{},{:.6},{:.6},{switch}", r.k, r.best_val_error, r.final_val_error),
            Some(msg) => println!("{},failed,failed,-  # {msg}", r.k),
        }
    }
    if grid.len() > 1 {
        for g in &grid {
            println!("grid n_features={} order={} val_error={:.6}", g.n_features, g.order, g.validation_error);
        }
    }
    println!("selected k = {}", model.k_star);
    let train_pred = predict(&model, train.points())?;
    println!("train error = {:.16e}", relative_error(train.responses(), &train_pred)?.error);
    println!("validation error = {:.16e}", model.validation_error);
    if let Some(test) = &test {
        let pred = predict(&model, test.points())?;
        println!("test error = {:.16e}", relative_error(test.responses(), &pred)?.error);
    }

    let file = ModelFile {
        provenance: Provenance {
            config_hash: cfg.hash(),
            seed: cfg.seed,
            timestamp: None,
        },
        model,
    };
    io::save_model(&file, &model_path)?;
    io::save_reports(&reports, file.model.k_star, &report_path)?;
    println!("model written to {}", model_path.display());
    println!("reports written to {}", report_path.display());
    Ok(())
}

fn predict_cmd(args: Predict) -> CliResult {
    let file = io::load_model(&args.model)?;
    let points = io::load_points(&args.input)?;
    let pred = predict(&file.model, &points)?;
    match &args.output {
        Some(path) => io::save_predictions(&pred, path)?,
        None => {
            println!("prediction");
            for v in pred {
                println!("{v:.16e}");
            }
        }
    }
    Ok(())
}

fn evaluate(args: Evaluate) -> CliResult {
    let file = io::load_model(&args.model)?;
    let data = io::load_csv(&args.data)?;
    let pred = predict(&file.model, data.points())?;
    let report = relative_error(data.responses(), &pred)?;
    println!("error = {:.16e}", report.error);
    println!("n_points = {}", report.n_points);
    println!("sample_mean = {:.16e}", report.sample_mean);
    println!("k = {}", file.model.k_star);
    Ok(())
}

fn report(args: Report) -> CliResult {
    let (reports, _) = io::load_reports(&args.reports)?;
    io::save_report_csv(&reports, &args.output)?;
    if let Some(path) = &args.traces {
        io::save_trace_csv(&reports, path)?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::GenSobol(a) => gen_sobol(a),
        Command::Fit(a) => fit(a),
        Command::Predict(a) => predict_cmd(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Report(a) => report(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

