//! Command-line front end for the pulsar classifier experiment harness.
//!
//! Exit codes: 0 on success, 1 for configuration problems, 2 for data
//! problems, 3 when every row of a grid failed.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use pulsar_vqc::dataio::{
    self, boxplot_stats, load_csv, verify_canonical, Dataset, HTRU2_SOURCE_URL,
};
use pulsar_vqc::featselect::{class_correlations, correlation_matrix, rank, SelectionMethod};
use pulsar_vqc_cli::{
    emit_table, paper_grid, run_best_of, run_grid_best_of, sort_for_presentation, ConfigError,
    ConfigFile, ConfigValues, ExperimentConfig, ResultRow, RowError, TableFormat,
};

const EXIT_CONFIG: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_ALL_ROWS_FAILED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "pulsar-vqc",
    version,
    about = "Train and evaluate variational quantum classifiers on pulsar survey data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check for the survey dataset and explain how to obtain it.
    FetchData {
        /// Where the dataset is expected.
        #[arg(long, default_value = "data/HTRU_2.csv")]
        data: PathBuf,
    },
    /// Rank features by both selection methods.
    RankFeatures {
        /// Dataset to rank.
        #[arg(long)]
        data: PathBuf,
        /// Output format: markdown or csv.
        #[arg(long, default_value_t = TableFormat::Markdown)]
        format: TableFormat,
    },
    /// Train and evaluate a single configuration.
    Run(RunArgs),
    /// Train and evaluate a grid of configurations.
    Grid(GridArgs),
    /// Per-class box-plot numbers for each feature.
    Stats {
        /// Dataset to summarize.
        #[arg(long)]
        data: PathBuf,
        /// Restrict the summary to one feature name.
        #[arg(long)]
        feature: Option<String>,
        /// Output format: markdown or csv.
        #[arg(long, default_value_t = TableFormat::Markdown)]
        format: TableFormat,
    },
    /// Feature-feature and feature-class Pearson correlations.
    Corr {
        /// Dataset to correlate.
        #[arg(long)]
        data: PathBuf,
        /// Output format: markdown or csv.
        #[arg(long, default_value_t = TableFormat::Markdown)]
        format: TableFormat,
    },
}

/// Experiment fields shared by `run` and `grid`. Every flag overrides the
/// matching config-file key.
#[derive(Args)]
struct ExperimentArgs {
    /// TOML config file with a [defaults] table and optional
    /// [[experiment]] entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dataset CSV path.
    #[arg(long)]
    data: Option<PathBuf>,
    /// How many top-ranked features to keep (2..=8); one qubit each.
    #[arg(long)]
    k_features: Option<usize>,
    /// Feature selection method: fs1 or fs2.
    #[arg(long)]
    selection: Option<String>,
    /// Number of training rows.
    #[arg(long)]
    train_size: Option<usize>,
    /// Number of test rows (default: two thirds of the training size).
    #[arg(long)]
    test_size: Option<usize>,
    /// Feature map: zz, pauli, or pauli:<labels>.
    #[arg(long)]
    feature_map: Option<String>,
    /// Ansatz: real-amplitudes, efficient-su2, feature-map, or
    /// feature-map:<spec>.
    #[arg(long)]
    ansatz: Option<String>,
    /// Entanglement scheme: linear, circular, or full.
    #[arg(long)]
    entanglement: Option<String>,
    /// Circuit repetitions for both the feature map and the ansatz.
    #[arg(long)]
    reps: Option<usize>,
    /// Split and weight-initialization seed. Required here or in the file.
    #[arg(long)]
    seed: Option<u64>,
    /// Training iteration budget.
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Convergence threshold on the loss improvement.
    #[arg(long)]
    loss_tolerance: Option<f64>,
}

impl ExperimentArgs {
    fn values(&self) -> ConfigValues {
        ConfigValues {
            data: self.data.clone(),
            k_features: self.k_features,
            selection: self.selection.clone(),
            train_size: self.train_size,
            test_size: self.test_size,
            feature_map: self.feature_map.clone(),
            ansatz: self.ansatz.clone(),
            entanglement: self.entanglement.clone(),
            reps: self.reps,
            seed: self.seed,
            max_iterations: self.max_iterations,
            loss_tolerance: self.loss_tolerance,
        }
    }

    fn file(&self) -> Result<ConfigFile, ConfigError> {
        match &self.config {
            Some(path) => ConfigFile::load(path),
            None => Ok(ConfigFile::default()),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Report the best of this many consecutive seeds.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    /// Output format: markdown or csv.
    #[arg(long, default_value_t = TableFormat::Markdown)]
    format: TableFormat,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Run the full preset sweep instead of [[experiment]] entries.
    #[arg(long)]
    paper_grid: bool,
    /// Report the best of this many consecutive seeds per row.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    /// Worker threads (0 = one per CPU).
    #[arg(long, default_value_t = 0)]
    parallelism: usize,
    /// Output format: markdown or csv.
    #[arg(long, default_value_t = TableFormat::Markdown)]
    format: TableFormat,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_CONFIG,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {failure}");
            let mut cause = std::error::Error::source(&failure);
            while let Some(err) = cause {
                eprintln!("  caused by: {err}");
                cause = err.source();
            }
            ExitCode::from(failure.exit_code())
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliFailure {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Data(#[from] dataio::DataError),
    #[error(transparent)]
    Selection(#[from] pulsar_vqc::featselect::SelectionError),
    #[error(transparent)]
    Row(#[from] RowError),
    #[error("all {count} grid rows failed")]
    GridFailed {
        count: usize,
        #[source]
        first: RowError,
    },
    #[error("dataset not found at {path}")]
    DatasetMissing { path: String },
}

impl CliFailure {
    fn exit_code(&self) -> u8 {
        match self {
            CliFailure::Config(_) => EXIT_CONFIG,
            CliFailure::GridFailed { .. } => EXIT_ALL_ROWS_FAILED,
            _ => EXIT_DATA,
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, CliFailure> {
    match command {
        Command::FetchData { data } => fetch_data(&data),
        Command::RankFeatures { data, format } => rank_features(&data, format),
        Command::Run(args) => run(args),
        Command::Grid(args) => grid(args),
        Command::Stats {
            data,
            feature,
            format,
        } => stats(&data, feature.as_deref(), format),
        Command::Corr { data, format } => corr(&data, format),
    }
}

fn fetch_data(path: &Path) -> Result<ExitCode, CliFailure> {
    if !path.exists() {
        eprintln!("dataset not found at {}", path.display());
        eprintln!();
        eprintln!("The HTRU2 survey data is distributed by the UCI repository:");
        eprintln!("  {HTRU2_SOURCE_URL}");
        eprintln!("Download the archive, extract HTRU_2.csv, and place it at");
        eprintln!("  {}", path.display());
        eprintln!("or point --data (or PULSAR_VQC_DATA for the test suite) at it.");
        return Err(CliFailure::DatasetMissing {
            path: path.display().to_string(),
        });
    }
    let dataset = load_csv(path)?;
    verify_canonical(&dataset)?;
    println!(
        "{}: {} rows, {} features, positive fraction {:.4}",
        path.display(),
        dataset.n_samples(),
        dataset.n_features(),
        dataset.positive_fraction()
    );
    Ok(ExitCode::SUCCESS)
}

fn rank_features(path: &Path, format: TableFormat) -> Result<ExitCode, CliFailure> {
    let dataset = load_csv(path)?;
    let columns = ["Rank", "FS1", "FS1 score", "FS2", "FS2 score"];
    let mut rows = Vec::new();
    let fs1 = rank(
        dataset.features.view(),
        &dataset.labels,
        &dataset.feature_names,
        SelectionMethod::Fs1,
    )?;
    let fs2 = rank(
        dataset.features.view(),
        &dataset.labels,
        &dataset.feature_names,
        SelectionMethod::Fs2,
    )?;
    for (position, (a, b)) in fs1.features.iter().zip(&fs2.features).enumerate() {
        rows.push(vec![
            (position + 1).to_string(),
            a.name.clone(),
            format!("{:.4}", a.score),
            b.name.clone(),
            format!("{:.4}", b.score),
        ]);
    }
    print!("{}", render_generic(&columns, &rows, format));
    Ok(ExitCode::SUCCESS)
}

fn run(args: RunArgs) -> Result<ExitCode, CliFailure> {
    if args.seeds == 0 {
        return Err(ConfigError::ZeroSeeds.into());
    }
    let file = args.experiment.file()?;
    let cfg = file.single(&args.experiment.values())?;
    let row = run_best_of(&cfg, args.seeds)?;
    print_convention(args.seeds, Some(cfg.seed));
    print!("{}", emit_table(&[row.clone()], args.format).expect("one row"));
    eprintln!(
        "[{}] {:.2}s, {} iterations, converged: {}",
        row.config.summary(),
        row.wall_seconds,
        row.iterations_used,
        row.converged
    );
    Ok(ExitCode::SUCCESS)
}

fn grid(args: GridArgs) -> Result<ExitCode, CliFailure> {
    if args.seeds == 0 {
        return Err(ConfigError::ZeroSeeds.into());
    }
    let file = args.experiment.file()?;
    let flags = args.experiment.values();
    let configs: Vec<ExperimentConfig> = if args.paper_grid {
        paper_grid(&file.defaults.merged(&flags))?
    } else {
        file.grid(&flags)?
    };

    let outcomes = run_grid_best_of(&configs, args.parallelism, args.seeds);
    let mut rows: Vec<ResultRow> = Vec::new();
    let mut failures: Vec<RowError> = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(row) => rows.push(row),
            Err(err) => failures.push(err),
        }
    }
    for failure in &failures {
        eprintln!("row failed: {failure}");
    }
    if rows.is_empty() {
        let count = failures.len();
        let first = failures.into_iter().next().expect("non-empty grid");
        return Err(CliFailure::GridFailed { count, first });
    }
    let total_seconds: f64 = rows.iter().map(|r| r.wall_seconds).sum();
    let base_seed = configs[0].seed;
    let uniform = configs.iter().all(|c| c.seed == base_seed);
    print_convention(args.seeds, uniform.then_some(base_seed));
    sort_for_presentation(&mut rows);
    print!("{}", emit_table(&rows, args.format).expect("non-empty rows"));
    eprintln!(
        "{} rows succeeded, {} failed, {:.2}s total model time",
        rows.len(),
        failures.len(),
        total_seconds
    );
    Ok(ExitCode::SUCCESS)
}

fn print_convention(seeds: u64, base_seed: Option<u64>) {
    let origin = match base_seed {
        Some(seed) => format!("seed {seed}"),
        None => "per-row seeds".to_string(),
    };
    if seeds == 1 {
        println!("convention: one seed per configuration ({origin})");
    } else {
        println!(
            "convention: best of {seeds} consecutive seeds per configuration \
             (from {origin}, by accuracy then MCC)"
        );
    }
}

fn stats(path: &Path, feature: Option<&str>, format: TableFormat) -> Result<ExitCode, CliFailure> {
    let dataset = load_csv(path)?;
    let names: Vec<String> = match feature {
        Some(name) => {
            dataset.column_index(name).ok_or_else(|| {
                CliFailure::Data(dataio::DataError::UnknownFeature {
                    name: name.to_string(),
                })
            })?;
            vec![name.to_string()]
        }
        None => dataset.feature_names.clone(),
    };
    let columns = [
        "Feature",
        "Class",
        "Q1",
        "Median",
        "Q3",
        "Whisker low",
        "Whisker high",
        "Outliers",
    ];
    let mut rows = Vec::new();
    for name in &names {
        let column = dataset.column_index(name).expect("validated above");
        for class in [0u8, 1u8] {
            let values: Vec<f64> = class_column(&dataset, column, class);
            let stats = boxplot_stats(&values)?;
            rows.push(vec![
                name.clone(),
                class.to_string(),
                format!("{:.4}", stats.q1),
                format!("{:.4}", stats.median),
                format!("{:.4}", stats.q3),
                format!("{:.4}", stats.whisker_low),
                format!("{:.4}", stats.whisker_high),
                stats.outlier_count.to_string(),
            ]);
        }
    }
    print!("{}", render_generic(&columns, &rows, format));
    Ok(ExitCode::SUCCESS)
}

fn class_column(dataset: &Dataset, column: usize, class: u8) -> Vec<f64> {
    dataset
        .labels
        .iter()
        .enumerate()
        .filter(|(_, &label)| label == class)
        .map(|(row, _)| dataset.features[[row, column]])
        .collect()
}

fn corr(path: &Path, format: TableFormat) -> Result<ExitCode, CliFailure> {
    let dataset = load_csv(path)?;
    let matrix = correlation_matrix(dataset.features.view())?;
    let class = class_correlations(dataset.features.view(), &dataset.labels)?;
    let mut columns: Vec<&str> = vec!["Feature"];
    columns.extend(dataset.feature_names.iter().map(String::as_str));
    columns.push("Class");
    let mut rows = Vec::new();
    for (i, name) in dataset.feature_names.iter().enumerate() {
        let mut row = vec![name.clone()];
        for j in 0..dataset.n_features() {
            row.push(format!("{:.4}", matrix[[i, j]]));
        }
        row.push(format!("{:.4}", class[i]));
        rows.push(row);
    }
    print!("{}", render_generic(&columns, &rows, format));
    Ok(ExitCode::SUCCESS)
}

fn render_generic(columns: &[&str], rows: &[Vec<String>], format: TableFormat) -> String {
    match format {
        TableFormat::Markdown => {
            let mut out = String::new();
            out.push_str("| ");
            out.push_str(&columns.join(" | "));
            out.push_str(" |\n|");
            out.push_str(&" --- |".repeat(columns.len()));
            out.push('\n');
            for row in rows {
                out.push_str("| ");
                out.push_str(&row.join(" | "));
                out.push_str(" |\n");
            }
            out
        }
        TableFormat::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            writer.write_record(columns).expect("in-memory write");
            for row in rows {
                writer.write_record(row).expect("in-memory write");
            }
            let bytes = writer.into_inner().expect("in-memory write");
            String::from_utf8(bytes).expect("csv output is utf-8")
        }
    }
}
