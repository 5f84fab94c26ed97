//! `gpsel` command-line entry point.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime failure. All randomness
//! flows from `--seed` (or the GPSEL_SEED environment variable, or a config
//! file); identical invocations produce byte-identical report files
//! regardless of `--jobs`.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use gpsel::bench::{generate_example, real_data_protocol, run_replicates, shift_probe, SimExample};
use gpsel::data::{
    load_config, load_csv, write_dataset_csv, write_report, DesignMatrix, ExperimentConfig,
    ReportFormat,
};
use gpsel::selector::{predict, score_models, Method};

#[derive(Parser)]
#[command(
    name = "gpsel",
    about = "Bayesian g-prior variable selection, frequentist regularizers, and a regression benchmark engine",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonRun {
    /// Master seed (GPSEL_SEED overrides a config-file seed; this flag
    /// overrides both)
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for report files
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Report format: csv, md or both
    #[arg(long, default_value = "both")]
    format: String,
    /// Worker threads (default: all cores); the numbers do not depend on it
    #[arg(long)]
    jobs: Option<usize>,
    /// Optional experiment config file (flat `key = value` lines)
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a simulated example and write train/test CSV files
    Simulate {
        /// Example id (1-6)
        #[arg(long)]
        example: u8,
        #[arg(long, default_value_t = 15)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        n_test: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Score one dataset with one method and print the top models
    Select {
        #[arg(long)]
        data: PathBuf,
        /// Response column name
        #[arg(long)]
        response: String,
        /// Predictor columns (default: every other column)
        #[arg(long, value_delimiter = ',')]
        predictors: Option<Vec<String>>,
        #[arg(long)]
        method: String,
        /// How many top models to print
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// Model-averaged prediction for new rows
    Predict {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        response: String,
        /// CSV of new predictor rows (same column names)
        #[arg(long)]
        new: PathBuf,
        #[arg(long)]
        method: String,
    },
    /// Replicated simulated benchmark (train/test protocol)
    Bench {
        #[arg(long)]
        example: Option<u8>,
        #[arg(long)]
        reps: Option<usize>,
        /// Comma-separated method names, or `all`
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        #[arg(long, default_value_t = 15)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        n_test: usize,
        #[command(flatten)]
        common: CommonRun,
    },
    /// Response-translation probe (shift by 10^k x regression SS)
    ProbeShift {
        /// Comma-separated exponents k
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        k: Vec<u32>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long, default_value_t = 1)]
        example: u8,
        #[arg(long, default_value_t = 15)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        n_test: usize,
        #[command(flatten)]
        common: CommonRun,
    },
    /// Repeated random-split protocol on a real dataset
    Realdata {
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        response: Option<String>,
        #[arg(long)]
        train: Option<usize>,
        #[arg(long)]
        test: Option<usize>,
        #[arg(long)]
        splits: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        #[command(flatten)]
        common: CommonRun,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders help/version on stdout with success.
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gpsel: {e}");
            ExitCode::from(2)
        }
    }
}

fn env_seed() -> Option<u64> {
    std::env::var("GPSEL_SEED").ok().and_then(|v| v.parse().ok())
}

/// Seed precedence: explicit flag, then GPSEL_SEED, then config, then 0.
fn resolve_seed(flag: Option<u64>, cfg: Option<&ExperimentConfig>) -> u64 {
    flag.or_else(env_seed)
        .or_else(|| cfg.and_then(|c| c.seed))
        .unwrap_or(0)
}

fn parse_methods(names: Option<&[String]>, cfg: Option<&ExperimentConfig>, truth_known: bool) -> gpsel::Result<Vec<Method>> {
    if let Some(names) = names {
        if names.len() == 1 && names[0].eq_ignore_ascii_case("all") {
            return Ok(Method::all(truth_known));
        }
        return names.iter().map(|n| Method::parse(n)).collect();
    }
    if let Some(cfg) = cfg {
        if !cfg.methods.is_empty() {
            return Ok(cfg.methods.clone());
        }
    }
    Ok(Method::all(truth_known))
}

fn in_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> gpsel::Result<T> {
    match jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build()
                .map_err(|e| gpsel::Error::Io(e.to_string()))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

fn load_common_config(common: &CommonRun) -> gpsel::Result<Option<ExperimentConfig>> {
    common.config.as_ref().map(load_config).transpose()
}

fn run(cli: Cli) -> gpsel::Result<()> {
    match cli.command {
        Command::Simulate {
            example,
            n,
            n_test,
            seed,
            out,
        } => {
            let ex = SimExample::standard(example)?;
            let (train, test) = generate_example(&ex, n, n_test, seed);
            std::fs::create_dir_all(&out)?;
            let train_path = out.join(format!("example{example}-train.csv"));
            let test_path = out.join(format!("example{example}-test.csv"));
            write_dataset_csv(&train, &train_path)?;
            write_dataset_csv(&test, &test_path)?;
            println!("wrote {}", train_path.display());
            println!("wrote {}", test_path.display());
            Ok(())
        }
        Command::Select {
            data,
            response,
            predictors,
            method,
            top,
        } => {
            let method = Method::parse(&method)?;
            let loaded = load_csv(&data, &response, predictors.as_deref())?;
            if !loaded.dropped_rows.is_empty() {
                eprintln!(
                    "note: dropped {} incomplete rows: {:?}",
                    loaded.dropped_rows.len(),
                    loaded.dropped_rows
                );
            }
            let dataset = loaded.dataset;
            let selection = score_models(&dataset, &method)?;
            let names = dataset.var_names();
            println!(
                "{} on {} (n = {}, p = {})",
                method.name(),
                dataset.name,
                dataset.n(),
                dataset.p()
            );
            println!("{:<28} {:>12} {:>14}", "model", "posterior", "log-marginal");
            for score in selection.top_k(top) {
                println!(
                    "{:<28} {:>12.6} {:>14.4}",
                    score.gamma.label(&names),
                    score.posterior_prob,
                    score.log_marginal
                );
            }
            println!("MAP support: {}", selection.map().label(&names));
            if !selection.degenerate.is_empty() {
                println!("degenerate models excluded: {}", selection.degenerate.len());
            }
            Ok(())
        }
        Command::Predict {
            data,
            response,
            new,
            method,
        } => {
            let method = Method::parse(&method)?;
            let train = load_csv(&data, &response, None)?.dataset;
            let names = train.var_names();
            let new_rows = load_csv_design(&new, &names)?;
            let selection = score_models(&train, &method)?;
            let pred = predict(&selection, &train, &new_rows)?;
            for v in pred {
                println!("{v}");
            }
            Ok(())
        }
        Command::Bench {
            example,
            reps,
            methods,
            n,
            n_test,
            common,
        } => {
            let cfg = load_common_config(&common)?;
            let example = example
                .or_else(|| cfg.as_ref().and_then(|c| c.example))
                .ok_or_else(|| gpsel::Error::Domain("--example is required".into()))?;
            let reps = reps
                .or_else(|| cfg.as_ref().and_then(|c| c.reps))
                .unwrap_or(100);
            let seed = resolve_seed(common.seed, cfg.as_ref());
            let methods = parse_methods(methods.as_deref(), cfg.as_ref(), true)?;
            let format = ReportFormat::parse(&common.format)?;
            let ex = SimExample::standard(example)?;
            let report = in_pool(common.jobs, || {
                run_replicates(&ex, &methods, n, n_test, reps, seed)
            })??;
            let out_dir = cfg
                .as_ref()
                .and_then(|c| c.out.clone())
                .map_or(common.out.clone(), PathBuf::from);
            let files = write_report(&report, &out_dir, &format!("example{example}"), format)?;
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
        Command::ProbeShift {
            k,
            reps,
            example,
            n,
            n_test,
            common,
        } => {
            let cfg = load_common_config(&common)?;
            let reps = reps
                .or_else(|| cfg.as_ref().and_then(|c| c.reps))
                .unwrap_or(100);
            let seed = resolve_seed(common.seed, cfg.as_ref());
            let format = ReportFormat::parse(&common.format)?;
            let ex = SimExample::standard(example)?;
            let reports = in_pool(common.jobs, || {
                shift_probe(&ex, &k, n, n_test, reps, seed)
            })??;
            for (k, report) in reports {
                let files = write_report(
                    &report,
                    &common.out,
                    &format!("example{example}-shift-k{k}"),
                    format,
                )?;
                for f in files {
                    println!("wrote {}", f.display());
                }
                for row in &report.rows {
                    println!(
                        "k = {k}: HITS = {}, FP = {}",
                        row.metrics.hits.map_or("-".into(), |v| format!("{v:.2}")),
                        row.metrics.fp.map_or("-".into(), |v| format!("{v:.2}")),
                    );
                }
            }
            Ok(())
        }
        Command::Realdata {
            data,
            response,
            train,
            test,
            splits,
            methods,
            common,
        } => {
            let cfg = load_common_config(&common)?;
            let data_path = data
                .or_else(|| cfg.as_ref().and_then(|c| c.data.clone().map(PathBuf::from)))
                .ok_or_else(|| gpsel::Error::Domain("--data is required".into()))?;
            let response = response
                .or_else(|| cfg.as_ref().and_then(|c| c.response.clone()))
                .ok_or_else(|| gpsel::Error::Domain("--response is required".into()))?;
            let loaded = load_csv(&data_path, &response, None)?;
            if !loaded.dropped_rows.is_empty() {
                eprintln!(
                    "note: dropped {} incomplete rows",
                    loaded.dropped_rows.len()
                );
            }
            let dataset = loaded.dataset;
            let n_train = train
                .or_else(|| cfg.as_ref().and_then(|c| c.train))
                .ok_or_else(|| gpsel::Error::Domain("--train is required".into()))?;
            let n_test = test
                .or_else(|| cfg.as_ref().and_then(|c| c.test))
                .unwrap_or_else(|| dataset.n().saturating_sub(n_train));
            let splits = splits
                .or_else(|| cfg.as_ref().and_then(|c| c.splits))
                .unwrap_or(25);
            let seed = resolve_seed(common.seed, cfg.as_ref());
            let methods = parse_methods(methods.as_deref(), cfg.as_ref(), false)?;
            let format = ReportFormat::parse(&common.format)?;
            let report = in_pool(common.jobs, || {
                real_data_protocol(&dataset, n_train, n_test, splits, &methods, seed)
            })??;
            let base = dataset.name.clone();
            let files = write_report(&report, &common.out, &base, format)?;
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
    }
}

/// Load new predictor rows aligned to the training column names. The file
/// may carry any response column; only the named predictors are read.
fn load_csv_design(path: &PathBuf, names: &[String]) -> gpsel::Result<DesignMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|_| gpsel::Error::FileNotFound(path.display().to_string()))?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or(gpsel::Error::EmptyAfterFiltering)?
        .split(',')
        .map(|h| h.trim().to_string())
        .collect();
    let idx: Vec<usize> = names
        .iter()
        .map(|n| {
            header
                .iter()
                .position(|h| h == n)
                .ok_or_else(|| gpsel::Error::ParseError {
                    row: 0,
                    column: n.clone(),
                    message: "column missing from new-rows file".into(),
                })
        })
        .collect::<gpsel::Result<_>>()?;
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (row_no, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        for (k, &i) in idx.iter().enumerate() {
            let cell = cells.get(i).map(|s| s.trim()).unwrap_or("");
            let v = cell.parse::<f64>().map_err(|e| gpsel::Error::ParseError {
                row: row_no + 1,
                column: names[k].clone(),
                message: e.to_string(),
            })?;
            cols[k].push(v);
        }
    }
    let n = cols.first().map_or(0, Vec::len);
    let columns = names
        .iter()
        .zip(cols)
        .map(|(name, values)| gpsel::data::Column {
            name: name.clone(),
            values,
        })
        .collect();
    DesignMatrix::new(columns, n, true)
}
