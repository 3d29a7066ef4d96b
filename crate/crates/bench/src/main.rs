use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use amop::{amop, cosamp, omp, AmopConfig, DenseMatrix, RealScalar, Scalar};
use amop_bench::runner::{drange_table, pmin_table, ARTIFACT_VERSION};
use amop_bench::textio::{read_matrix, TextMatrix};
use amop_bench::{run, BenchError, ExperimentSpec, Result};
use clap::{Parser, Subcommand, ValueEnum};

/// Sparse-recovery experiments and tools.
#[derive(Parser)]
#[command(name = "amop-bench", version)]
struct Cli {
    /// Overrides the base seed of any experiment.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Runs an experiment described by a JSON spec.
    Run {
        /// Experiment spec (JSON).
        spec: PathBuf,
        /// Output CSV; defaults to the spec's `output` field, then stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Overrides the trial count.
        #[arg(long)]
        trials: Option<usize>,
        /// Also writes one row per trial to this file.
        #[arg(long)]
        trials_output: Option<PathBuf>,
    },
    /// Closed-form analysis tables.
    Analyze {
        #[command(subcommand)]
        table: AnalyzeCommand,
    },
    /// Recovers a sparse vector from a measurement matrix and measurements.
    Recover {
        /// Measurement matrix file (`rows cols real|complex`, then row-major entries).
        #[arg(long)]
        matrix: PathBuf,
        /// Measurement vector file, same format with one column.
        #[arg(long)]
        y: PathBuf,
        /// Recovery algorithm.
        #[arg(long, value_enum, default_value_t = Algo::Amop)]
        algo: Algo,
        /// Relative-drop threshold.
        #[arg(long)]
        t: Option<f64>,
        /// Halting level on the relative residual.
        #[arg(long)]
        eps: Option<f64>,
        /// Per-iteration selection cap.
        #[arg(long)]
        cap_k: Option<usize>,
        /// Target sparsity (required by CoSaMP).
        #[arg(long)]
        sparsity: Option<usize>,
        /// Iteration limit; defaults to the number of rows.
        #[arg(long)]
        max_iters: Option<usize>,
    },
}

#[derive(Subcommand)]
enum AnalyzeCommand {
    /// Guaranteed energy share per adaptive step.
    Pmin {
        /// Largest selection size K.
        #[arg(long, default_value_t = 50)]
        k_max: usize,
        /// Comma-separated thresholds T.
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])]
        t: Vec<f64>,
    },
    /// Smallest admissible magnitude versus sparsity.
    Drange {
        /// Largest sparsity.
        #[arg(long, default_value_t = 100)]
        s_max: usize,
        /// Comma-separated noise bounds.
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.1])]
        noise: Vec<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Amop,
    Omp,
    Cosamp,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("amop-bench: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            spec,
            output,
            trials,
            trials_output,
        } => {
            let text = std::fs::read_to_string(&spec).map_err(|source| BenchError::Io {
                path: spec.clone(),
                source,
            })?;
            let mut parsed = ExperimentSpec::from_json(&text)?;
            if let Some(t) = trials {
                parsed.trials = t;
            }
            let parsed = parsed.resolve(cli.seed);
            let report = run(&parsed)?;
            let out = output.or_else(|| parsed.output.as_ref().map(PathBuf::from));
            emit(out.as_deref(), &report.to_csv())?;
            if let Some(path) = trials_output {
                emit(Some(&path), &report.trials_csv(false))?;
            }
            Ok(())
        }
        Command::Analyze { table } => {
            let (table, extra) = match table {
                AnalyzeCommand::Pmin { k_max, t } => {
                    if k_max == 0 || t.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
                        return Err(BenchError::spec("need k_max >= 1 and every t in (0, 1]"));
                    }
                    (pmin_table(k_max, &t), None)
                }
                AnalyzeCommand::Drange { s_max, noise } => {
                    if s_max < 2 || noise.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
                        return Err(BenchError::spec("need s_max >= 2 and finite nonnegative noise bounds"));
                    }
                    (drange_table(s_max, &noise)?, Some("log base: e".to_string()))
                }
            };
            let mut header = vec![ARTIFACT_VERSION.to_string()];
            header.extend(extra);
            emit(None, &table.to_csv(&header))
        }
        Command::Recover {
            matrix,
            y,
            algo,
            t,
            eps,
            cap_k,
            sparsity,
            max_iters,
        } => {
            let a = read_matrix(&matrix)?;
            let yv = read_matrix(&y)?;
            let (rows, _) = a.shape();
            if yv.shape() != (rows, 1) {
                return Err(BenchError::spec(format!(
                    "measurement vector must be {rows}x1, got {}x{}",
                    yv.shape().0,
                    yv.shape().1
                )));
            }
            let base = AmopConfig::for_measurements(rows, f64::INFINITY);
            let cfg = AmopConfig {
                threshold: t.unwrap_or(base.threshold),
                halt_eps: eps.unwrap_or(base.halt_eps),
                cap_k: cap_k.unwrap_or(base.cap_k),
                max_iters: max_iters.unwrap_or(base.max_iters),
                ..base
            };
            cfg.validate().map_err(|e| BenchError::spec(e.to_string()))?;
            let req = Request { algo, cfg, sparsity };
            let text = match (a, yv) {
                (TextMatrix::Real(a), TextMatrix::Real(y)) => recover(&a, &y, &req)?,
                (a, y) => recover(&a.into_complex(), &y.into_complex(), &req)?,
            };
            emit(None, &text)
        }
    }
}

struct Request {
    algo: Algo,
    cfg: AmopConfig,
    sparsity: Option<usize>,
}

/// Runs one recovery and renders `index,re,im` rows of the estimate.
fn recover<S: Scalar>(a: &DenseMatrix<S>, y: &DenseMatrix<S>, req: &Request) -> Result<String> {
    let y = y.column(0);
    let res = match req.algo {
        Algo::Amop => amop(a, y, &req.cfg),
        Algo::Omp => omp(a, y, req.cfg.halt_eps, req.cfg.max_iters),
        Algo::Cosamp => {
            let s = req
                .sparsity
                .ok_or_else(|| BenchError::spec("cosamp needs --sparsity"))?;
            cosamp(a, y, s, req.cfg.halt_eps, req.cfg.max_iters)
        }
    }
    .map_err(|e| match e {
        amop::Error::InvalidInput(msg) => BenchError::spec(msg),
        other => other.into(),
    })?;
    let mut rows = amop_bench::Table::new(["index", "re", "im"]);
    for (i, v) in res.estimate.iter() {
        rows.push(vec![i.into(), v.re().to_f64_lossy().into(), v.im().to_f64_lossy().into()]);
    }
    let header = vec![
        ARTIFACT_VERSION.to_string(),
        format!("halt_reason: {}", res.halt_reason.as_str()),
        format!("iterations: {}", res.iterations),
        format!(
            "relative_residual: {}",
            amop_bench::format_g9(res.residual_history.last().copied().unwrap_or(0.0))
        ),
    ];
    Ok(rows.to_csv(&header))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| BenchError::Io {
            path: p.to_owned(),
            source,
        }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| BenchError::Runtime(format!("writing stdout: {e}"))),
    }
}
