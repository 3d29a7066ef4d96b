//! Executes experiment specs.
//!
//! Each trial at a sweep point draws one problem instance (matrix, signal,
//! noise) from seeds derived from `(base_seed, point, trial)`, and every
//! algorithm is run on that same instance. Trials run in parallel; results
//! are aggregated in trial order, so output does not depend on scheduling.

use std::time::Instant;

use amop::{
    amop, cosamp, dynamic_range_curve, gen_sparse_signal, measure, omp, p_min, relative_error, support_metrics,
    Complex64, DenseMatrix, MeasurementEnsemble, RealScalar, RecoveryResult, Scalar, SparseSignal, SupportMetrics,
};
use rayon::prelude::*;

use crate::error::Result;
use crate::seed::{component_seed, instance_seed, record_seed};
use crate::spec::{Algorithm, ExperimentKind, ExperimentSpec, Snr};
use crate::table::{format_g9, Cell, Table};

/// Version stamped into every artifact header.
pub const ARTIFACT_VERSION: &str = concat!("amop-bench ", env!("CARGO_PKG_VERSION"));

/// Outcome of one algorithm on one problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub m: usize,
    pub sparsity: usize,
    pub snr: Snr,
    pub trial: usize,
    pub instance_seed: u64,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub success: bool,
    pub rel_error: f64,
    pub iterations: usize,
    /// `rejected` when the algorithm refused the problem size.
    pub halt_reason: &'static str,
    pub residual_nonincreasing: bool,
    pub wall_ms: f64,
    /// One entry per configured tolerance; empty outside support experiments.
    pub support: Vec<SupportMetrics>,
}

/// Everything an experiment produced.
#[derive(Debug, Clone)]
pub struct Report {
    /// The spec with every default written out.
    pub spec: ExperimentSpec,
    pub table: Table,
    pub trials: Vec<TrialRecord>,
    pub header: Vec<String>,
}

impl Report {
    /// Aggregate CSV with the provenance header.
    pub fn to_csv(&self) -> String {
        self.table.to_csv(&self.header)
    }

    /// One row per trial record. Wall times are omitted unless requested,
    /// since they are the only nondeterministic field.
    pub fn trials_csv(&self, with_timing: bool) -> String {
        let mut cols = vec![
            "m", "S", "snr_db", "trial", "instance_seed", "seed", "algorithm", "success", "rel_error", "iterations",
            "halt_reason", "residual_nonincreasing",
        ]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
        if self.spec.kind == ExperimentKind::StapSupport {
            for t in &self.spec.stap.tolerances {
                cols.push(format!("hits_tol{t}"));
                cols.push(format!("false_alarms_tol{t}"));
            }
        }
        if with_timing {
            cols.push("wall_ms".into());
        }
        let mut table = Table::new(cols);
        for r in &self.trials {
            let mut row: Vec<Cell> = vec![
                r.m.into(),
                r.sparsity.into(),
                r.snr.label().into(),
                r.trial.into(),
                r.instance_seed.to_string().into(),
                r.seed.to_string().into(),
                r.algorithm.label().into(),
                (r.success as usize).into(),
                r.rel_error.into(),
                r.iterations.into(),
                r.halt_reason.into(),
                (r.residual_nonincreasing as usize).into(),
            ];
            for s in &r.support {
                row.push(s.hits.into());
                row.push(s.false_alarms.into());
            }
            if with_timing {
                row.push(r.wall_ms.into());
            }
            table.push(row);
        }
        table.to_csv(&self.header)
    }
}

/// Runs a validated spec.
pub fn run(spec: &ExperimentSpec) -> Result<Report> {
    spec.validate()?;
    let spec = spec.resolve(None);
    let mut header = vec![
        ARTIFACT_VERSION.to_string(),
        format!("base_seed: {}", spec.base_seed),
        format!("spec: {}", spec.to_json()),
    ];
    let (table, trials) = match spec.kind {
        ExperimentKind::PminTable => (pmin_table(spec.analysis.k_max, &spec.analysis.t_values), Vec::new()),
        ExperimentKind::DynamicRangeCurve => {
            header.push("log base: e".into());
            (drange_table(spec.analysis.s_max, &spec.analysis.noise_bounds)?, Vec::new())
        }
        _ => {
            for &m in &spec.m_values() {
                for &snr in &spec.snr_db {
                    let cfg = serde_json::to_string(&spec.amop_config(m, snr)).expect("config serializes");
                    header.push(format!("amop m={m} snr_db={}: {cfg}", snr.label()));
                }
            }
            let trials = if spec.ensemble.is_complex() {
                run_trials::<Complex64>(&spec)?
            } else {
                run_trials::<f64>(&spec)?
            };
            (aggregate(&spec, &trials), trials)
        }
    };
    Ok(Report {
        spec,
        table,
        trials,
        header,
    })
}

/// Sweep points in output order.
fn points(spec: &ExperimentSpec) -> Vec<(usize, usize, Snr)> {
    let mut out = Vec::new();
    for &s in &spec.sparsity {
        for &m in &spec.m_values() {
            for &snr in &spec.snr_db {
                out.push((m, s, snr));
            }
        }
    }
    out
}

fn run_trials<S: Scalar>(spec: &ExperimentSpec) -> Result<Vec<TrialRecord>> {
    // The spatial-temporal dictionary is deterministic; build it once.
    let shared: Option<DenseMatrix<S>> = match spec.ensemble {
        MeasurementEnsemble::SpatialTemporal(_) => Some(spec.ensemble.generate(0, 0, 0)?),
        _ => None,
    };
    let mut out = Vec::new();
    for (m, s, snr) in points(spec) {
        let per_trial: Vec<Vec<TrialRecord>> = (0..spec.trials)
            .into_par_iter()
            .map(|t| run_instance::<S>(spec, shared.as_ref(), m, s, snr, t))
            .collect::<Result<_>>()?;
        out.extend(per_trial.into_iter().flatten());
    }
    Ok(out)
}

/// Records of every algorithm on one instance, computed independently of
/// any other trial. `spec` must be resolved.
pub fn trial_records(spec: &ExperimentSpec, m: usize, s: usize, snr: Snr, trial: usize) -> Result<Vec<TrialRecord>> {
    fn go<S: Scalar>(spec: &ExperimentSpec, m: usize, s: usize, snr: Snr, trial: usize) -> Result<Vec<TrialRecord>> {
        let shared: Option<DenseMatrix<S>> = match spec.ensemble {
            MeasurementEnsemble::SpatialTemporal(_) => Some(spec.ensemble.generate(0, 0, 0)?),
            _ => None,
        };
        run_instance::<S>(spec, shared.as_ref(), m, s, snr, trial)
    }
    if spec.ensemble.is_complex() {
        go::<Complex64>(spec, m, s, snr, trial)
    } else {
        go::<f64>(spec, m, s, snr, trial)
    }
}

fn run_instance<S: Scalar>(
    spec: &ExperimentSpec,
    shared: Option<&DenseMatrix<S>>,
    m: usize,
    s: usize,
    snr: Snr,
    trial: usize,
) -> Result<Vec<TrialRecord>> {
    let n = spec.n();
    let inst = instance_seed(spec.base_seed, &[m as u64, s as u64, snr.db().to_bits()], trial);
    let owned;
    let a = match shared {
        Some(a) => a,
        None => {
            owned = spec.ensemble.generate::<S>(m, n, component_seed(inst, "matrix"))?;
            &owned
        }
    };
    let x = gen_sparse_signal::<S>(n, s, spec.signal, component_seed(inst, "signal"))?;
    let clean = measure(a, &x)?;
    let y = amop::add_noise(clean.as_slice(), snr.db(), component_seed(inst, "noise"))?;

    let cfg = spec.amop_config(m, snr);
    let mut records = Vec::with_capacity(spec.algorithms.len());
    for &alg in &spec.algorithms {
        let start = Instant::now();
        let res: Option<RecoveryResult<S>> = match alg {
            Algorithm::Amop => Some(amop(a, y.as_slice(), &cfg)?),
            Algorithm::Omp => Some(omp(a, y.as_slice(), cfg.halt_eps, cfg.max_iters)?),
            // CoSaMP's merge step needs 3s <= m; otherwise the trial fails.
            Algorithm::Cosamp if 3 * s > m => None,
            Algorithm::Cosamp => Some(cosamp(a, y.as_slice(), s, cfg.halt_eps, spec.cosamp_iters(m))?),
        };
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let record = match res {
            Some(res) => {
                let rel_error = relative_error(&x, &res.estimate)?;
                let support = if spec.kind == ExperimentKind::StapSupport {
                    stap_support(spec, &x, &res.estimate)?
                } else {
                    Vec::new()
                };
                TrialRecord {
                    m,
                    sparsity: s,
                    snr,
                    trial,
                    instance_seed: inst,
                    seed: record_seed(inst, alg.label()),
                    algorithm: alg,
                    success: rel_error < spec.exact_tol,
                    rel_error,
                    iterations: res.iterations,
                    halt_reason: res.halt_reason.as_str(),
                    residual_nonincreasing: res.residual_history.windows(2).all(|w| w[1] <= w[0] + 1e-12),
                    wall_ms,
                    support,
                }
            }
            None => TrialRecord {
                m,
                sparsity: s,
                snr,
                trial,
                instance_seed: inst,
                seed: record_seed(inst, alg.label()),
                algorithm: alg,
                success: false,
                rel_error: 1.0,
                iterations: 0,
                halt_reason: "rejected",
                residual_nonincreasing: true,
                wall_ms,
                support: if spec.kind == ExperimentKind::StapSupport {
                    stap_support(spec, &x, &SparseSignal::zero(n))?
                } else {
                    Vec::new()
                },
            },
        };
        records.push(record);
    }
    Ok(records)
}

/// Detections are estimated entries at least `detect_threshold` times the
/// largest estimated magnitude.
fn stap_support<S: Scalar>(
    spec: &ExperimentSpec,
    truth: &SparseSignal<S>,
    est: &SparseSignal<S>,
) -> Result<Vec<SupportMetrics>> {
    let MeasurementEnsemble::SpatialTemporal(grid) = spec.ensemble else {
        unreachable!("validated: support experiments use the spatial-temporal ensemble");
    };
    let mags: Vec<f64> = est.values().iter().map(|v| v.modulus().to_f64_lossy()).collect();
    let peak = mags.iter().cloned().fold(0.0, f64::max);
    let detected: Vec<usize> = est
        .support()
        .iter()
        .zip(&mags)
        .filter(|(_, &v)| peak > 0.0 && v >= spec.stap.detect_threshold * peak)
        .map(|(&i, _)| i)
        .collect();
    spec.stap
        .tolerances
        .iter()
        .map(|&tol| Ok(support_metrics(truth.support(), &detected, Some(&grid), tol)?))
        .collect()
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Summary table of a Monte-Carlo experiment. Each group is folded in
/// trial-index order whatever order `trials` arrives in.
pub fn aggregate(spec: &ExperimentSpec, trials: &[TrialRecord]) -> Table {
    let group = |m: usize, s: usize, snr: Snr, alg: Algorithm| -> Vec<&TrialRecord> {
        let mut g: Vec<&TrialRecord> = trials
            .iter()
            .filter(|r| r.m == m && r.sparsity == s && r.snr == snr && r.algorithm == alg)
            .collect();
        g.sort_by_key(|r| r.trial);
        g
    };
    match spec.kind {
        ExperimentKind::RecoveryPercentage => {
            let mut t = Table::new(["ensemble", "signal_model", "N", "S", "m", "algorithm", "trials", "successes", "percentage"]);
            let snr = spec.snr_db[0];
            for &s in &spec.sparsity {
                for &m in &spec.m_values() {
                    for &alg in &spec.algorithms {
                        let g = group(m, s, snr, alg);
                        let ok = g.iter().filter(|r| r.success).count();
                        t.push(vec![
                            spec.ensemble.label().into(),
                            spec.signal.label().into(),
                            spec.n().into(),
                            s.into(),
                            m.into(),
                            alg.label().into(),
                            g.len().into(),
                            ok.into(),
                            (100.0 * ok as f64 / g.len() as f64).into(),
                        ]);
                    }
                }
            }
            t
        }
        ExperimentKind::NoiseSweep => {
            let mut t = Table::new([
                "snr_db", "m", "algorithm", "trials", "median_rel_error", "mean_rel_error", "q10", "q90",
            ]);
            let s = spec.sparsity[0];
            for &snr in &spec.snr_db {
                for &m in &spec.m_values() {
                    for &alg in &spec.algorithms {
                        let mut errs: Vec<f64> = group(m, s, snr, alg).iter().map(|r| r.rel_error).collect();
                        errs.sort_by(f64::total_cmp);
                        let mean = errs.iter().sum::<f64>() / errs.len() as f64;
                        t.push(vec![
                            snr.label().into(),
                            m.into(),
                            alg.label().into(),
                            errs.len().into(),
                            quantile(&errs, 0.5).into(),
                            mean.into(),
                            quantile(&errs, 0.1).into(),
                            quantile(&errs, 0.9).into(),
                        ]);
                    }
                }
            }
            t
        }
        ExperimentKind::StapSupport => {
            let mut t = Table::new(["tolerance", "algorithm", "trials", "mean_hits", "mean_false_alarms"]);
            let (m, s, snr) = (spec.m_values()[0], spec.sparsity[0], spec.snr_db[0]);
            for (ti, &tol) in spec.stap.tolerances.iter().enumerate() {
                for &alg in &spec.algorithms {
                    let g = group(m, s, snr, alg);
                    let n = g.len() as f64;
                    let hits = g.iter().map(|r| r.support[ti].hits as f64).sum::<f64>() / n;
                    let fa = g.iter().map(|r| r.support[ti].false_alarms as f64).sum::<f64>() / n;
                    t.push(vec![tol.into(), alg.label().into(), g.len().into(), hits.into(), fa.into()]);
                }
            }
            t
        }
        ExperimentKind::PminTable | ExperimentKind::DynamicRangeCurve => unreachable!("closed-form kinds"),
    }
}

/// `p_min(K, T)` for `K = 1..=k_max` and each `T`, beside the regularized
/// selection's fixed energy guarantee.
pub fn pmin_table(k_max: usize, t_values: &[f64]) -> Table {
    let mut cols = vec!["K".to_string()];
    cols.extend(t_values.iter().map(|t| format!("t_{}", format_g9(*t))));
    cols.push("romp".into());
    let mut table = Table::new(cols);
    for k in 1..=k_max {
        let mut row: Vec<Cell> = vec![k.into()];
        row.extend(t_values.iter().map(|&t| Cell::from(p_min(k, t))));
        row.push(amop::metrics::ROMP_ENERGY_GUARANTEE.into());
        table.push(row);
    }
    table
}

/// Smallest admissible magnitude for `s = 2..=s_max` at each noise bound.
pub fn drange_table(s_max: usize, noise_bounds: &[f64]) -> Result<Table> {
    let mut cols = vec!["s".to_string()];
    cols.extend(noise_bounds.iter().map(|e| format!("eps_{}", format_g9(*e))));
    let mut table = Table::new(cols);
    for s in 2..=s_max {
        let mut row: Vec<Cell> = vec![s.into()];
        for &e in noise_bounds {
            row.push(dynamic_range_curve(s, e)?.into());
        }
        table.push(row);
    }
    Ok(table)
}
