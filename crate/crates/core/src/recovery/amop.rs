use num_traits::Zero;

use crate::error::{check_dim, Result};
use crate::linalg::{DenseMatrix, IncrementalQR};
use crate::recovery::proxy::{rank_proxy_masked, select_k};
use crate::recovery::{AmopConfig, HaltReason, RecoveryResult, StepRecord};
use crate::scalar::{norm, RealScalar, Scalar};
use crate::signal::SparseSignal;

/// Candidate batch proposed by a selection rule.
struct Batch {
    indices: Vec<usize>,
    k: usize,
    beta: Option<f64>,
    at_drop: bool,
    energy_fraction: f64,
    nonzero_ranked: usize,
}

/// Adaptive orthogonal matching pursuit.
///
/// Each iteration correlates the residual with every column, ranks the
/// correlations of columns not yet chosen, admits the leading `k` of them
/// where `k` comes from [`select_k`], and refits by least squares over the
/// whole support through an [`IncrementalQR`].
pub fn amop<S: Scalar>(a: &DenseMatrix<S>, y: &[S], cfg: &AmopConfig) -> Result<RecoveryResult<S>> {
    cfg.validate()?;
    let fixed_k = cfg.fixed_k;
    pursue(a, y, cfg.halt_eps, cfg.max_iters, cfg.lin_dep_tol, |u, excluded, budget| {
        let ranked = rank_proxy_masked(u, |i| excluded[i]);
        let nonzero = ranked.nonzero_len();
        if nonzero == 0 {
            return None;
        }
        let (k, beta, at_drop) = match fixed_k {
            Some(k) => (k.min(budget).min(nonzero), None, false),
            None => {
                let sel = select_k(&ranked, cfg, budget);
                (sel.k, Some(sel.beta), sel.at_drop)
            }
        };
        let energy = |n: usize| -> f64 {
            ranked.magnitudes[..n].iter().map(|m| m.to_f64_lossy().powi(2)).sum()
        };
        Some(Batch {
            indices: ranked.perm[..k].to_vec(),
            k,
            beta,
            at_drop,
            energy_fraction: energy(k) / energy(nonzero),
            nonzero_ranked: nonzero,
        })
    })
}

/// Orthogonal matching pursuit: one coordinate per iteration, the one with
/// the largest correlation (lowest index on ties).
pub fn omp<S: Scalar>(a: &DenseMatrix<S>, y: &[S], halt_eps: f64, max_iters: usize) -> Result<RecoveryResult<S>> {
    let cfg = AmopConfig {
        halt_eps,
        max_iters,
        fixed_k: Some(1),
        ..AmopConfig::default()
    };
    cfg.validate()?;
    pursue(a, y, halt_eps, max_iters, cfg.lin_dep_tol, |u, excluded, _| {
        let mut best: Option<(usize, S::Real)> = None;
        let mut total = S::Real::zero();
        let mut nonzero = 0;
        for (i, z) in u.iter().enumerate().filter(|&(i, _)| !excluded[i]) {
            let m = z.modulus();
            if m > S::Real::zero() {
                nonzero += 1;
                total += m * m;
            }
            if best.is_none_or(|(_, bm)| m > bm) {
                best = Some((i, m));
            }
        }
        let (i, m) = best.filter(|&(_, m)| m > S::Real::zero())?;
        Some(Batch {
            indices: vec![i],
            k: 1,
            beta: None,
            at_drop: false,
            energy_fraction: (m * m / total).to_f64_lossy(),
            nonzero_ranked: nonzero,
        })
    })
}

/// Shared loop of the incremental pursuits. `choose` receives the proxy,
/// the exclusion mask and the remaining support budget.
fn pursue<S, F>(
    a: &DenseMatrix<S>,
    y: &[S],
    halt_eps: f64,
    max_iters: usize,
    lin_dep_tol: f64,
    mut choose: F,
) -> Result<RecoveryResult<S>>
where
    S: Scalar,
    F: FnMut(&[S], &[bool], usize) -> Option<Batch>,
{
    check_dim("pursuit", a.rows(), y.len())?;
    let n = a.cols();
    let y_norm = norm(y);
    if y_norm == S::Real::zero() {
        return Ok(RecoveryResult {
            estimate: SparseSignal::zero(n),
            support: Vec::new(),
            iterations: 0,
            residual_history: Vec::new(),
            halt_reason: HaltReason::ZeroMeasurement,
            steps: Vec::new(),
        });
    }

    // The least-squares fit must stay overdetermined.
    let support_cap = a.rows().saturating_sub(1).max(1);
    let mut qr = IncrementalQR::with_tolerance(a.rows(), S::Real::lit(lin_dep_tol));
    let mut excluded = vec![false; n];
    let mut residual = y.to_vec();
    let mut coeffs = Vec::new();
    let mut history = Vec::new();
    let mut steps = Vec::new();

    let halt_reason = loop {
        if steps.len() >= max_iters {
            break HaltReason::MaxIters;
        }
        if qr.len() >= support_cap {
            break HaltReason::SupportFull;
        }

        let u = a.adjoint_matvec(&residual)?;
        let Some(batch) = choose(&u, &excluded, support_cap - qr.len()) else {
            break HaltReason::Stalled;
        };
        for &i in &batch.indices {
            excluded[i] = true;
        }
        let before = qr.len();
        let rejected = qr.extend(a, &batch.indices)?;
        if qr.len() == before {
            break HaltReason::Stalled;
        }

        let (x, r) = qr.solve_with_residual(y)?;
        coeffs = x.into_vec();
        residual = r.into_vec();
        let rel = (norm(&residual) / y_norm).to_f64_lossy();
        history.push(rel);
        steps.push(StepRecord {
            selected: qr.selected()[before..].to_vec(),
            rejected,
            k: batch.k,
            beta: batch.beta,
            at_drop: batch.at_drop,
            energy_fraction: batch.energy_fraction,
            nonzero_ranked: batch.nonzero_ranked,
            relative_residual: rel,
        });
        if rel < halt_eps {
            break HaltReason::Converged;
        }
    };

    let support = qr.selected().to_vec();
    let estimate = SparseSignal::from_pairs(n, support.iter().copied().zip(coeffs))?;
    Ok(RecoveryResult {
        estimate,
        support,
        iterations: steps.len(),
        residual_history: history,
        halt_reason,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{gen_sparse_signal, measure, SignalModel};

    #[test]
    fn identity_recovers_in_one_iteration() {
        let n = 32;
        let a = DenseMatrix::<f64>::identity(n).unwrap();
        let x = gen_sparse_signal::<f64>(n, 3, SignalModel::Flat, 11).unwrap();
        let y = measure(&a, &x).unwrap();
        let cfg = AmopConfig {
            cap_k: n,
            ..AmopConfig::default()
        };
        let res = amop(&a, &y, &cfg).unwrap();
        assert_eq!(res.iterations, 1);
        assert_eq!(res.halt_reason, HaltReason::Converged);
        let mut sup = res.support.clone();
        sup.sort_unstable();
        assert_eq!(sup, x.support());
        assert_eq!(res.estimate, x);
    }

    #[test]
    fn zero_measurement_short_circuits() {
        let a = DenseMatrix::<f64>::identity(4).unwrap();
        let res = amop(&a, &[0.0; 4], &AmopConfig::default()).unwrap();
        assert_eq!(res.halt_reason, HaltReason::ZeroMeasurement);
        assert!(res.support.is_empty());
        assert_eq!(res.estimate.sparsity(), 0);
        let res = omp(&a, &[0.0; 4], 1e-6, 10).unwrap();
        assert_eq!(res.halt_reason, HaltReason::ZeroMeasurement);
    }

    #[test]
    fn omp_takes_one_coordinate_per_pass() {
        let a = DenseMatrix::<f64>::identity(10).unwrap();
        let x = gen_sparse_signal::<f64>(10, 3, SignalModel::Flat, 5).unwrap();
        let y = measure(&a, &x).unwrap();
        let res = omp(&a, &y, 1e-6, 10).unwrap();
        assert_eq!(res.iterations, 3);
        assert_eq!(res.estimate, x);
        assert!(res.steps.iter().all(|s| s.selected.len() == 1));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = DenseMatrix::<f64>::identity(4).unwrap();
        assert!(amop(&a, &[1.0; 3], &AmopConfig::default()).is_err());
        assert!(omp(&a, &[1.0; 5], 1e-6, 3).is_err());
    }

    #[test]
    fn invalid_config_is_rejected() {
        let a = DenseMatrix::<f64>::identity(4).unwrap();
        let cfg = AmopConfig {
            threshold: 1.5,
            ..AmopConfig::default()
        };
        assert!(amop(&a, &[1.0; 4], &cfg).is_err());
    }

    #[test]
    fn max_iters_is_respected() {
        let a = DenseMatrix::<f64>::identity(10).unwrap();
        let x = gen_sparse_signal::<f64>(10, 5, SignalModel::Flat, 5).unwrap();
        let y = measure(&a, &x).unwrap();
        let res = omp(&a, &y, 1e-6, 2).unwrap();
        assert_eq!(res.halt_reason, HaltReason::MaxIters);
        assert_eq!(res.iterations, 2);
    }
}
