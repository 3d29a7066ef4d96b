use std::cmp::Ordering;

use num_traits::Zero;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{DenseMatrix, IncrementalQR, DEFAULT_LIN_DEP_TOL};
use crate::recovery::proxy::rank_proxy;
use crate::recovery::{HaltReason, RecoveryResult, StepRecord};
use crate::scalar::{axpy, norm, RealScalar, Scalar};
use crate::signal::SparseSignal;

/// Minimum per-iteration improvement of the relative residual below which
/// a CoSaMP iteration counts as stagnant.
pub const COSAMP_STAGNATION_TOL: f64 = 1e-7;
/// Consecutive stagnant iterations that stop CoSaMP.
pub const COSAMP_STAGNATION_ITERS: usize = 3;

/// Compressive sampling matching pursuit with known sparsity `s`.
///
/// Every iteration merges the `2s` largest proxy coordinates with the
/// current support, fits by least squares on the merged set (a fresh
/// factorization, since the set can shrink), and prunes back to the `s`
/// largest coefficients.
pub fn cosamp<S: Scalar>(
    a: &DenseMatrix<S>,
    y: &[S],
    s: usize,
    halt_eps: f64,
    max_iters: usize,
) -> Result<RecoveryResult<S>> {
    check_dim("cosamp", a.rows(), y.len())?;
    if s == 0 {
        return Err(Error::InvalidInput("CoSaMP sparsity must be positive".into()));
    }
    if 3 * s > a.rows() {
        return Err(Error::InvalidInput(format!(
            "CoSaMP needs 3s <= rows for an overdetermined merge step, got s={s}, rows={}",
            a.rows()
        )));
    }
    if !(halt_eps > 0.0) || max_iters == 0 {
        return Err(Error::InvalidInput("halt_eps and max_iters must be positive".into()));
    }

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

    let tol = S::Real::lit(DEFAULT_LIN_DEP_TOL);
    let mut estimate: Vec<(usize, S)> = Vec::new();
    let mut residual = y.to_vec();
    let mut history = Vec::new();
    let mut steps = Vec::new();
    let mut prev_rel = 1.0f64;
    let mut stagnant = 0;

    let halt_reason = loop {
        if steps.len() >= max_iters {
            break HaltReason::MaxIters;
        }
        let u = a.adjoint_matvec(&residual)?;
        let ranked = rank_proxy(&u);
        let total: f64 = ranked.magnitudes.iter().map(|m| m.to_f64_lossy().powi(2)).sum();
        let take = (2 * s).min(ranked.nonzero_len());

        let mut merged: Vec<usize> = ranked.perm[..take].to_vec();
        merged.extend(estimate.iter().map(|&(i, _)| i));
        merged.sort_unstable();
        merged.dedup();

        let mut qr = IncrementalQR::with_tolerance(a.rows(), tol);
        let rejected = qr.extend(a, &merged)?;
        let coeffs = qr.solve(y)?;

        let mut fitted: Vec<(usize, S)> = qr.selected().iter().copied().zip(coeffs.iter().copied()).collect();
        fitted.sort_by(|p, q| {
            q.1.modulus()
                .partial_cmp(&p.1.modulus())
                .unwrap_or(Ordering::Equal)
                .then(p.0.cmp(&q.0))
        });
        fitted.truncate(s);
        fitted.retain(|&(_, v)| v != S::zero());
        fitted.sort_by_key(|&(i, _)| i);
        estimate = fitted;

        residual.copy_from_slice(y);
        for &(j, v) in &estimate {
            axpy(-v, a.column(j), &mut residual);
        }
        let rel = (norm(&residual) / y_norm).to_f64_lossy();
        history.push(rel);
        let lead: f64 = ranked.magnitudes[..take].iter().map(|m| m.to_f64_lossy().powi(2)).sum();
        steps.push(StepRecord {
            selected: estimate.iter().map(|&(i, _)| i).collect(),
            rejected,
            k: take,
            beta: None,
            at_drop: false,
            energy_fraction: if total > 0.0 { lead / total } else { 0.0 },
            nonzero_ranked: ranked.nonzero_len(),
            relative_residual: rel,
        });

        if rel < halt_eps {
            break HaltReason::Converged;
        }
        if prev_rel - rel < COSAMP_STAGNATION_TOL {
            stagnant += 1;
            if stagnant >= COSAMP_STAGNATION_ITERS {
                break HaltReason::Stalled;
            }
        } else {
            stagnant = 0;
        }
        prev_rel = rel;
    };

    let support = estimate.iter().map(|&(i, _)| i).collect();
    Ok(RecoveryResult {
        estimate: SparseSignal::from_pairs(n, estimate)?,
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
        let a = DenseMatrix::<f64>::identity(20).unwrap();
        let x = gen_sparse_signal::<f64>(20, 4, SignalModel::Flat, 3).unwrap();
        let y = measure(&a, &x).unwrap();
        let res = cosamp(&a, &y, 4, 1e-6, 50).unwrap();
        assert_eq!(res.iterations, 1);
        assert_eq!(res.halt_reason, HaltReason::Converged);
        assert_eq!(res.estimate, x);
    }

    #[test]
    fn underdetermined_merge_is_rejected() {
        let a = DenseMatrix::<f64>::identity(8).unwrap();
        assert!(cosamp(&a, &[1.0; 8], 3, 1e-6, 10).is_err());
        assert!(cosamp(&a, &[1.0; 8], 0, 1e-6, 10).is_err());
        assert!(cosamp(&a, &[1.0; 7], 2, 1e-6, 10).is_err());
    }

    #[test]
    fn zero_measurement() {
        let a = DenseMatrix::<f64>::identity(8).unwrap();
        let res = cosamp(&a, &[0.0; 8], 2, 1e-6, 10).unwrap();
        assert_eq!(res.halt_reason, HaltReason::ZeroMeasurement);
    }
}
