//! Closed-form selection guarantees and the evaluation metrics used by the
//! experiment runner.

use num_traits::Zero;

use crate::error::{check_dim, Error, Result};
use crate::recovery::RankedProxy;
use crate::scalar::{RealScalar, Scalar};
use crate::sensing::StapGrid;
use crate::signal::SparseSignal;

/// Energy share guaranteed to ROMP's regularized batch; AMOP's bound is
/// compared against it.
pub const ROMP_ENERGY_GUARANTEE: f64 = 0.5;

/// Default relative-error threshold for calling a recovery exact.
pub const EXACT_RECOVERY_TOL: f64 = 1e-6;

/// Lower bound on the energy share captured by an adaptive batch:
/// `1 / (1 + (K - 1)(1 - T)^2)`.
pub fn p_min(k: usize, t: f64) -> f64 {
    let d = 1.0 - t;
    1.0 / (1.0 + (k as f64 - 1.0) * d * d)
}

/// Share of the energy of the first `K` ranked magnitudes held by the
/// first `k`.
pub fn energy_fraction<R: RealScalar>(ranked: &RankedProxy<R>, k: usize, cap: usize) -> Result<f64> {
    if k == 0 || k > cap || cap > ranked.len() {
        return Err(Error::InvalidInput(format!(
            "need 1 <= k <= K <= {}, got k={k}, K={cap}",
            ranked.len()
        )));
    }
    let sq = |n: usize| -> f64 { ranked.magnitudes[..n].iter().map(|m| m.to_f64_lossy().powi(2)).sum() };
    let total = sq(cap);
    if total == 0.0 {
        return Err(Error::InvalidInput("energy fraction of all-zero magnitudes".into()));
    }
    Ok(sq(k) / total)
}

/// Support-recovery condition on the dynamic range of `x0`:
/// `min|x| >= 2 (eps + delta/(1-delta) sqrt(K/2) max|x|)` with `K` twice
/// the sparsity of `x0` and `delta` its order-`K` isometry constant.
pub fn recovery_condition<S: Scalar>(x0: &SparseSignal<S>, delta_k: f64, noise_bound: f64) -> Result<bool> {
    if !(0.0..1.0).contains(&delta_k) {
        return Err(Error::InvalidInput(format!("delta_K must lie in [0, 1), got {delta_k}")));
    }
    let (lo, hi) = x0
        .magnitude_range()
        .ok_or_else(|| Error::InvalidInput("recovery condition needs a nonempty support".into()))?;
    Ok(lo.to_f64_lossy() >= recovery_condition_bound(x0.sparsity(), delta_k, noise_bound, hi.to_f64_lossy()))
}

/// Right-hand side of [`recovery_condition`]: the smallest magnitude it
/// allows for a signal of the given sparsity and peak magnitude.
pub fn recovery_condition_bound(sparsity: usize, delta_k: f64, noise_bound: f64, max_magnitude: f64) -> f64 {
    let half_k = sparsity as f64;
    2.0 * (noise_bound + delta_k / (1.0 - delta_k) * half_k.sqrt() * max_magnitude)
}

/// Smallest admissible element magnitude (largest normalized to 1) when
/// the isometry constant meets ROMP's `0.03 / sqrt(ln s)` requirement.
/// Uses the natural logarithm.
pub fn dynamic_range_curve(s: usize, noise_bound: f64) -> Result<f64> {
    if s < 2 {
        return Err(Error::InvalidInput(format!("dynamic range curve needs s >= 2, got {s}")));
    }
    let s = s as f64;
    Ok(0.06 * s.sqrt() / (s.ln().sqrt() - 0.03) + 2.0 * noise_bound)
}

/// `|x_true - x_est| / |x_true|`.
pub fn relative_error<S: Scalar>(x_true: &SparseSignal<S>, x_est: &SparseSignal<S>) -> Result<f64> {
    check_dim("relative_error", x_true.ambient_dim(), x_est.ambient_dim())?;
    let denom = x_true.norm();
    if denom == S::Real::zero() {
        return Err(Error::InvalidInput("relative error against a zero signal".into()));
    }
    let diff = x_true.to_dense().sub(&x_est.to_dense())?;
    Ok((diff.norm() / denom).to_f64_lossy())
}

/// Relative error strictly below `tol`.
pub fn exact_recovery<S: Scalar>(x_true: &SparseSignal<S>, x_est: &SparseSignal<S>, tol: f64) -> Result<bool> {
    Ok(relative_error(x_true, x_est)? < tol)
}

/// Tolerance-aware support matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SupportMetrics {
    pub tolerance: usize,
    pub hits: usize,
    pub misses: usize,
    pub false_alarms: usize,
}

/// Matches estimated support cells to true ones within `tolerance`.
///
/// Distance is Chebyshev distance on the grid when one is given, plain
/// index distance otherwise. Pairs are matched greedily nearest first and
/// each estimated cell can be used once; unmatched estimated cells are
/// false alarms.
pub fn support_metrics(
    true_support: &[usize],
    est_support: &[usize],
    grid: Option<&StapGrid>,
    tolerance: usize,
) -> Result<SupportMetrics> {
    if let Some(g) = grid {
        if g.spatial_grid == 0 || g.doppler_grid == 0 {
            return Err(Error::InvalidInput("grid dimensions must be positive".into()));
        }
        let n = g.cols();
        if let Some(&bad) = true_support.iter().chain(est_support).find(|&&i| i >= n) {
            return Err(Error::IndexOutOfBounds { index: bad, len: n });
        }
    }
    let distance = |a: usize, b: usize| -> usize {
        match grid {
            Some(g) => {
                let (ra, ca) = g.cell(a);
                let (rb, cb) = g.cell(b);
                ra.abs_diff(rb).max(ca.abs_diff(cb))
            }
            None => a.abs_diff(b),
        }
    };

    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    for (ti, &t) in true_support.iter().enumerate() {
        for (ei, &e) in est_support.iter().enumerate() {
            let d = distance(t, e);
            if d <= tolerance {
                pairs.push((d, ti, ei));
            }
        }
    }
    pairs.sort_unstable();

    let mut true_used = vec![false; true_support.len()];
    let mut est_used = vec![false; est_support.len()];
    let mut hits = 0;
    for (_, ti, ei) in pairs {
        if !true_used[ti] && !est_used[ei] {
            true_used[ti] = true;
            est_used[ei] = true;
            hits += 1;
        }
    }
    Ok(SupportMetrics {
        tolerance,
        hits,
        misses: true_support.len() - hits,
        false_alarms: est_support.len() - hits,
    })
}
