//! Greedy sparse recovery: adaptive orthogonal matching pursuit, plain OMP
//! and CoSaMP.

mod amop;
mod cosamp;
mod proxy;

pub use amop::{amop, omp};
pub use cosamp::{cosamp, COSAMP_STAGNATION_ITERS, COSAMP_STAGNATION_TOL};
pub use proxy::{rank_proxy, rank_proxy_masked, select_k, KSelection, RankedProxy};

use crate::error::{Error, Result};
use crate::linalg::DEFAULT_LIN_DEP_TOL;
use crate::signal::SparseSignal;

/// Parameters of the adaptive pursuit.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct AmopConfig {
    /// Relative-drop threshold `T` in `(0, 1)`.
    pub threshold: f64,
    /// Stop once `|r| / |y|` falls below this.
    pub halt_eps: f64,
    /// Upper bound on coordinates admitted per iteration.
    pub cap_k: usize,
    /// The threshold scale stops decaying below this value.
    pub beta_floor: f64,
    /// Geometric decay of the threshold scale.
    pub beta_decay: f64,
    pub max_iters: usize,
    /// Relative tolerance for rejecting dependent columns.
    pub lin_dep_tol: f64,
    /// Admit exactly this many coordinates per iteration instead of using
    /// the adaptive rule. `Some(1)` is orthogonal matching pursuit.
    #[cfg_attr(feature = "serde", serde(default))]
    pub fixed_k: Option<usize>,
}

impl Default for AmopConfig {
    fn default() -> Self {
        Self {
            threshold: 0.3,
            halt_eps: 1e-6,
            cap_k: 16,
            beta_floor: 0.1,
            beta_decay: 0.9,
            max_iters: 1000,
            lin_dep_tol: DEFAULT_LIN_DEP_TOL,
            fixed_k: None,
        }
    }
}

impl AmopConfig {
    /// Benchmark defaults for `m` measurements: cap `max(2, m/10)`, at most
    /// `m` iterations, and a halting level matched to the noise
    /// (`10^(-snr/20)`, or `1e-6` when noiseless).
    pub fn for_measurements(m: usize, snr_db: f64) -> Self {
        Self {
            halt_eps: default_halt_eps(snr_db),
            cap_k: (m / 10).max(2),
            max_iters: m.max(1),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidInput(format!("AMOP config: {what}")));
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad("threshold must lie in (0, 1)");
        }
        if !(self.halt_eps > 0.0) {
            return bad("halt_eps must be positive");
        }
        if self.cap_k == 0 {
            return bad("cap_k must be positive");
        }
        if !(self.beta_floor > 0.0 && self.beta_floor < 1.0) {
            return bad("beta_floor must lie in (0, 1)");
        }
        if !(self.beta_decay > 0.0 && self.beta_decay < 1.0) {
            return bad("beta_decay must lie in (0, 1)");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive");
        }
        if !(self.lin_dep_tol >= 0.0) {
            return bad("lin_dep_tol must be nonnegative");
        }
        if self.fixed_k == Some(0) {
            return bad("fixed_k must be positive");
        }
        Ok(())
    }
}

/// Halting level used when none is given: `1e-6` without noise, otherwise
/// the noise-to-signal amplitude ratio `10^(-snr/20)`.
pub fn default_halt_eps(snr_db: f64) -> f64 {
    if snr_db.is_infinite() && snr_db > 0.0 {
        1e-6
    } else {
        10f64.powf(-snr_db / 20.0)
    }
}

/// Why a pursuit stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltReason {
    /// Relative residual fell below the halting level.
    Converged,
    MaxIters,
    /// The support reached `rows - 1` columns.
    SupportFull,
    /// The measurement vector was zero.
    ZeroMeasurement,
    /// No further progress was possible: no candidate with a nonzero proxy,
    /// every candidate was linearly dependent, or (CoSaMP) the residual
    /// stagnated.
    Stalled,
}

impl HaltReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Converged => "converged",
            Self::MaxIters => "max_iters",
            Self::SupportFull => "support_full",
            Self::ZeroMeasurement => "zero_measurement",
            Self::Stalled => "stalled",
        }
    }
}

/// What one iteration did.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// Coordinates that entered the support this iteration (for CoSaMP, the
    /// whole pruned support).
    pub selected: Vec<usize>,
    /// Candidates dropped as linearly dependent.
    pub rejected: Vec<usize>,
    /// Batch size chosen by the selection rule.
    pub k: usize,
    /// Threshold scale at which the adaptive rule stopped.
    pub beta: Option<f64>,
    /// Whether `k` sits at a qualifying relative drop (see [`KSelection`]).
    pub at_drop: bool,
    /// Energy share of the first `k` ranked proxy magnitudes among all
    /// nonzero ranked magnitudes.
    pub energy_fraction: f64,
    /// Number of nonzero ranked proxy magnitudes.
    pub nonzero_ranked: usize,
    pub relative_residual: f64,
}

/// Output of a recovery run.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult<S> {
    pub estimate: SparseSignal<S>,
    /// Support in the order it was built (selection order for AMOP/OMP).
    pub support: Vec<usize>,
    pub iterations: usize,
    /// `|r| / |y|` after each iteration.
    pub residual_history: Vec<f64>,
    pub halt_reason: HaltReason,
    pub steps: Vec<StepRecord>,
}

impl<S> RecoveryResult<S> {
    /// Support after each iteration, cumulatively.
    pub fn support_trajectory(&self) -> Vec<Vec<usize>> {
        let mut acc = Vec::new();
        self.steps
            .iter()
            .map(|s| {
                acc.extend_from_slice(&s.selected);
                acc.clone()
            })
            .collect()
    }
}
