//! Greedy sparse recovery with adaptive batch selection.
//!
//! The crate provides adaptive orthogonal matching pursuit ([`amop`]),
//! which picks a data-driven number of coordinates per iteration from the
//! relative drops of the sorted proxy, together with [`omp`] and [`cosamp`]
//! baselines, the measurement ensembles and signal models used to exercise
//! them, and the analysis quantities used to evaluate them.
//!
//! Everything numeric is generic over [`Scalar`], implemented for `f32`,
//! `f64` and their complex counterparts. The aliases below name the common
//! double-precision instantiations.

pub mod error;
pub mod linalg;
pub mod metrics;
pub mod recovery;
pub mod scalar;
pub mod sensing;
pub mod signal;

pub use num_complex::{Complex, Complex64};

pub use error::{Error, Result};
pub use linalg::{adjoint_matvec, dense_lstsq, matvec, qr_extend, qr_solve, DenseMatrix, DenseVector, IncrementalQR};
pub use metrics::{
    dynamic_range_curve, energy_fraction, exact_recovery, p_min, recovery_condition, relative_error,
    support_metrics, SupportMetrics,
};
pub use recovery::{
    amop, cosamp, omp, rank_proxy, select_k, AmopConfig, HaltReason, RankedProxy, RecoveryResult, StepRecord,
};
pub use scalar::{RealScalar, Scalar};
pub use sensing::{
    gen_bernoulli, gen_fourier, gen_gaussian, gen_stap, ric_bruteforce, MeasurementEnsemble, RicEstimate, StapGrid,
};
pub use signal::{add_noise, gen_sparse_signal, measure, SignalModel, SparseSignal};

pub type RealMatrix = DenseMatrix<f64>;
pub type ComplexMatrix = DenseMatrix<Complex64>;
pub type RealVector = DenseVector<f64>;
pub type ComplexVector = DenseVector<Complex64>;
pub type RealSignal = SparseSignal<f64>;
pub type ComplexSignal = SparseSignal<Complex64>;
pub type RealQR = IncrementalQR<f64>;
pub type ComplexQR = IncrementalQR<Complex64>;
