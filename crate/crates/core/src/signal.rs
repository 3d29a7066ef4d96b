//! Sparse target signals, noiseless measurement and SNR-exact noise.

use num_traits::{Float, Zero};
use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{DenseMatrix, DenseVector};
use crate::scalar::{axpy, RealScalar, Scalar};
use crate::sensing::rng_from_seed;

/// Exactly sparse vector: strictly increasing support and the matching
/// nonzero values.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal<S> {
    ambient_dim: usize,
    support: Vec<usize>,
    values: Vec<S>,
}

impl<S: Scalar> SparseSignal<S> {
    /// Validates and wraps a support/value pair. The support must be
    /// strictly increasing and every value nonzero and finite.
    pub fn new(ambient_dim: usize, support: Vec<usize>, values: Vec<S>) -> Result<Self> {
        check_dim("sparse_signal", support.len(), values.len())?;
        if ambient_dim == 0 {
            return Err(Error::InvalidInput("ambient dimension must be positive".into()));
        }
        for w in support.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidInput("support must be strictly increasing".into()));
            }
        }
        if let Some(&last) = support.last() {
            if last >= ambient_dim {
                return Err(Error::IndexOutOfBounds {
                    index: last,
                    len: ambient_dim,
                });
            }
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        if values.iter().any(|&v| v == S::zero()) {
            return Err(Error::InvalidInput("sparse signal values must be nonzero".into()));
        }
        Ok(Self {
            ambient_dim,
            support,
            values,
        })
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            support: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Keeps the nonzero entries of `(index, value)` pairs given in any order.
    pub fn from_pairs(ambient_dim: usize, pairs: impl IntoIterator<Item = (usize, S)>) -> Result<Self> {
        let mut pairs: Vec<(usize, S)> = pairs.into_iter().filter(|&(_, v)| v != S::zero()).collect();
        pairs.sort_by_key(|&(i, _)| i);
        let (support, values) = pairs.into_iter().unzip();
        Self::new(ambient_dim, support, values)
    }

    /// Nonzero entries of a dense vector.
    pub fn from_dense(dense: &[S]) -> Result<Self> {
        Self::from_pairs(dense.len(), dense.iter().copied().enumerate())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, S)> + '_ {
        self.support.iter().copied().zip(self.values.iter().copied())
    }

    pub fn to_dense(&self) -> DenseVector<S> {
        let mut out = DenseVector::zeros(self.ambient_dim);
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }

    pub fn scaled(&self, factor: S) -> Self {
        Self::from_pairs(self.ambient_dim, self.iter().map(|(i, v)| (i, v * factor)))
            .expect("scaling preserves validity")
    }

    pub fn norm(&self) -> S::Real {
        crate::scalar::norm(&self.values)
    }

    /// `(min |x_j|, max |x_j|)` over the support.
    pub fn magnitude_range(&self) -> Option<(S::Real, S::Real)> {
        let mut it = self.values.iter().map(|v| v.modulus());
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), m| (lo.min(m), hi.max(m))))
    }
}

/// Magnitude profile of generated sparse signals.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "snake_case", deny_unknown_fields))]
pub enum SignalModel {
    /// Equal magnitudes.
    Flat,
    /// Contiguous runs of indices sharing one value; run levels are
    /// log-uniform in `level_range` and rescaled so the largest is 1.
    PiecewiseFlat { n_pieces: usize, level_range: [f64; 2] },
    /// Magnitudes `alpha^(i-1)`, `i = 1..S`.
    Exponential { alpha: f64 },
    /// Magnitudes `(i/S)^(1/p)`, `i = 1..S`.
    Polynomial { p: f64 },
}

impl SignalModel {
    /// Piecewise-flat model with the default number of pieces for sparsity `s`.
    pub fn piecewise_flat_default(s: usize) -> Self {
        Self::PiecewiseFlat {
            n_pieces: (s / 4).max(1),
            level_range: [0.1, 1.0],
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Self::Flat => "flat".into(),
            Self::PiecewiseFlat { n_pieces, level_range } => {
                format!("piecewise_flat(pieces={n_pieces};levels={}..{})", level_range[0], level_range[1])
            }
            Self::Exponential { alpha } => format!("exponential(alpha={alpha})"),
            Self::Polynomial { p } => format!("polynomial(p={p})"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Flat => true,
            Self::PiecewiseFlat { n_pieces, level_range: [lo, hi] } => {
                n_pieces >= 1 && lo > 0.0 && hi >= lo && hi.is_finite()
            }
            Self::Exponential { alpha } => alpha > 0.0 && alpha < 1.0,
            Self::Polynomial { p } => p > 0.0 && p < 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("signal model parameters out of range: {self:?}")))
        }
    }
}

/// Draws an `s`-sparse signal in dimension `n`.
///
/// Signs (real fields) or phases (complex fields) are uniform. Every
/// magnitude lies in `(0, 1]` and the largest equals 1.
pub fn gen_sparse_signal<S: Scalar>(n: usize, s: usize, model: SignalModel, seed: u64) -> Result<SparseSignal<S>> {
    if s == 0 || s > n {
        return Err(Error::InvalidInput(format!("need 1 <= S <= N, got S={s}, N={n}")));
    }
    model.validate()?;
    let mut rng = rng_from_seed(seed);

    let pairs: Vec<(usize, S)> = match model {
        SignalModel::PiecewiseFlat { n_pieces, level_range } => {
            piecewise_flat(n, s, n_pieces.min(s), level_range, &mut rng)
        }
        _ => {
            let support = index::sample(&mut rng, n, s).into_vec();
            let mut mags: Vec<f64> = match model {
                SignalModel::Flat => vec![1.0; s],
                SignalModel::Exponential { alpha } => (0..s).map(|i| alpha.powi(i as i32)).collect(),
                SignalModel::Polynomial { p } => {
                    (1..=s).rev().map(|i| (i as f64 / s as f64).powf(1.0 / p)).collect()
                }
                SignalModel::PiecewiseFlat { .. } => unreachable!(),
            };
            mags.shuffle(&mut rng);
            support
                .into_iter()
                .zip(mags)
                .map(|(i, mag)| (i, S::random_unit(&mut rng).scale(S::Real::lit(mag))))
                .collect()
        }
    };
    SparseSignal::from_pairs(n, pairs)
}

fn piecewise_flat<S: Scalar, R: Rng + ?Sized>(
    n: usize,
    s: usize,
    pieces: usize,
    [lo, hi]: [f64; 2],
    rng: &mut R,
) -> Vec<(usize, S)> {
    // Run lengths from `pieces - 1` distinct cut points in 1..s.
    let mut cuts: Vec<usize> = index::sample(rng, s - 1, pieces - 1).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    let mut lengths = Vec::with_capacity(pieces);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(s)) {
        lengths.push(c - prev);
        prev = c;
    }

    // Gap offsets drawn from 0..=n-s, sorted, place the runs left to right.
    let mut offsets: Vec<usize> = (0..pieces).map(|_| rng.random_range(0..=n - s)).collect();
    offsets.sort_unstable();

    let levels: Vec<f64> = (0..pieces)
        .map(|_| (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp())
        .collect();
    let top = levels.iter().cloned().fold(f64::MIN, f64::max);

    let mut out = Vec::with_capacity(s);
    let mut used = 0;
    for ((len, off), level) in lengths.into_iter().zip(offsets).zip(levels) {
        let value = S::random_unit(rng).scale(S::Real::lit(level / top));
        let start = off + used;
        out.extend((start..start + len).map(|i| (i, value)));
        used += len;
    }
    out
}

/// `y = sum_j x_j * column_j(A)` over the support of `x`.
pub fn measure<S: Scalar>(a: &DenseMatrix<S>, x: &SparseSignal<S>) -> Result<DenseVector<S>> {
    check_dim("measure", a.cols(), x.ambient_dim())?;
    let mut y = DenseVector::zeros(a.rows());
    for (j, v) in x.iter() {
        axpy(v, a.column(j), &mut y);
    }
    Ok(y)
}

/// Adds white Gaussian noise rescaled so that `10 log10(|y|^2 / |n|^2)` is
/// exactly `snr_db`. An infinite `snr_db` returns `y` unchanged.
pub fn add_noise<S: Scalar>(y: &[S], snr_db: f64, seed: u64) -> Result<DenseVector<S>> {
    if snr_db == f64::INFINITY {
        return DenseVector::new(y.to_vec());
    }
    if !snr_db.is_finite() {
        return Err(Error::InvalidInput(format!("SNR must be finite or +inf, got {snr_db}")));
    }
    let y_norm = crate::scalar::norm(y);
    if y_norm == S::Real::zero() {
        return Err(Error::InvalidInput("SNR is undefined for a zero measurement".into()));
    }
    let mut rng = rng_from_seed(seed);
    let noise: Vec<S> = (0..y.len()).map(|_| S::random_gaussian(&mut rng)).collect();
    let n_norm = crate::scalar::norm(&noise);
    let target = y_norm.to_f64_lossy() * 10f64.powf(-snr_db / 20.0);
    let factor = S::Real::lit(target) / n_norm;
    DenseVector::new(y.iter().zip(noise).map(|(&yi, ni)| yi + ni.scale(factor)).collect())
}
