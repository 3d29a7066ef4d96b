//! Measurement-matrix ensembles and an exhaustive restricted-isometry
//! oracle for small matrices.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::{Complex, Complex64};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::{RealScalar, Scalar};

/// Largest number of column subsets [`ric_bruteforce`] will enumerate.
pub const RIC_SUBSET_LIMIT: u128 = 1_000_000;

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Family of measurement matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "snake_case", deny_unknown_fields))]
pub enum MeasurementEnsemble {
    Gaussian,
    Bernoulli,
    Fourier,
    SpatialTemporal(StapGrid),
}

impl MeasurementEnsemble {
    /// Whether the ensemble needs a complex field.
    pub fn is_complex(&self) -> bool {
        matches!(self, Self::Fourier | Self::SpatialTemporal(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::Bernoulli => "bernoulli",
            Self::Fourier => "fourier",
            Self::SpatialTemporal(_) => "spatial_temporal",
        }
    }

    /// Shape `(rows, cols)` this ensemble produces for the requested sizes.
    /// The spatial-temporal dictionary has a fixed shape and ignores them.
    pub fn shape(&self, m: usize, n: usize) -> (usize, usize) {
        match self {
            Self::SpatialTemporal(g) => (g.rows(), g.cols()),
            _ => (m, n),
        }
    }

    /// Draws one matrix. Seeds are ignored by the deterministic
    /// spatial-temporal dictionary.
    pub fn generate<S: Scalar>(&self, m: usize, n: usize, seed: u64) -> Result<DenseMatrix<S>> {
        match self {
            Self::Gaussian => gen_gaussian(m, n, seed),
            Self::Bernoulli => gen_bernoulli(m, n, seed),
            Self::Fourier => cast_complex(&gen_fourier::<f64>(m, n, seed)?),
            Self::SpatialTemporal(g) => cast_complex(&g.dictionary::<f64>()?),
        }
    }
}

fn cast_complex<S: Scalar>(a: &DenseMatrix<Complex64>) -> Result<DenseMatrix<S>> {
    if !S::IS_COMPLEX {
        return Err(Error::InvalidInput(
            "this ensemble has complex entries and needs a complex field".into(),
        ));
    }
    let data = a
        .as_col_major()
        .iter()
        .map(|z| S::from_parts(S::Real::lit(z.re), S::Real::lit(z.im)))
        .collect();
    DenseMatrix::from_col_major(a.rows(), a.cols(), data)
}

fn check_underdetermined(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 || m > n {
        return Err(Error::InvalidInput(format!(
            "need 1 <= m <= N, got m={m}, N={n}"
        )));
    }
    Ok(())
}

/// i.i.d. Gaussian entries with variance `1/m` (circularly symmetric for
/// complex fields).
pub fn gen_gaussian<S: Scalar>(m: usize, n: usize, seed: u64) -> Result<DenseMatrix<S>> {
    check_underdetermined(m, n)?;
    let mut rng = rng_from_seed(seed);
    let scale = S::Real::lit(1.0 / (m as f64).sqrt());
    DenseMatrix::from_fn(m, n, |_, _| S::random_gaussian(&mut rng).scale(scale))
}

/// Equiprobable `+-1/sqrt(m)` entries.
pub fn gen_bernoulli<S: Scalar>(m: usize, n: usize, seed: u64) -> Result<DenseMatrix<S>> {
    check_underdetermined(m, n)?;
    let mut rng = rng_from_seed(seed);
    let v = S::Real::lit(1.0 / (m as f64).sqrt());
    DenseMatrix::from_fn(m, n, |_, _| {
        S::from_real(if rng.random::<bool>() { v } else { -v })
    })
}

/// `m` distinct rows of the unitary `N x N` DFT matrix, chosen uniformly at
/// random and rescaled by `sqrt(N/m)` so every column has unit norm. Rows
/// are kept in ascending frequency order.
pub fn gen_fourier<T: RealScalar>(m: usize, n: usize, seed: u64) -> Result<DenseMatrix<Complex<T>>> {
    check_underdetermined(m, n)?;
    let mut rng = rng_from_seed(seed);
    let mut rows = index::sample(&mut rng, n, m).into_vec();
    rows.sort_unstable();
    let scale = 1.0 / (m as f64).sqrt();
    DenseMatrix::from_fn(m, n, |i, k| {
        let phase = ((rows[i] * k) % n) as f64 / n as f64;
        let (s, c) = (-TAU * phase).sin_cos();
        Complex::new(T::lit(c * scale), T::lit(s * scale))
    })
}

/// Space-time steering-vector dictionary parameters.
///
/// Rows are indexed by `(element p, pulse q)` as `p * n_pulses + q`;
/// columns by the grid cell `(a, b)` as `a * doppler_grid + b`, with spatial
/// frequency `a / spatial_grid` and Doppler frequency `b / doppler_grid`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct StapGrid {
    pub n_elements: usize,
    pub n_pulses: usize,
    pub spatial_grid: usize,
    pub doppler_grid: usize,
}

impl StapGrid {
    pub fn new(n_elements: usize, n_pulses: usize, spatial_grid: usize, doppler_grid: usize) -> Self {
        Self {
            n_elements,
            n_pulses,
            spatial_grid,
            doppler_grid,
        }
    }

    pub fn rows(&self) -> usize {
        self.n_elements * self.n_pulses
    }

    pub fn cols(&self) -> usize {
        self.spatial_grid * self.doppler_grid
    }

    /// Column index of grid cell `(a, b)`.
    pub fn column_index(&self, a: usize, b: usize) -> usize {
        a * self.doppler_grid + b
    }

    /// Grid cell `(a, b)` of a column index.
    pub fn cell(&self, column: usize) -> (usize, usize) {
        (column / self.doppler_grid, column % self.doppler_grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_elements == 0 || self.n_pulses == 0 || self.spatial_grid == 0 || self.doppler_grid == 0 {
            return Err(Error::InvalidInput(format!(
                "spatial-temporal parameters must be positive: {self:?}"
            )));
        }
        self.n_elements
            .checked_mul(self.n_pulses)
            .zip(self.spatial_grid.checked_mul(self.doppler_grid))
            .and_then(|(r, c)| r.checked_mul(c))
            .ok_or_else(|| Error::InvalidInput(format!("dictionary size overflows: {self:?}")))?;
        Ok(())
    }

    /// Builds the unit-norm steering-vector dictionary.
    pub fn dictionary<T: RealScalar>(&self) -> Result<DenseMatrix<Complex<T>>> {
        self.validate()?;
        let np = self.n_pulses;
        let scale = 1.0 / (self.rows() as f64).sqrt();
        DenseMatrix::from_fn(self.rows(), self.cols(), |row, col| {
            let (p, q) = (row / np, row % np);
            let (a, b) = self.cell(col);
            // Reduce exactly before converting to a phase.
            let num = (p * a * self.doppler_grid + q * b * self.spatial_grid)
                % (self.spatial_grid * self.doppler_grid);
            let phase = num as f64 / (self.spatial_grid * self.doppler_grid) as f64;
            let (s, c) = (TAU * phase).sin_cos();
            Complex::new(T::lit(c * scale), T::lit(s * scale))
        })
    }
}

/// Free-function form of [`StapGrid::dictionary`].
pub fn gen_stap<T: RealScalar>(
    n_elements: usize,
    n_pulses: usize,
    spatial_grid: usize,
    doppler_grid: usize,
) -> Result<DenseMatrix<Complex<T>>> {
    StapGrid::new(n_elements, n_pulses, spatial_grid, doppler_grid).dictionary()
}

/// Restricted isometry constant of a fixed order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicEstimate {
    pub order: usize,
    pub delta: f64,
}

/// `C(n, k)`, or `None` once it exceeds `cap`.
pub(crate) fn binomial_capped(n: usize, k: usize, cap: u128) -> Option<u128> {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > cap {
            return None;
        }
    }
    Some(acc)
}

/// Exact `delta_K`: the largest deviation from 1 of any eigenvalue of
/// `A_S^H A_S` over every `K`-column subset `S`.
///
/// Refuses to run when there are more than [`RIC_SUBSET_LIMIT`] subsets.
pub fn ric_bruteforce<S: Scalar>(a: &DenseMatrix<S>, order: usize) -> Result<RicEstimate> {
    let n = a.cols();
    if order == 0 || order > n {
        return Err(Error::InvalidInput(format!(
            "RIC order must be in 1..={n}, got {order}"
        )));
    }
    let subsets = binomial_capped(n, order, RIC_SUBSET_LIMIT).ok_or(Error::TooManySubsets {
        subsets: binomial_capped(n, order, u128::MAX).unwrap_or(u128::MAX),
        limit: RIC_SUBSET_LIMIT,
    })?;
    debug_assert!(subsets >= 1);

    let cols: Vec<Vec<Complex64>> = a
        .columns()
        .map(|c| c.iter().map(|z| Complex64::new(z.re().to_f64_lossy(), z.im().to_f64_lossy())).collect())
        .collect();
    let mut gram = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in i..n {
            let g: Complex64 = cols[i].iter().zip(&cols[j]).map(|(x, y)| x.conj() * y).sum();
            gram[i * n + j] = g;
            gram[j * n + i] = g.conj();
        }
    }

    let mut delta = 0.0f64;
    let mut subset: Vec<usize> = (0..order).collect();
    loop {
        let sub = DMatrix::from_fn(order, order, |r, c| gram[subset[r] * n + subset[c]]);
        for &lambda in sub.symmetric_eigenvalues().iter() {
            delta = delta.max((lambda - 1.0).abs());
        }
        if !next_combination(&mut subset, n) {
            break;
        }
    }
    Ok(RicEstimate { order, delta })
}

/// Advances `idx` to the next `k`-combination of `0..n` in lexicographic
/// order; returns false after the last one.
pub(crate) fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
