use num_traits::{Float, Zero};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{DenseMatrix, DenseVector};
use crate::scalar::{axpy, dot_conj, norm, RealScalar, Scalar};

/// Default relative threshold below which an orthogonalized column is
/// treated as linearly dependent on the current basis.
pub const DEFAULT_LIN_DEP_TOL: f64 = 1e-10;

/// A second sweep is taken when one sweep removes more than this fraction
/// of a column's norm (the usual "twice is enough" criterion).
const REORTH_RATIO: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Thin QR factorization of a growing set of columns, built one column at
/// a time with modified Gram-Schmidt.
///
/// `Q` is stored as a list of orthonormal columns and `R` column by column
/// (column `j` holds the `j + 1` entries on or above the diagonal). Columns
/// are never removed, which is what lets greedy pursuits reuse all earlier
/// work when their support grows.
#[derive(Debug, Clone)]
pub struct IncrementalQR<S: Scalar> {
    ambient_rows: usize,
    selected: Vec<usize>,
    q_columns: Vec<Vec<S>>,
    r_columns: Vec<Vec<S>>,
    lin_dep_tol: S::Real,
    scratch_allocated: usize,
}

impl<S: Scalar> IncrementalQR<S> {
    pub fn new(ambient_rows: usize) -> Self {
        Self::with_tolerance(ambient_rows, S::Real::lit(DEFAULT_LIN_DEP_TOL))
    }

    pub fn with_tolerance(ambient_rows: usize, lin_dep_tol: S::Real) -> Self {
        Self {
            ambient_rows,
            selected: Vec::new(),
            q_columns: Vec::new(),
            r_columns: Vec::new(),
            lin_dep_tol: lin_dep_tol.max(S::Real::zero()),
            scratch_allocated: 0,
        }
    }

    pub fn ambient_rows(&self) -> usize {
        self.ambient_rows
    }

    /// Accepted column indices in insertion order.
    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn lin_dep_tol(&self) -> S::Real {
        self.lin_dep_tol
    }

    pub fn q_column(&self, i: usize) -> &[S] {
        &self.q_columns[i]
    }

    /// Total number of scalars allocated as column-length working storage
    /// over the lifetime of this factorization.
    pub fn scratch_allocated(&self) -> usize {
        self.scratch_allocated
    }

    /// Entry `(i, j)` of the triangular factor; zero below the diagonal.
    pub fn r_entry(&self, i: usize, j: usize) -> S {
        self.r_columns[j].get(i).copied().unwrap_or_else(S::zero)
    }

    pub fn q_matrix(&self) -> Option<DenseMatrix<S>> {
        DenseMatrix::from_columns(&self.q_columns).ok()
    }

    pub fn r_matrix(&self) -> Option<DenseMatrix<S>> {
        let k = self.len();
        DenseMatrix::from_fn(k, k, |i, j| self.r_entry(i, j)).ok()
    }

    /// Orthogonalizes the listed columns of `a` against the current basis,
    /// in order, and appends those that are not numerically dependent.
    ///
    /// Returns the indices that were rejected. Nothing is modified if the
    /// index list is malformed.
    pub fn extend(&mut self, a: &DenseMatrix<S>, new_indices: &[usize]) -> Result<Vec<usize>> {
        check_dim("qr_extend", self.ambient_rows, a.rows())?;
        for (pos, &j) in new_indices.iter().enumerate() {
            if j >= a.cols() {
                return Err(Error::IndexOutOfBounds {
                    index: j,
                    len: a.cols(),
                });
            }
            if self.selected.contains(&j) || new_indices[..pos].contains(&j) {
                return Err(Error::DuplicateIndex { index: j });
            }
        }

        let mut rejected = Vec::new();
        for &j in new_indices {
            if !self.push_column(j, a.column(j)) {
                rejected.push(j);
            }
        }
        Ok(rejected)
    }

    fn push_column(&mut self, index: usize, column: &[S]) -> bool {
        let k = self.q_columns.len();
        let mut v = column.to_vec();
        self.scratch_allocated += v.len();

        let original = norm(&v);
        if original == S::Real::zero() {
            return false;
        }

        let mut coeffs = vec![S::zero(); k + 1];
        let mut current = original;
        for sweep in 0..2 {
            let before = current;
            for (q, c_acc) in self.q_columns.iter().zip(coeffs.iter_mut()) {
                let c = dot_conj(q, &v);
                axpy(-c, q, &mut v);
                *c_acc += c;
            }
            current = norm(&v);
            if sweep == 0 && current > before * S::Real::lit(REORTH_RATIO) {
                break;
            }
        }

        if current <= self.lin_dep_tol * original || current == S::Real::zero() {
            return false;
        }

        let inv = current.recip();
        v.iter_mut().for_each(|z| *z = z.scale(inv));
        coeffs[k] = S::from_real(current);

        self.q_columns.push(v);
        self.r_columns.push(coeffs);
        self.selected.push(index);
        true
    }

    /// Coordinates of `y` in the orthonormal basis, `Q^H y`, together with
    /// the residual `y - Q Q^H y`. Projections are removed one basis vector
    /// at a time from a running residual.
    pub fn project(&self, y: &[S]) -> Result<(Vec<S>, DenseVector<S>)> {
        check_dim("qr_project", self.ambient_rows, y.len())?;
        let mut residual = y.to_vec();
        let coords = self
            .q_columns
            .iter()
            .map(|q| {
                let c = dot_conj(q, &residual);
                axpy(-c, q, &mut residual);
                c
            })
            .collect();
        Ok((coords, DenseVector::new(residual)?))
    }

    /// Least-squares coefficients over [`selected`](Self::selected), in the
    /// same order, by back substitution of `R x = Q^H y`.
    pub fn solve(&self, y: &[S]) -> Result<DenseVector<S>> {
        Ok(self.solve_with_residual(y)?.0)
    }

    /// Like [`solve`](Self::solve) but also returns the residual vector.
    pub fn solve_with_residual(&self, y: &[S]) -> Result<(DenseVector<S>, DenseVector<S>)> {
        let (coords, residual) = self.project(y)?;
        Ok((DenseVector::new(self.back_substitute(coords))?, residual))
    }

    fn back_substitute(&self, mut rhs: Vec<S>) -> Vec<S> {
        let k = rhs.len();
        for i in (0..k).rev() {
            let mut acc = rhs[i];
            for j in i + 1..k {
                acc -= self.r_columns[j][i] * rhs[j];
            }
            rhs[i] = acc / self.r_columns[i][i];
        }
        rhs
    }

    /// Forgets every column while keeping the configured tolerance.
    pub fn clear(&mut self) {
        self.selected.clear();
        self.q_columns.clear();
        self.r_columns.clear();
    }
}

/// Functional form of [`IncrementalQR::extend`]: returns the updated
/// factorization and the rejected indices.
pub fn qr_extend<S: Scalar>(
    mut qr: IncrementalQR<S>,
    a: &DenseMatrix<S>,
    new_indices: &[usize],
) -> Result<(IncrementalQR<S>, Vec<usize>)> {
    let rejected = qr.extend(a, new_indices)?;
    Ok((qr, rejected))
}

/// Functional form of [`IncrementalQR::solve`].
pub fn qr_solve<S: Scalar>(qr: &IncrementalQR<S>, y: &[S]) -> Result<DenseVector<S>> {
    qr.solve(y)
}

/// Relative pivot threshold of [`dense_lstsq`].
const CHOLESKY_PIVOT_TOL: f64 = 1e-13;

/// Least squares by the normal equations and a Cholesky factorization.
///
/// Non-incremental and independent of [`IncrementalQR`]; used as a
/// reference solver.
pub fn dense_lstsq<S: Scalar>(a: &DenseMatrix<S>, y: &[S]) -> Result<DenseVector<S>> {
    check_dim("dense_lstsq", a.rows(), y.len())?;
    let n = a.cols();
    if a.rows() < n {
        return Err(Error::InvalidInput(format!(
            "dense_lstsq needs rows >= cols, got {}x{}",
            a.rows(),
            n
        )));
    }

    // Lower triangle of the Gram matrix, row-major n x n.
    let mut l = vec![S::zero(); n * n];
    for i in 0..n {
        for j in 0..=i {
            l[i * n + j] = dot_conj(a.column(i), a.column(j));
        }
    }
    let scale = (0..n).map(|i| l[i * n + i].re()).fold(S::Real::zero(), |m, d| m.max(d));

    for j in 0..n {
        let mut d = l[j * n + j].re();
        for k in 0..j {
            d -= l[j * n + k].abs_sqr();
        }
        if !(d > S::Real::lit(CHOLESKY_PIVOT_TOL) * scale) {
            return Err(Error::Singular {
                column: j,
                pivot: d.to_f64_lossy(),
            });
        }
        let djj = d.sqrt();
        l[j * n + j] = S::from_real(djj);
        for i in j + 1..n {
            let mut s = l[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = s.scale(djj.recip());
        }
    }

    let rhs = a.adjoint_matvec(y)?;
    // L z = A^H y
    let mut z = rhs.into_vec();
    for i in 0..n {
        let mut s = z[i];
        for k in 0..i {
            s -= l[i * n + k] * z[k];
        }
        z[i] = s / l[i * n + i];
    }
    // L^H x = z
    for i in (0..n).rev() {
        let mut s = z[i];
        for k in i + 1..n {
            s -= l[k * n + i].conj() * z[k];
        }
        z[i] = s / l[i * n + i];
    }
    DenseVector::new(z)
}

impl<S: Scalar> IncrementalQR<S> {
    /// `max |<q_i, q_j> - delta_ij|` over the stored basis.
    pub fn orthogonality_error(&self) -> S::Real {
        let mut worst = S::Real::zero();
        for (i, qi) in self.q_columns.iter().enumerate() {
            for (j, qj) in self.q_columns.iter().enumerate().skip(i) {
                let g = dot_conj(qi, qj);
                let target = if i == j { S::one() } else { S::zero() };
                worst = worst.max((g - target).modulus());
            }
        }
        worst
    }
}
