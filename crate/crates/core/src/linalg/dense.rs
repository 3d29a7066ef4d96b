use num_traits::{Float, Zero};
use std::ops::{Deref, DerefMut};

use crate::error::{check_dim, Error, Result};
use crate::scalar::{axpy, dot_conj, norm, Scalar};

/// Owned dense vector over a [`Scalar`] field.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DenseVector<S>(Vec<S>);

impl<S: Scalar> DenseVector<S> {
    /// Wraps `values`, rejecting non-finite entries.
    pub fn new(values: Vec<S>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self(values))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![S::zero(); len])
    }

    pub fn from_fn(len: usize, f: impl FnMut(usize) -> S) -> Self {
        Self((0..len).map(f).collect())
    }

    pub fn as_slice(&self) -> &[S] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<S> {
        self.0
    }

    pub fn norm(&self) -> S::Real {
        norm(&self.0)
    }

    /// `self * factor`, elementwise.
    pub fn scaled(&self, factor: S) -> Self {
        Self(self.0.iter().map(|&z| z * factor).collect())
    }

    /// `self - other`
    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dim("sub", self.len(), other.len())?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(&a, &b)| a - b).collect()))
    }

    pub fn dot(&self, other: &Self) -> Result<S> {
        check_dim("dot", self.len(), other.len())?;
        Ok(dot_conj(&self.0, &other.0))
    }
}

impl<S> Deref for DenseVector<S> {
    type Target = [S];
    fn deref(&self) -> &[S] {
        &self.0
    }
}

impl<S> DerefMut for DenseVector<S> {
    fn deref_mut(&mut self) -> &mut [S] {
        &mut self.0
    }
}

impl<S> From<DenseVector<S>> for Vec<S> {
    fn from(v: DenseVector<S>) -> Self {
        v.0
    }
}

/// Dense matrix stored column-major so that `column(j)` is a borrowed slice.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> DenseMatrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        check_shape(rows, cols)?;
        Ok(Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.set(i, i, S::one());
        }
        Ok(m)
    }

    /// Builds a matrix from `f(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Result<Self> {
        check_shape(rows, cols)?;
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self::from_col_major(rows, cols, data)
    }

    pub fn from_col_major(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        check_shape(rows, cols)?;
        check_dim("from_col_major", rows * cols, data.len())?;
        if let Some(pos) = data.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_row_major(rows: usize, cols: usize, data: &[S]) -> Result<Self> {
        check_shape(rows, cols)?;
        check_dim("from_row_major", rows * cols, data.len())?;
        Self::from_fn(rows, cols, |i, j| data[i * cols + j])
    }

    /// Builds a matrix whose columns are the given slices.
    pub fn from_columns<C: AsRef<[S]>>(columns: &[C]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, |c| c.as_ref().len());
        check_shape(rows, cols)?;
        let mut data = Vec::with_capacity(rows * cols);
        for c in columns {
            check_dim("from_columns", rows, c.as_ref().len())?;
            data.extend_from_slice(c.as_ref());
        }
        Self::from_col_major(rows, cols, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> S {
        self.data[col * self.rows + row]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: S) {
        self.data[col * self.rows + row] = value;
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[S] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn column_mut(&mut self, j: usize) -> &mut [S] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn columns(&self) -> impl ExactSizeIterator<Item = &[S]> + '_ {
        self.data.chunks_exact(self.rows)
    }

    pub fn as_col_major(&self) -> &[S] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self {
            rows: self.cols,
            cols: self.rows,
            data: vec![S::zero(); self.data.len()],
        };
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Submatrix made of the listed columns, in the listed order.
    pub fn select_columns(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(self.rows * indices.len());
        for &j in indices {
            if j >= self.cols {
                return Err(Error::IndexOutOfBounds {
                    index: j,
                    len: self.cols,
                });
            }
            data.extend_from_slice(self.column(j));
        }
        Self::from_col_major(self.rows, indices.len(), data)
    }

    /// Scales every column to unit Euclidean norm; zero columns are left alone.
    pub fn normalize_columns(&mut self) {
        for j in 0..self.cols {
            let col = self.column_mut(j);
            let n = norm(col);
            if n > S::Real::zero() {
                let inv = n.recip();
                col.iter_mut().for_each(|z| *z = z.scale(inv));
            }
        }
    }

    pub fn frobenius_norm(&self) -> S::Real {
        norm(&self.data)
    }

    /// `A x`
    pub fn matvec(&self, x: &[S]) -> Result<DenseVector<S>> {
        check_dim("matvec", self.cols, x.len())?;
        let mut out = vec![S::zero(); self.rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj != S::zero() {
                axpy(xj, self.column(j), &mut out);
            }
        }
        Ok(DenseVector(out))
    }

    /// `A^H r`; entry `j` is `<column_j, r>` with the column conjugated.
    pub fn adjoint_matvec(&self, r: &[S]) -> Result<DenseVector<S>> {
        check_dim("adjoint_matvec", self.rows, r.len())?;
        Ok(DenseVector(self.columns().map(|c| dot_conj(c, r)).collect()))
    }

    /// `A B`
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        check_dim("matmul", self.cols, other.rows)?;
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for c in other.columns() {
            data.extend(self.matvec(c)?.0);
        }
        Self::from_col_major(self.rows, other.cols, data)
    }
}

/// Free-function form of [`DenseMatrix::matvec`].
pub fn matvec<S: Scalar>(a: &DenseMatrix<S>, x: &[S]) -> Result<DenseVector<S>> {
    a.matvec(x)
}

/// Free-function form of [`DenseMatrix::adjoint_matvec`].
pub fn adjoint_matvec<S: Scalar>(a: &DenseMatrix<S>, r: &[S]) -> Result<DenseVector<S>> {
    a.adjoint_matvec(r)
}

fn check_shape(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidInput(format!(
            "matrix dimensions must be positive, got {rows}x{cols}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn matvec_identity_and_zero() {
        let eye = DenseMatrix::<f64>::identity(3).unwrap();
        assert_eq!(eye.matvec(&[1.0, 2.0, 3.0]).unwrap().as_slice(), &[1.0, 2.0, 3.0]);
        let zero = DenseMatrix::<f64>::zeros(2, 3).unwrap();
        assert_eq!(zero.matvec(&[4.0, -1.0, 9.0]).unwrap().as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn matvec_hand_example() {
        let a = DenseMatrix::from_row_major(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(a.matvec(&[1.0, 1.0]).unwrap().as_slice(), &[3.0, 7.0]);
    }

    #[test]
    fn matvec_rejects_wrong_length() {
        let a = DenseMatrix::<f64>::identity(3).unwrap();
        assert!(matches!(a.matvec(&[1.0]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(a.adjoint_matvec(&[1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn adjoint_matvec_examples() {
        let eye = DenseMatrix::<f64>::identity(2).unwrap();
        assert_eq!(eye.adjoint_matvec(&[5.0, -1.0]).unwrap().as_slice(), &[5.0, -1.0]);

        let i = Complex64::new(0.0, 1.0);
        let a = DenseMatrix::from_col_major(1, 1, vec![i]).unwrap();
        let u = a.adjoint_matvec(&[Complex64::new(1.0, 0.0)]).unwrap();
        assert_eq!(u[0], -i);
    }

    #[test]
    fn adjoint_is_conjugate_transpose() {
        let a = DenseMatrix::from_fn(2, 3, |i, j| Complex64::new(i as f64, j as f64 + 1.0)).unwrap();
        let ah = a.adjoint();
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(ah.get(j, i), a.get(i, j).conj());
            }
        }
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(DenseMatrix::<f64>::zeros(0, 3).is_err());
        assert!(matches!(
            DenseMatrix::from_col_major(1, 2, vec![1.0, f64::NAN]),
            Err(Error::NonFinite(1))
        ));
        assert!(DenseVector::new(vec![f64::INFINITY]).is_err());
    }
}
