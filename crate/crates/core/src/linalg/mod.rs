//! Dense vectors and matrices over a [`Scalar`](crate::Scalar) field and
//! the incremental least-squares engine used by the greedy pursuits.

mod dense;
mod qr;

pub use dense::{adjoint_matvec, matvec, DenseMatrix, DenseVector};
pub use qr::{dense_lstsq, qr_extend, qr_solve, IncrementalQR, DEFAULT_LIN_DEP_TOL};
