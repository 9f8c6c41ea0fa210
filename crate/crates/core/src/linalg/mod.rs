//! Matrix containers, kernels and MatrixMarket I/O.

mod csr;
mod dense;
pub mod kernels;
pub mod mtx;

pub use csr::CsrMatrix;
pub use dense::DenseMatrix;
pub use kernels::{
    axpy, axpy_block, axpy_extended, dot, matvec, matvec_extended, matvec_extended_ext, norm2,
    residual, residual_extended,
};

use crate::scalar::{Field, Scalar};

/// One row of a matrix; dense rows carry implicit column indices.
#[derive(Clone, Copy, Debug)]
pub struct RowView<'a, S> {
    cols: Option<&'a [usize]>,
    vals: &'a [S],
}

impl<'a, S: Copy> RowView<'a, S> {
    pub fn dense(vals: &'a [S]) -> Self {
        Self { cols: None, vals }
    }

    pub fn sparse(cols: &'a [usize], vals: &'a [S]) -> Self {
        Self {
            cols: Some(cols),
            vals,
        }
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    /// `(column, value)` pairs in increasing column order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, S)> + 'a {
        let vals = self.vals;
        let cols = self.cols;
        (0..vals.len()).map(move |k| (cols.map_or(k, |c| c[k]), vals[k]))
    }
}

/// Anything that can expose its rows; all kernels are written against this.
pub trait LinearOperator<S: Scalar>: Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn row(&self, i: usize) -> RowView<'_, S>;
}

impl<S: Scalar> LinearOperator<S> for DenseMatrix<S> {
    fn nrows(&self) -> usize {
        DenseMatrix::nrows(self)
    }
    fn ncols(&self) -> usize {
        DenseMatrix::ncols(self)
    }
    fn row(&self, i: usize) -> RowView<'_, S> {
        RowView::dense(DenseMatrix::row(self, i))
    }
}

impl<S: Scalar> LinearOperator<S> for CsrMatrix<S> {
    fn nrows(&self) -> usize {
        CsrMatrix::nrows(self)
    }
    fn ncols(&self) -> usize {
        CsrMatrix::ncols(self)
    }
    fn row(&self, i: usize) -> RowView<'_, S> {
        let (c, v) = CsrMatrix::row(self, i);
        RowView::sparse(c, v)
    }
}

/// A coefficient matrix in either storage format.
#[derive(Clone, Debug, PartialEq)]
pub enum Matrix<S> {
    Dense(DenseMatrix<S>),
    Csr(CsrMatrix<S>),
}

impl<S: Field> Matrix<S> {
    pub fn nrows(&self) -> usize {
        match self {
            Matrix::Dense(d) => d.nrows(),
            Matrix::Csr(c) => c.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            Matrix::Dense(d) => d.ncols(),
            Matrix::Csr(c) => c.ncols(),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix<S> {
        match self {
            Matrix::Dense(d) => d.clone(),
            Matrix::Csr(c) => c.to_dense(),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, Matrix::Csr(_))
    }
}

impl<S: Scalar> LinearOperator<S> for Matrix<S> {
    fn nrows(&self) -> usize {
        Matrix::nrows(self)
    }
    fn ncols(&self) -> usize {
        Matrix::ncols(self)
    }
    fn row(&self, i: usize) -> RowView<'_, S> {
        match self {
            Matrix::Dense(d) => LinearOperator::row(d, i),
            Matrix::Csr(c) => LinearOperator::row(c, i),
        }
    }
}

impl<S> From<DenseMatrix<S>> for Matrix<S> {
    fn from(d: DenseMatrix<S>) -> Self {
        Matrix::Dense(d)
    }
}

impl<S> From<CsrMatrix<S>> for Matrix<S> {
    fn from(c: CsrMatrix<S>) -> Self {
        Matrix::Csr(c)
    }
}
