//! Approximate-inverse preconditioners factored and applied in binary32.
//!
//! The coefficient matrix is down-cast (round to nearest) before factoring;
//! an entry that overflows binary32 is an error rather than being saturated.
//! [`FactorPrecision::Double`] keeps the same code path in binary64 for runs
//! that want a working-precision factorization.

use num_traits::{Float, Zero};

use crate::error::{check_len, Error, Result};
use crate::linalg::{CsrMatrix, DenseMatrix, Matrix};
use crate::scalar::{cast, Field, Scalar};

/// Largest dimension for which a sparse matrix is densified for LU/Cholesky.
pub const DENSE_LIMIT: usize = 6000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorKind {
    Lu,
    Cholesky,
    Ilu0,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FactorPrecision {
    #[default]
    Single,
    Double,
}

/// Applies `M⁻¹` for some approximation `M ≈ A`.
pub trait Preconditioner<S: Scalar>: Sync {
    fn dim(&self) -> usize;
    fn apply_inverse(&self, v: &[S]) -> Vec<S>;
}

/// `M = I`; useful as a baseline and for unpreconditioned runs.
#[derive(Clone, Copy, Debug)]
pub struct IdentityPreconditioner {
    pub n: usize,
}

impl<S: Scalar> Preconditioner<S> for IdentityPreconditioner {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply_inverse(&self, v: &[S]) -> Vec<S> {
        v.to_vec()
    }
}

#[derive(Clone, Debug)]
enum Factors<T> {
    /// Packed `L\U` (unit lower, row-major) with `perm[i]` = source row of row `i`.
    Lu { lu: Vec<T>, perm: Vec<usize> },
    /// Row-major lower factor, `A = L Lᴴ`.
    Cholesky { l: Vec<T> },
    /// ILU(0) values on the pattern of `A`; `diag[i]` indexes the diagonal.
    Ilu {
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        vals: Vec<T>,
        diag: Vec<usize>,
    },
}

#[derive(Clone, Debug)]
enum Storage<S: Scalar> {
    Single(Factors<S::Low>),
    Double(Factors<S>),
}

/// A factorization `M` of `A` stored in reduced precision.
#[derive(Clone, Debug)]
pub struct LowPrecFactorization<S: Scalar> {
    kind: FactorKind,
    precision: FactorPrecision,
    n: usize,
    storage: Storage<S>,
}

fn square_dense<S: Scalar>(a: &DenseMatrix<S>) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

fn downcast_dense<S: Scalar, T: Field>(a: &DenseMatrix<S>) -> Result<Vec<T>> {
    let n = a.ncols();
    a.as_slice()
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let t: T = cast(v);
            if t.is_finite() {
                Ok(t)
            } else {
                Err(Error::Overflow {
                    row: k / n,
                    col: k % n,
                })
            }
        })
        .collect()
}

fn lu_in_place<T: Field>(a: &mut [T], n: usize) -> Result<Vec<usize>> {
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].abs();
        for i in k + 1..n {
            let v = a[i * n + k].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == T::Real::zero() {
            return Err(Error::ExactZeroPivot { index: k });
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
        }
        let pivot = a[k * n + k];
        for i in k + 1..n {
            let l = a[i * n + k] / pivot;
            a[i * n + k] = l;
            if l == T::zero() {
                continue;
            }
            for j in k + 1..n {
                let u = a[k * n + j];
                a[i * n + j] -= l * u;
            }
        }
    }
    Ok(perm)
}

fn cholesky_in_place<T: Field>(a: &[T], n: usize) -> Result<Vec<T>> {
    let mut l = vec![T::zero(); n * n];
    for j in 0..n {
        let mut d = a[j * n + j].re();
        for k in 0..j {
            d = d - l[j * n + k].abs2();
        }
        if !(d > T::Real::zero()) {
            return Err(Error::NotSpd { index: j });
        }
        let djj = d.sqrt();
        l[j * n + j] = T::from_real(djj);
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = s.scale(djj.recip());
        }
    }
    Ok(l)
}

fn ilu0_in_place<T: Field>(
    row_ptr: &[usize],
    col_idx: &[usize],
    vals: &mut [T],
) -> Result<Vec<usize>> {
    let n = row_ptr.len() - 1;
    let mut diag = vec![usize::MAX; n];
    for i in 0..n {
        for k in row_ptr[i]..row_ptr[i + 1] {
            if col_idx[k] == i {
                diag[i] = k;
            }
        }
        if diag[i] == usize::MAX {
            return Err(Error::ZeroPivot { row: i });
        }
    }
    // position of column j in the current row, or MAX
    let mut pos = vec![usize::MAX; n];
    for i in 0..n {
        let row = row_ptr[i]..row_ptr[i + 1];
        for k in row.clone() {
            pos[col_idx[k]] = k;
        }
        for kk in row.clone() {
            let k = col_idx[kk];
            if k >= i {
                break;
            }
            let pivot = vals[diag[k]];
            if pivot == T::zero() {
                return Err(Error::ZeroPivot { row: k });
            }
            let lik = vals[kk] / pivot;
            vals[kk] = lik;
            for jj in diag[k] + 1..row_ptr[k + 1] {
                let p = pos[col_idx[jj]];
                if p != usize::MAX {
                    let ukj = vals[jj];
                    vals[p] -= lik * ukj;
                }
            }
        }
        for k in row {
            pos[col_idx[k]] = usize::MAX;
        }
        if vals[diag[i]] == T::zero() {
            return Err(Error::ZeroPivot { row: i });
        }
    }
    Ok(diag)
}

impl<T: Field> Factors<T> {
    fn lu<S: Scalar>(a: &DenseMatrix<S>) -> Result<Self> {
        let n = square_dense(a)?;
        let mut lu = downcast_dense::<S, T>(a)?;
        let perm = lu_in_place(&mut lu, n)?;
        Ok(Factors::Lu { lu, perm })
    }

    fn cholesky<S: Scalar>(a: &DenseMatrix<S>) -> Result<Self> {
        let n = square_dense(a)?;
        let low = downcast_dense::<S, T>(a)?;
        Ok(Factors::Cholesky {
            l: cholesky_in_place(&low, n)?,
        })
    }

    fn ilu0<S: Scalar>(a: &CsrMatrix<S>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::NotSquare {
                rows: a.nrows(),
                cols: a.ncols(),
            });
        }
        let mut vals = Vec::with_capacity(a.nnz());
        for (i, j, v) in a.triplets() {
            let t: T = cast(v);
            if !t.is_finite() {
                return Err(Error::Overflow { row: i, col: j });
            }
            vals.push(t);
        }
        let row_ptr = a.row_ptr().to_vec();
        let col_idx = a.col_idx().to_vec();
        let diag = ilu0_in_place(&row_ptr, &col_idx, &mut vals)?;
        Ok(Factors::Ilu {
            row_ptr,
            col_idx,
            vals,
            diag,
        })
    }

    fn solve(&self, n: usize, b: &mut [T]) {
        match self {
            Factors::Lu { lu, perm } => {
                let mut y: Vec<T> = perm.iter().map(|&p| b[p]).collect();
                for i in 0..n {
                    let row = &lu[i * n..i * n + i];
                    let mut s = y[i];
                    for (l, &yj) in row.iter().zip(&y[..i]) {
                        s -= *l * yj;
                    }
                    y[i] = s;
                }
                for i in (0..n).rev() {
                    let mut s = y[i];
                    for j in i + 1..n {
                        s -= lu[i * n + j] * y[j];
                    }
                    y[i] = s / lu[i * n + i];
                }
                b.copy_from_slice(&y);
            }
            Factors::Cholesky { l } => {
                for i in 0..n {
                    let mut s = b[i];
                    for j in 0..i {
                        s -= l[i * n + j] * b[j];
                    }
                    b[i] = s / l[i * n + i];
                }
                for i in (0..n).rev() {
                    let mut s = b[i];
                    for j in i + 1..n {
                        s -= l[j * n + i].conj() * b[j];
                    }
                    b[i] = s / l[i * n + i];
                }
            }
            Factors::Ilu {
                row_ptr,
                col_idx,
                vals,
                diag,
            } => {
                for i in 0..n {
                    let mut s = b[i];
                    for k in row_ptr[i]..diag[i] {
                        s -= vals[k] * b[col_idx[k]];
                    }
                    b[i] = s;
                }
                for i in (0..n).rev() {
                    let mut s = b[i];
                    for k in diag[i] + 1..row_ptr[i + 1] {
                        s -= vals[k] * b[col_idx[k]];
                    }
                    b[i] = s / vals[diag[i]];
                }
            }
        }
    }

    fn apply<S: Scalar>(&self, n: usize, v: &[S]) -> Vec<S> {
        let mut w: Vec<T> = v.iter().map(|&x| cast(x)).collect();
        self.solve(n, &mut w);
        w.into_iter().map(cast).collect()
    }

    fn lower<S: Scalar>(&self, n: usize) -> DenseMatrix<S> {
        match self {
            Factors::Lu { lu, .. } => DenseMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
                std::cmp::Ordering::Greater => cast(lu[i * n + j]),
                std::cmp::Ordering::Equal => S::one(),
                std::cmp::Ordering::Less => S::zero(),
            }),
            Factors::Cholesky { l } => DenseMatrix::from_fn(n, n, |i, j| {
                if i >= j {
                    cast(l[i * n + j])
                } else {
                    S::zero()
                }
            }),
            Factors::Ilu {
                row_ptr,
                col_idx,
                vals,
                diag,
            } => {
                let mut d = DenseMatrix::identity(n);
                for i in 0..n {
                    for k in row_ptr[i]..diag[i] {
                        d.set(i, col_idx[k], cast(vals[k]));
                    }
                }
                d
            }
        }
    }

    fn upper<S: Scalar>(&self, n: usize) -> DenseMatrix<S> {
        match self {
            Factors::Lu { lu, .. } => DenseMatrix::from_fn(n, n, |i, j| {
                if i <= j {
                    cast(lu[i * n + j])
                } else {
                    S::zero()
                }
            }),
            Factors::Cholesky { l } => DenseMatrix::from_fn(n, n, |i, j| {
                if i <= j {
                    cast(l[j * n + i].conj())
                } else {
                    S::zero()
                }
            }),
            Factors::Ilu {
                row_ptr,
                col_idx,
                vals,
                diag,
            } => {
                let mut d = DenseMatrix::zeros(n, n);
                for i in 0..n {
                    for k in diag[i]..row_ptr[i + 1] {
                        d.set(i, col_idx[k], cast(vals[k]));
                    }
                }
                d
            }
        }
    }
}


impl<S: Scalar> LowPrecFactorization<S> {
    fn build(
        kind: FactorKind,
        precision: FactorPrecision,
        n: usize,
        single: impl FnOnce() -> Result<Factors<S::Low>>,
        double: impl FnOnce() -> Result<Factors<S>>,
    ) -> Result<Self> {
        let storage = match precision {
            FactorPrecision::Single => Storage::Single(single()?),
            FactorPrecision::Double => Storage::Double(double()?),
        };
        Ok(Self {
            kind,
            precision,
            n,
            storage,
        })
    }

    /// Dense LU with partial pivoting in the requested precision.
    pub fn lu(a: &DenseMatrix<S>, precision: FactorPrecision) -> Result<Self> {
        let n = square_dense(a)?;
        Self::build(FactorKind::Lu, precision, n, || Factors::lu(a), || Factors::lu(a))
    }

    /// Dense Cholesky; only the lower triangle of `a` is read.
    pub fn cholesky(a: &DenseMatrix<S>, precision: FactorPrecision) -> Result<Self> {
        let n = square_dense(a)?;
        Self::build(
            FactorKind::Cholesky,
            precision,
            n,
            || Factors::cholesky(a),
            || Factors::cholesky(a),
        )
    }

    /// Zero-fill incomplete LU on the pattern of `a`.
    pub fn ilu0(a: &CsrMatrix<S>, precision: FactorPrecision) -> Result<Self> {
        Self::build(
            FactorKind::Ilu0,
            precision,
            a.nrows(),
            || Factors::ilu0(a),
            || Factors::ilu0(a),
        )
    }

    /// Factors either storage format; sparse inputs are densified for LU and
    /// Cholesky (up to [`DENSE_LIMIT`]) and dense inputs use their nonzero
    /// pattern for ILU(0).
    pub fn factor(a: &Matrix<S>, kind: FactorKind, precision: FactorPrecision) -> Result<Self> {
        let dense = || -> Result<DenseMatrix<S>> {
            if a.nrows() > DENSE_LIMIT {
                return Err(Error::DenseLimit {
                    n: a.nrows(),
                    limit: DENSE_LIMIT,
                });
            }
            Ok(a.to_dense())
        };
        match (kind, a) {
            (FactorKind::Lu, Matrix::Dense(d)) => Self::lu(d, precision),
            (FactorKind::Lu, Matrix::Csr(_)) => Self::lu(&dense()?, precision),
            (FactorKind::Cholesky, Matrix::Dense(d)) => Self::cholesky(d, precision),
            (FactorKind::Cholesky, Matrix::Csr(_)) => Self::cholesky(&dense()?, precision),
            (FactorKind::Ilu0, Matrix::Csr(c)) => Self::ilu0(c, precision),
            (FactorKind::Ilu0, Matrix::Dense(d)) => Self::ilu0(&CsrMatrix::from_dense(d), precision),
        }
    }

    pub fn kind(&self) -> FactorKind {
        self.kind
    }

    pub fn precision(&self) -> FactorPrecision {
        self.precision
    }

    /// Row permutation of an LU factorization: row `i` of `P A` is row `perm[i]` of `A`.
    pub fn permutation(&self) -> Option<&[usize]> {
        match &self.storage {
            Storage::Single(Factors::Lu { perm, .. }) | Storage::Double(Factors::Lu { perm, .. }) => {
                Some(perm)
            }
            _ => None,
        }
    }

    /// Sparsity pattern `(row_ptr, col_idx)` of an ILU(0) factorization.
    pub fn pattern(&self) -> Option<(&[usize], &[usize])> {
        match &self.storage {
            Storage::Single(Factors::Ilu { row_ptr, col_idx, .. })
            | Storage::Double(Factors::Ilu { row_ptr, col_idx, .. }) => Some((row_ptr, col_idx)),
            _ => None,
        }
    }

    /// Lower factor up-cast to working precision (unit diagonal for LU/ILU).
    pub fn lower_factor(&self) -> DenseMatrix<S> {
        match &self.storage {
            Storage::Single(f) => f.lower(self.n),
            Storage::Double(f) => f.lower(self.n),
        }
    }

    /// Upper factor up-cast to working precision (`Lᴴ` for Cholesky).
    pub fn upper_factor(&self) -> DenseMatrix<S> {
        match &self.storage {
            Storage::Single(f) => f.upper(self.n),
            Storage::Double(f) => f.upper(self.n),
        }
    }

    /// Reassembles `M` (`Pᵀ L U`, `L Lᴴ` or `L U`) in working precision.
    pub fn to_matrix(&self) -> DenseMatrix<S> {
        let lu = self
            .lower_factor()
            .matmul(&self.upper_factor())
            .expect("square factors");
        match self.permutation() {
            Some(perm) => {
                let mut m = DenseMatrix::zeros(self.n, self.n);
                for (i, &p) in perm.iter().enumerate() {
                    for j in 0..self.n {
                        m.set(p, j, lu.get(i, j));
                    }
                }
                m
            }
            None => lu,
        }
    }

    /// `M⁻¹ v`, checking the dimension.
    pub fn try_apply_inverse(&self, v: &[S]) -> Result<Vec<S>> {
        check_len("preconditioner", self.n, v.len())?;
        Ok(self.apply_inverse(v))
    }
}

impl<S: Scalar> Preconditioner<S> for LowPrecFactorization<S> {
    fn dim(&self) -> usize {
        self.n
    }

    /// Down-casts `v`, permutes, runs both triangular solves in the storage
    /// precision and up-casts the result.
    fn apply_inverse(&self, v: &[S]) -> Vec<S> {
        match &self.storage {
            Storage::Single(f) => f.apply(self.n, v),
            Storage::Double(f) => f.apply(self.n, v),
        }
    }
}

/// Binary32 dense LU with partial pivoting.
pub fn lu_factor_lowprec<S: Scalar>(a: &DenseMatrix<S>) -> Result<LowPrecFactorization<S>> {
    LowPrecFactorization::lu(a, FactorPrecision::Single)
}

/// Binary32 Cholesky of a Hermitian positive definite matrix.
pub fn cholesky_factor_lowprec<S: Scalar>(a: &Matrix<S>) -> Result<LowPrecFactorization<S>> {
    LowPrecFactorization::factor(a, FactorKind::Cholesky, FactorPrecision::Single)
}

/// Binary32 ILU(0).
pub fn ilu0_lowprec<S: Scalar>(a: &CsrMatrix<S>) -> Result<LowPrecFactorization<S>> {
    LowPrecFactorization::ilu0(a, FactorPrecision::Single)
}
