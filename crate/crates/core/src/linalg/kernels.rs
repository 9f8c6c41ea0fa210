//! Working-precision BLAS-1/2 kernels and the extended-accumulation gaxpy
//! kernels.
//!
//! Extended kernels up-convert working operands one at a time and keep the
//! running sum in double-double. Every row is reduced in a fixed left-to-right
//! order, so results are bit-reproducible whether or not rows are processed
//! in parallel.

use rayon::prelude::*;

use crate::error::{check_len, Result};
use crate::linalg::LinearOperator;
use crate::scalar::{Extended, Field, Scalar};

/// Row count above which row-parallel evaluation kicks in.
const PAR_ROWS: usize = 4096;

fn map_rows<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if n >= PAR_ROWS {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

/// `y = A x` with working-precision accumulation.
pub fn matvec<S: Scalar, A: LinearOperator<S> + ?Sized>(a: &A, x: &[S]) -> Result<Vec<S>> {
    check_len("matvec", a.ncols(), x.len())?;
    Ok(map_rows(a.nrows(), |i| {
        let mut acc = S::zero();
        for (j, v) in a.row(i).iter() {
            acc += v * x[j];
        }
        acc
    }))
}

/// `A x` accumulated in extended precision from a working-precision `x`.
pub fn matvec_extended<S: Scalar, A: LinearOperator<S> + ?Sized>(
    a: &A,
    x: &[S],
) -> Result<Vec<S::Ext>> {
    check_len("matvec_extended", a.ncols(), x.len())?;
    Ok(map_rows(a.nrows(), |i| {
        let mut acc = S::Ext::zero();
        for (j, v) in a.row(i).iter() {
            acc = acc + S::Ext::prod(v, x[j]);
        }
        acc
    }))
}

/// `A x̃` accumulated in extended precision from an extended `x̃`.
pub fn matvec_extended_ext<S: Scalar, A: LinearOperator<S> + ?Sized>(
    a: &A,
    x: &[S::Ext],
) -> Result<Vec<S::Ext>> {
    check_len("matvec_extended", a.ncols(), x.len())?;
    Ok(map_rows(a.nrows(), |i| {
        let mut acc = S::Ext::zero();
        for (j, v) in a.row(i).iter() {
            acc = acc + x[j].mul_working(v);
        }
        acc
    }))
}

/// `r = round(b - A x̃)` with the whole expression in extended precision,
/// together with `‖r‖₂`.
pub fn residual_extended<S: Scalar, A: LinearOperator<S> + ?Sized>(
    a: &A,
    b: &[S],
    x: &[S::Ext],
) -> Result<(Vec<S>, f64)> {
    check_len("residual rhs", a.nrows(), b.len())?;
    check_len("residual solution", a.ncols(), x.len())?;
    let r: Vec<S> = map_rows(a.nrows(), |i| {
        let mut acc = S::Ext::from_working(b[i]);
        for (j, v) in a.row(i).iter() {
            acc = acc - x[j].mul_working(v);
        }
        acc.round()
    });
    let beta = norm2(&r);
    Ok((r, beta))
}

/// `r = b - A x` in working precision, together with `‖r‖₂`.
pub fn residual<S: Scalar, A: LinearOperator<S> + ?Sized>(
    a: &A,
    b: &[S],
    x: &[S],
) -> Result<(Vec<S>, f64)> {
    check_len("residual rhs", a.nrows(), b.len())?;
    let ax = matvec(a, x)?;
    let r: Vec<S> = b.iter().zip(&ax).map(|(&bi, &axi)| bi - axi).collect();
    let beta = norm2(&r);
    Ok((r, beta))
}

fn check_block<S: Scalar>(n: usize, z: &[Vec<S>], y: &[S]) -> Result<()> {
    check_len("block update coefficients", z.len(), y.len())?;
    for zj in z {
        check_len("block update basis", n, zj.len())?;
    }
    Ok(())
}

/// `x̃ ← x̃ + Z y` accumulated in extended precision.
pub fn axpy_extended<S: Scalar>(x: &mut [S::Ext], z: &[Vec<S>], y: &[S]) -> Result<()> {
    check_block(x.len(), z, y)?;
    for (i, xi) in x.iter_mut().enumerate() {
        let mut acc = *xi;
        for (zj, &yj) in z.iter().zip(y) {
            acc = acc + S::Ext::prod(zj[i], yj);
        }
        *xi = acc;
    }
    Ok(())
}

/// `x ← x + Z y` in working precision.
pub fn axpy_block<S: Scalar>(x: &mut [S], z: &[Vec<S>], y: &[S]) -> Result<()> {
    check_block(x.len(), z, y)?;
    for (i, xi) in x.iter_mut().enumerate() {
        let mut acc = *xi;
        for (zj, &yj) in z.iter().zip(y) {
            acc += zj[i] * yj;
        }
        *xi = acc;
    }
    Ok(())
}

/// Euclidean norm with max-abs scaling so large entries do not overflow.
pub fn norm2<S: Field<Real = f64>>(v: &[S]) -> f64 {
    let mut scale = 0.0f64;
    for x in v {
        let (re, im) = x.to_parts();
        scale = scale.max(re.abs()).max(im.abs());
    }
    if scale == 0.0 || !scale.is_finite() {
        return if v.iter().any(|x| !x.is_finite()) {
            f64::NAN
        } else {
            scale
        };
    }
    let inv = 1.0 / scale;
    let mut sum = 0.0;
    for x in v {
        let (re, im) = x.to_parts();
        let (re, im) = (re * inv, im * inv);
        sum += re * re + im * im;
    }
    scale * sum.sqrt()
}

/// `uᴴ v`, conjugating the first argument.
pub fn dot<S: Field>(u: &[S], v: &[S]) -> S {
    let mut acc = S::zero();
    for (&a, &b) in u.iter().zip(v) {
        acc += a.conj() * b;
    }
    acc
}

/// `y ← y + a x`.
pub fn axpy<S: Field>(a: S, x: &[S], y: &mut [S]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Rounds an extended vector to working precision.
pub fn round_vec<S: Scalar>(x: &[S::Ext]) -> Vec<S> {
    x.iter().map(|v| v.round()).collect()
}

/// Lifts a working vector to extended precision.
pub fn lift_vec<S: Scalar>(x: &[S]) -> Vec<S::Ext> {
    x.iter().map(|&v| S::Ext::from_working(v)).collect()
}

/// `‖x̃ - ỹ‖₂`, with the difference formed in extended precision.
pub fn diff_norm_extended<S: Scalar>(x: &[S::Ext], y: &[S::Ext]) -> f64 {
    let d: Vec<S> = x.iter().zip(y).map(|(&a, &b)| (a - b).round()).collect();
    norm2(&d)
}
