use crate::error::{check_len, Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::{Extended, Scalar};

/// Solves `A x = b` by Gaussian elimination with complete pivoting, every
/// operation in the extended tier.
pub fn direct_solve_extended<S: Scalar>(a: &DenseMatrix<S>, b: &[S]) -> Result<Vec<S::Ext>> {
    let n = a.nrows();
    if !a.is_square() {
        return Err(Error::NotSquare { rows: n, cols: a.ncols() });
    }
    check_len("oracle rhs", n, b.len())?;
    let mut m: Vec<S::Ext> = a.as_slice().iter().map(|&v| S::Ext::from_working(v)).collect();
    let mut rhs: Vec<S::Ext> = b.iter().map(|&v| S::Ext::from_working(v)).collect();
    let mut cols: Vec<usize> = (0..n).collect();

    for k in 0..n {
        let (mut pi, mut pj, mut best) = (k, k, -1.0f64);
        for i in k..n {
            for j in k..n {
                let v = m[i * n + j].round().abs();
                if v > best {
                    (pi, pj, best) = (i, j, v);
                }
            }
        }
        if best == 0.0 {
            return Err(Error::ExactZeroPivot { index: k });
        }
        if pi != k {
            for j in 0..n {
                m.swap(k * n + j, pi * n + j);
            }
            rhs.swap(k, pi);
        }
        if pj != k {
            for i in 0..n {
                m.swap(i * n + k, i * n + pj);
            }
            cols.swap(k, pj);
        }
        let piv = m[k * n + k];
        for i in k + 1..n {
            let l = m[i * n + k].div_ext(piv);
            if l.round() == S::zero() {
                continue;
            }
            for j in k + 1..n {
                m[i * n + j] = m[i * n + j] - l.mul_ext(m[k * n + j]);
            }
            rhs[i] = rhs[i] - l.mul_ext(rhs[k]);
        }
    }

    let mut y = vec![S::Ext::zero(); n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in i + 1..n {
            s = s - m[i * n + j].mul_ext(y[j]);
        }
        y[i] = s.div_ext(m[i * n + i]);
    }
    let mut x = vec![S::Ext::zero(); n];
    for (k, &c) in cols.iter().enumerate() {
        x[c] = y[k];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ddouble::ExtendedScalar;
    use crate::linalg::kernels::residual_extended;

    #[test]
    fn exact_integer_system() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 2.0, 1.0], vec![1.0, 1.0, 0.0], vec![3.0, 0.0, 1.0]]).unwrap();
        // x = (1, -2, 3)
        let x = direct_solve_extended(&a, &[-1.0, -1.0, 6.0]).unwrap();
        let r: Vec<f64> = x.iter().map(|v: &ExtendedScalar| v.to_f64()).collect();
        for (got, want) in r.iter().zip([1.0, -2.0, 3.0]) {
            assert!((got - want).abs() < 1e-30);
        }
    }

    #[test]
    fn residual_is_below_working_precision() {
        let n = 8;
        let a = DenseMatrix::from_fn(n, n, |i, j| 1.0 / (i + j + 1) as f64);
        let b = vec![1.0; n];
        let x = direct_solve_extended(&a, &b).unwrap();
        let (_, rn) = residual_extended(&a, &b, &x).unwrap();
        // Hilbert(8) has κ ≈ 1.5e10; the extended solve keeps the residual tiny.
        assert!(rn < 1e-20, "{rn}");
    }

    #[test]
    fn singular() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(direct_solve_extended(&a, &[1.0, 1.0]), Err(Error::ExactZeroPivot { .. })));
    }
}
