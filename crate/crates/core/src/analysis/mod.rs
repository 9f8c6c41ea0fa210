//! Intrinsic conditioning of `A x = b`: the perturbation condition numbers
//! `κ_δb` and `κ_δx`, their conservation law, error-correlation checks and
//! stability verdicts against an extended-precision reference solution.

mod oracle;
mod svd;

pub use oracle::direct_solve_extended;
pub use svd::{svd_jacobi, svd_jacobi_with, SvdOptions, SvdResult, DEFAULT_DENSE_LIMIT};

use serde::{Deserialize, Serialize};

use crate::ddouble::EPS_W;
use crate::error::{check_len, Error, Result};
use crate::linalg::kernels::{diff_norm_extended, lift_vec, matvec_extended, norm2, round_vec};
use crate::linalg::{DenseMatrix, LinearOperator};
use crate::scalar::{Field, Scalar};
use crate::solver::SolveReport;

#[derive(Clone, Debug)]
pub struct ConditioningReport<S> {
    /// `σ₁ / σ_n`.
    pub kappa_a: f64,
    /// `1 / √Σ |c_i σ_n / σ_i|²`.
    pub kappa_db: f64,
    /// `√Σ |c_i σ₁ / σ_i|²`.
    pub kappa_dx: f64,
    /// `c = Uᴴ b / ‖b‖`.
    pub coeffs: Vec<S>,
    pub sigma: Vec<f64>,
    /// `σ_n < 10 ε_w σ₁`: the matrix is singular to working precision and
    /// the values above are unreliable.
    pub beyond_tier: bool,
}

impl<S: Scalar> ConditioningReport<S> {
    /// `|κ_δb κ_δx / κ(A) - 1|`.
    pub fn conservation_residual(&self) -> f64 {
        (self.kappa_db * self.kappa_dx / self.kappa_a - 1.0).abs()
    }
}

pub fn conditioning<S: Scalar>(a: &DenseMatrix<S>, b: &[S]) -> Result<ConditioningReport<S>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    conditioning_from_svd(&svd_jacobi(a)?, b)
}

/// Evaluates the report from a precomputed SVD.
pub fn conditioning_from_svd<S: Scalar>(svd: &SvdResult<S>, b: &[S]) -> Result<ConditioningReport<S>> {
    let n = svd.sigma.len();
    check_len("conditioning rhs", svd.u.nrows(), b.len())?;
    let bnorm = norm2(b);
    if bnorm == 0.0 || !bnorm.is_finite() {
        return Err(Error::InvalidConfig("right-hand side must be nonzero and finite".into()));
    }
    let (s1, sn) = (svd.sigma[0], svd.sigma[n - 1]);
    if !(sn > 0.0) {
        return Err(Error::InvalidConfig("matrix is numerically singular".into()));
    }
    let ut = svd.u.adjoint();
    let coeffs: Vec<S> = (0..n)
        .map(|i| {
            let mut acc = S::zero();
            for (&u, &bj) in ut.row(i).iter().zip(b) {
                acc += u * bj.scale(1.0 / bnorm);
            }
            acc
        })
        .collect();
    let db_terms: Vec<f64> = coeffs
        .iter()
        .zip(&svd.sigma)
        .map(|(c, &s)| c.abs() * (sn / s))
        .collect();
    let dx_terms: Vec<f64> = coeffs
        .iter()
        .zip(&svd.sigma)
        .map(|(c, &s)| c.abs() * (s1 / s))
        .collect();
    Ok(ConditioningReport {
        kappa_a: s1 / sn,
        kappa_db: 1.0 / norm2(&db_terms),
        kappa_dx: norm2(&dx_terms),
        coeffs,
        sigma: svd.sigma.clone(),
        beyond_tier: sn < 10.0 * EPS_W * s1,
    })
}

pub fn condition_number<S: Scalar>(a: &DenseMatrix<S>) -> Result<f64> {
    Ok(svd_jacobi(a)?.condition_number())
}

pub fn kappa_delta_b<S: Scalar>(a: &DenseMatrix<S>, b: &[S]) -> Result<f64> {
    Ok(conditioning(a, b)?.kappa_db)
}

pub fn kappa_delta_x<S: Scalar>(a: &DenseMatrix<S>, b: &[S]) -> Result<f64> {
    Ok(conditioning(a, b)?.kappa_dx)
}

/// `|κ_δb κ_δx / κ(A) - 1|`, which vanishes in exact arithmetic.
pub fn conservation_check<S: Scalar>(a: &DenseMatrix<S>, b: &[S]) -> Result<f64> {
    Ok(conditioning(a, b)?.conservation_residual())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorrelationClass {
    Strong,
    Weak,
    Uncorrelated,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Correlation {
    /// `‖δA x‖ / ‖b‖`.
    pub rho: f64,
    pub class: CorrelationClass,
}

/// Classifies how strongly a perturbation `δA` is correlated with `x`.
///
/// Strong when `rho <= 100 ε_w`; uncorrelated when `rho >= 0.1 κ(A) ε_w`;
/// weak in between. The constants are conventions, not sharp bounds.
pub fn correlation_measure<S, D>(delta_a: &D, x: &[S], b: &[S], kappa_a: f64) -> Result<Correlation>
where
    S: Scalar,
    D: LinearOperator<S> + ?Sized,
{
    check_len("correlation rhs", delta_a.nrows(), b.len())?;
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Err(Error::InvalidConfig("right-hand side must be nonzero".into()));
    }
    let dax = round_vec::<S>(&matvec_extended(delta_a, x)?);
    let rho = norm2(&dax) / bnorm;
    let class = if rho <= 100.0 * EPS_W {
        CorrelationClass::Strong
    } else if rho >= 0.1 * kappa_a * EPS_W {
        CorrelationClass::Uncorrelated
    } else {
        CorrelationClass::Weak
    };
    Ok(Correlation { rho, class })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EfbsConstants {
    pub c_f: f64,
    pub c_b: f64,
}

impl Default for EfbsConstants {
    fn default() -> Self {
        Self { c_f: 100.0, c_b: 100.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EfbsVerdict {
    /// Essentially forward stable.
    pub efs: bool,
    /// Essentially backward stable.
    pub ebs: bool,
    /// `‖x̂ - x*‖ / ‖x*‖`.
    pub forward_error: f64,
    pub backward_error: f64,
}

/// Relative forward error `‖x - x*‖ / ‖x*‖` with the difference taken in
/// extended precision.
pub fn forward_error<S: Scalar>(x: &[S::Ext], oracle: &[S::Ext]) -> f64 {
    diff_norm_extended::<S>(x, oracle) / norm2(&round_vec::<S>(oracle))
}

pub fn efbs_verdict<S: Scalar>(
    report: &SolveReport<S>,
    oracle_x: &[S::Ext],
    consts: &EfbsConstants,
) -> Result<EfbsVerdict> {
    let n = oracle_x.len();
    check_len("oracle solution", report.x_hat.len(), n)?;
    let fe = forward_error::<S>(&lift_vec(&report.x_hat), oracle_x);
    Ok(EfbsVerdict {
        efs: fe <= consts.c_f * n as f64 * EPS_W,
        ebs: report.gamma <= consts.c_b * EPS_W,
        forward_error: fe,
        backward_error: report.gamma,
    })
}

/// `u` scaled to unit length; helper for building right-hand sides along
/// singular vectors.
pub fn normalized<S: Field<Real = f64>>(u: &[S]) -> Vec<S> {
    let s = norm2(u);
    u.iter().map(|v| v.scale(1.0 / s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probgen::{randsvd, RandsvdSpec};

    #[test]
    fn orthogonal_matrix_is_perfectly_conditioned() {
        let p = randsvd(&RandsvdSpec::new(12, 0.0, 5)).unwrap();
        let b: Vec<f64> = (0..12).map(|i| (i as f64).cos()).collect();
        let r = conditioning(&p.a, &b).unwrap();
        assert!((r.kappa_a - 1.0).abs() < 1e-13);
        assert!((r.kappa_db - 1.0).abs() < 1e-13);
        assert!((r.kappa_dx - 1.0).abs() < 1e-13);
    }

    #[test]
    fn rhs_along_extreme_singular_vectors() {
        let a = DenseMatrix::from_diagonal(&[4.0, 2.0, 0.5]);
        let r = conditioning(&a, &[0.0, 0.0, 3.0]).unwrap();
        assert_eq!(r.kappa_a, 8.0);
        assert_eq!(r.kappa_db, 1.0);
        assert_eq!(r.kappa_dx, 8.0);
        let r = conditioning(&a, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(r.kappa_db, 8.0);
        assert_eq!(r.kappa_dx, 1.0);
    }

    #[test]
    fn conservation_on_small_cases() {
        assert_eq!(conservation_check(&DenseMatrix::<f64>::identity(4), &[1.0, 2.0, 3.0, 4.0]).unwrap(), 0.0);
        let p = randsvd(&RandsvdSpec::new(30, 12.0, 2)).unwrap();
        let b: Vec<f64> = (0..30).map(|i| ((i * 7) % 5) as f64 - 2.0).collect();
        assert!(conservation_check(&p.a, &b).unwrap() <= 1e-8);
    }

    #[test]
    fn beyond_tier_flag() {
        let a = DenseMatrix::from_diagonal(&[1.0, 1e-17]);
        assert!(conditioning(&a, &[1.0, 1.0]).unwrap().beyond_tier);
        assert!(conditioning(&DenseMatrix::from_diagonal(&[1.0, 0.0]), &[1.0, 1.0]).is_err());
    }

    #[test]
    fn correlation_classes() {
        let a = DenseMatrix::from_diagonal(&[1.0, 1e-8]);
        let x = [1.0, 1e8];
        let b = [1.0, 1.0];
        let zero = DenseMatrix::<f64>::zeros(2, 2);
        let c = correlation_measure(&zero, &x, &b, 1e8).unwrap();
        assert_eq!((c.rho, c.class), (0.0, CorrelationClass::Strong));
        // relative perturbation of A itself: δA x = ε b
        let rel = DenseMatrix::from_fn(2, 2, |i, j| a.get(i, j) * EPS_W);
        let c = correlation_measure(&rel, &x, &b, 1e8).unwrap();
        assert_eq!(c.class, CorrelationClass::Strong);
        assert!((c.rho - EPS_W).abs() < 1e-20);
        let big = DenseMatrix::from_fn(2, 2, |_, _| EPS_W);
        let c = correlation_measure(&big, &x, &b, 1e8).unwrap();
        assert_eq!(c.class, CorrelationClass::Uncorrelated);
    }
}
