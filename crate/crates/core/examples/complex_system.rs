//! Complex-valued systems use the same solver; the extended tier becomes a
//! pair of double-doubles.

use fbsmr::linalg::{DenseMatrix, Matrix};
use fbsmr::precond::{FactorPrecision, LowPrecFactorization};
use fbsmr::probgen::manufactured_rhs;
use fbsmr::solver::{fbsmr, rp_gmres, SolverConfig};
use num_complex::Complex64;

fn main() -> fbsmr::Result<()> {
    let n = 60;
    // Shifted Helmholtz-like 1-D operator with complex damping.
    let k2 = 0.8;
    let a = DenseMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => Complex64::new(2.0 - k2, 0.05),
        1 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 0.0),
    });
    let x_star: Vec<Complex64> = (0..n).map(|i| Complex64::from_polar(1.0, i as f64 * 0.3)).collect();
    let b = manufactured_rhs(&a, &x_star)?;
    let m = LowPrecFactorization::lu(&a, FactorPrecision::Single)?;
    let a = Matrix::Dense(a);
    let cfg = SolverConfig::default();
    for (name, rep) in [("fbsmr", fbsmr(&a, &b, &m, &cfg)?), ("rp-gmres", rp_gmres(&a, &b, &m, &cfg)?)] {
        let err = rep.x_hat.iter().zip(&x_star).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        println!("{name:>8}: {:?} in {} iterations, gamma {:.2e}, max error {err:.2e}", rep.status, rep.iterations, rep.gamma);
    }
    Ok(())
}
