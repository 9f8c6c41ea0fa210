//! Sparse 2-D Poisson problem with a binary32 ILU(0) preconditioner and a
//! manufactured solution of all ones.

use fbsmr::linalg::Matrix;
use fbsmr::precond::{FactorKind, FactorPrecision, LowPrecFactorization};
use fbsmr::probgen::{manufactured_rhs, ones_rhs, poisson2d};
use fbsmr::solver::{fbsmr, SolverConfig};

fn main() -> fbsmr::Result<()> {
    for m in [16, 32, 64] {
        let a = Matrix::Csr(poisson2d(m)?);
        let b = manufactured_rhs(&a, &ones_rhs(a.ncols()))?;
        let pre = LowPrecFactorization::factor(&a, FactorKind::Ilu0, FactorPrecision::Single)?;
        let rep = fbsmr(&a, &b, &pre, &SolverConfig::default())?;
        let err = rep.x_hat.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
        println!(
            "m={m:<3} n={:<5} {:?} after {:>3} iterations ({} restarts): gamma {:.2e}, max|x-1| {:.2e}",
            a.nrows(),
            rep.status,
            rep.iterations,
            rep.restarts,
            rep.gamma,
            err
        );
    }
    Ok(())
}
