//! Intrinsic conditioning of `A x = b`: `κ(A)` versus the perturbation
//! condition numbers `κ_δb` and `κ_δx`, and their conservation law.

use fbsmr::analysis::{conditioning_from_svd, correlation_measure, normalized, svd_jacobi};
use fbsmr::linalg::DenseMatrix;
use fbsmr::probgen::{randsvd, random_rhs, RandsvdSpec};

fn main() -> fbsmr::Result<()> {
    let n = 100;
    for alpha in [10.0, 12.0, 14.0] {
        let p = randsvd(&RandsvdSpec::new(n, alpha, 1))?;
        let svd = svd_jacobi(&p.a)?;
        let rep = conditioning_from_svd(&svd, &random_rhs(n, 2))?;
        let predicted = (2.0 * alpha * std::f64::consts::LN_10 * n as f64 / (n - 1) as f64).sqrt();
        println!(
            "alpha={alpha}: k(A)={:.2e}  k_db={:.2} (~{predicted:.2})  k_dx={:.2e}  conservation residual {:.1e}",
            rep.kappa_a,
            rep.kappa_db,
            rep.kappa_dx,
            rep.conservation_residual()
        );

        // b along the last left singular vector: the worst case for x.
        let b = normalized(&svd.u.column(n - 1));
        let worst = conditioning_from_svd(&svd, &b)?;
        println!("          b = u_n: k_db={:.2}  k_dx={:.2e}", worst.kappa_db, worst.kappa_dx);
    }

    // Correlated vs uncorrelated perturbations of a diagonal system.
    let a = DenseMatrix::from_diagonal(&[1.0, 1e-10]);
    let x = [1.0, 1e10];
    let b = [1.0, 1.0];
    let relative = DenseMatrix::from_fn(2, 2, |i, j| a.get(i, j) * 1e-16);
    let flat = DenseMatrix::from_fn(2, 2, |_, _| 1e-16);
    println!("dA = 1e-16 A   : {:?}", correlation_measure(&relative, &x, &b, 1e10)?);
    println!("dA = 1e-16 ones: {:?}", correlation_measure(&flat, &x, &b, 1e10)?);
    Ok(())
}
