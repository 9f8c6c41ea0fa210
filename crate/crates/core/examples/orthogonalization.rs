//! Classical versus modified Gram-Schmidt, and `x₀ = M⁻¹b` versus `x₀ = 0`.

use fbsmr::cli::{compare, Axis, Method};
use fbsmr::linalg::Matrix;
use fbsmr::precond::{FactorKind, FactorPrecision, LowPrecFactorization};
use fbsmr::probgen::{graded_randsvd, poisson2d, random_rhs, RandsvdSpec};
use fbsmr::solver::SolverConfig;

fn main() -> fbsmr::Result<()> {
    let poisson = Matrix::Csr(poisson2d(24)?);
    let graded = Matrix::Dense(graded_randsvd(&RandsvdSpec::new(100, 2.0, 1), 10.0)?);
    for (name, a, kind) in [("poisson m=24", poisson, FactorKind::Ilu0), ("graded randsvd", graded, FactorKind::Lu)] {
        let b = random_rhs(a.nrows(), 3);
        let m = LowPrecFactorization::factor(&a, kind, FactorPrecision::Single)?;
        for axis in [Axis::Orth, Axis::Initguess] {
            let res = compare(&a, &b, &m, Method::Fbsmr, &SolverConfig::default(), axis)?;
            let parts: Vec<String> = res
                .variants
                .iter()
                .map(|v| format!("{} {} its (gamma {:.1e})", v.label, v.iterations, v.gamma))
                .collect();
            println!("{name:<15} {axis:?}: {}", parts.join(", "));
        }
    }
    Ok(())
}
