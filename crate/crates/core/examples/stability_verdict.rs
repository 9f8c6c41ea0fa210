//! Essentially forward/backward stable verdicts against an extended-precision
//! direct solve, for both solvers across increasing `κ(A)`.

use fbsmr::analysis::{direct_solve_extended, efbs_verdict, EfbsConstants};
use fbsmr::linalg::Matrix;
use fbsmr::precond::{FactorPrecision, LowPrecFactorization};
use fbsmr::probgen::{randsvd, random_rhs, RandsvdSpec};
use fbsmr::solver::{fbsmr, rp_gmres, SolverConfig};

fn main() -> fbsmr::Result<()> {
    let consts = EfbsConstants::default();
    for alpha in [4.0, 8.0, 12.0] {
        let a = randsvd(&RandsvdSpec::new(60, alpha, 11))?.a;
        let b = random_rhs(60, 12);
        let oracle = direct_solve_extended(&a, &b)?;
        let m = LowPrecFactorization::lu(&a, FactorPrecision::Double)?;
        let a = Matrix::Dense(a);
        let cfg = SolverConfig::default();
        let f = efbs_verdict(&fbsmr(&a, &b, &m, &cfg)?, &oracle, &consts)?;
        let g = efbs_verdict(&rp_gmres(&a, &b, &m, &cfg)?, &oracle, &consts)?;
        println!(
            "alpha={alpha:>4}: fbsmr EFS={} EBS={} (fwd {:.1e}, bwd {:.1e}) | rp-gmres EFS={} EBS={} (fwd {:.1e}, bwd {:.1e})",
            f.efs, f.ebs, f.forward_error, f.backward_error, g.efs, g.ebs, g.forward_error, g.backward_error
        );
    }
    Ok(())
}
