//! The building blocks of one restart cycle, driven by hand: Arnoldi with a
//! preconditioned trial basis, rotated Hessenberg columns and the projected
//! solve.

use fbsmr::linalg::kernels::{matvec, norm2, residual};
use fbsmr::precond::{FactorPrecision, LowPrecFactorization, Preconditioner};
use fbsmr::probgen::{randsvd, random_rhs, RandsvdSpec};
use fbsmr::solver::{arnoldi_step, hessenberg_update, KrylovWorkspace, Orthogonalization};

fn main() -> fbsmr::Result<()> {
    let n = 40;
    let a = randsvd(&RandsvdSpec::new(n, 4.0, 7))?.a;
    let b = random_rhs(n, 8);
    let m = LowPrecFactorization::lu(&a, FactorPrecision::Single)?;

    let beta = norm2(&b);
    let mut ws = KrylovWorkspace::new(&b, beta);
    for k in 1..=6 {
        let z = m.apply_inverse(ws.q.last().unwrap());
        let w = matvec(&a, &z)?;
        let step = arnoldi_step(&ws.q, w, Orthogonalization::Mgs);
        ws.z.push(z);
        let est = hessenberg_update(&mut ws, &step.h, step.alpha);
        let diag = ws.r_cols.last().unwrap()[k - 1];
        println!("k={k}  |g_k+1|/beta = {:.3e}  R_kk = {diag:.3e}", est / beta);
        match step.q_new {
            Some(q) => ws.q.push(q),
            None => break,
        }
    }

    let y = ws.solve_projected()?;
    let mut x = vec![0.0; n];
    for (zj, yj) in ws.z.iter().zip(&y) {
        for (xi, zi) in x.iter_mut().zip(zj) {
            *xi += yj * zi;
        }
    }
    println!("true relative residual after one cycle: {:.3e}", residual(&a, &b, &x)?.1 / beta);
    Ok(())
}
