//! End-to-end acceptance checks. Runs as a plain binary so that the one-line
//! verdict per criterion is always printed; exits nonzero if any fails.

mod common;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::{random_dd, random_f64, Dyadic};
use fbsmr::analysis::{condition_number, conditioning, conditioning_from_svd, svd_jacobi};
use fbsmr::cli::{backward_error_extended, table1_case};
use fbsmr::ddouble::{ext_add, ext_mul, two_prod, two_sum, ExtendedScalar, EPS_W};
use fbsmr::linalg::kernels::lift_vec;
use fbsmr::linalg::{mtx, DenseMatrix, Matrix};
use fbsmr::precond::{FactorKind, FactorPrecision, LowPrecFactorization};
use fbsmr::probgen::{poisson2d, randsvd, random_rhs, RandsvdSpec};
use fbsmr::scalar::{Field, Scalar};
use fbsmr::solver::{
    fbsmr, givens_rotation, hessenberg_update, rp_gmres, KrylovWorkspace, Orthogonalization, SolverConfig,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

struct Outcome {
    pass: bool,
    detail: String,
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn load(stem: &str) -> (Matrix<f64>, Vec<f64>) {
    let a = mtx::read_matrix_file(data(&format!("{stem}.mtx"))).expect("shipped matrix");
    let b = mtx::read_vector_file(data(&format!("{stem}_b.mtx"))).expect("shipped rhs");
    (a, b)
}

fn table1_grid() -> Vec<RandsvdSpec> {
    let mut v = Vec::new();
    for n in [100, 200] {
        for alpha in [10.0, 12.0, 14.0] {
            v.push(RandsvdSpec::new(n, alpha, 1));
        }
    }
    v
}

fn grid_config() -> SolverConfig {
    SolverConfig {
        tol: 1e-15,
        ..SolverConfig::default()
    }
}

fn table1_reproduction() -> Outcome {
    let mut pass = true;
    let mut worst = (0.0f64, 0.0f64);
    let mut rp_min = (f64::INFINITY, f64::INFINITY);
    for spec in table1_grid() {
        let row = table1_case(&spec, 2, &grid_config(), FactorPrecision::Double).unwrap();
        println!(
            "    n={:<3} alpha={:<2}  rp-gmres fwd {:.2e} bwd {:.2e} | fbsmr fwd(x^) {:.2e} fwd(x~) {:.2e} bwd {:.2e}",
            row.n, row.alpha, row.rp_forward, row.rp_backward, row.fbsmr_forward_hat, row.fbsmr_forward_tilde, row.fbsmr_backward
        );
        pass &= row.fbsmr_backward <= 1e-14 && row.fbsmr_forward_hat <= 1e-13;
        worst = (worst.0.max(row.fbsmr_backward), worst.1.max(row.fbsmr_forward_hat));
        if spec.alpha == 12.0 {
            pass &= row.rp_backward >= 1e-9;
            rp_min.0 = rp_min.0.min(row.rp_backward);
        }
        if spec.alpha == 14.0 {
            pass &= row.rp_backward >= 1e-7;
            rp_min.1 = rp_min.1.min(row.rp_backward);
        }
    }
    Outcome {
        pass,
        detail: format!(
            "fbsmr max bwd {:.1e} max fwd {:.1e}; rp-gmres min bwd {:.1e} (a=12) {:.1e} (a=14)",
            worst.0, worst.1, rp_min.0, rp_min.1
        ),
    }
}

/// Not a criterion: the same grid with a binary32 LU, where `κ(A) ε_s ≫ 1`.
fn table1_binary32_info() -> String {
    let mut gammas = Vec::new();
    for spec in table1_grid() {
        let a = randsvd(&spec).unwrap().a;
        let b = random_rhs(spec.n, 2);
        let m = LowPrecFactorization::lu(&a, FactorPrecision::Single).unwrap();
        let rep = fbsmr(&Matrix::Dense(a), &b, &m, &grid_config()).unwrap();
        gammas.push(format!("{:.0e}", rep.gamma));
    }
    format!("binary32 LU on the same grid, fbsmr gamma: [{}]", gammas.join(", "))
}

fn conservation_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut check = |a: &DenseMatrix<f64>, b: &[f64]| {
        let r = conditioning(a, b).unwrap().conservation_residual();
        worst = worst.max(r);
        count += 1;
    };
    for spec in table1_grid() {
        let a = randsvd(&spec).unwrap().a;
        check(&a, &random_rhs(spec.n, 2));
    }
    for k in 0..94u64 {
        let n = rng.random_range(2..=100);
        let b = random_rhs(n, 500 + k);
        if k % 3 == 2 {
            let a = DenseMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
            check(&a, &b);
        } else {
            let spec = RandsvdSpec {
                n,
                alpha: rng.random_range(0.0..14.0),
                r: rng.random_range(0.25..4.0),
                seed: k,
            };
            check(&randsvd(&spec).unwrap().a, &b);
        }
    }
    Outcome {
        pass: count == 100 && worst <= 1e-8,
        detail: format!("{count} instances, max |k_db k_dx / k(A) - 1| = {worst:.1e}"),
    }
}

fn kappa_db_asymptotics() -> Outcome {
    let n = 100;
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [10.0, 12.0, 14.0] {
        let a = randsvd(&RandsvdSpec::new(n, alpha, 1)).unwrap().a;
        let svd = svd_jacobi(&a).unwrap();
        let mid = (2.0 * alpha * std::f64::consts::LN_10 * n as f64 / (n - 1) as f64).sqrt();
        let (lo, hi) = (mid / 3.0, mid * 3.0);
        let (mut kmin, mut kmax) = (f64::INFINITY, 0.0f64);
        for s in 0..10 {
            let k = conditioning_from_svd(&svd, &random_rhs(n, 1000 + s)).unwrap().kappa_db;
            pass &= (lo..=hi).contains(&k);
            kmin = kmin.min(k);
            kmax = kmax.max(k);
        }
        parts.push(format!("a={alpha}: [{kmin:.2}, {kmax:.2}] in [{lo:.2}, {hi:.2}]"));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn double_double_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut failures = 0usize;
    for i in 0..100_000 {
        let a = random_f64(&mut rng, -500, 500);
        let b = match i % 4 {
            0 => -a * (1.0 + random_f64(&mut rng, -60, -1).abs()),
            1 => random_f64(&mut rng, -560, 560),
            _ => random_f64(&mut rng, -40, 40) * a.abs().max(1e-300),
        };
        let (s, e) = two_sum(a, b);
        let exact = Dyadic::from_f64(a).add(&Dyadic::from_f64(b));
        if s != a + b || !Dyadic::from_f64(s).add(&Dyadic::from_f64(e)).eq(&exact) {
            failures += 1;
        }
        let (x, y) = (random_f64(&mut rng, -400, 400), random_f64(&mut rng, -400, 400));
        let (p, e) = two_prod(x, y);
        let exact = Dyadic::from_f64(x).mul(&Dyadic::from_f64(y));
        if p != x * y || !Dyadic::from_f64(p).add(&Dyadic::from_f64(e)).eq(&exact) {
            failures += 1;
        }
    }
    let mut worst = 0.0f64;
    let mut over = 0usize;
    // Relative error bounded by 8 ε_w² = 2^-103.
    for i in 0..10_000 {
        let x = random_dd(&mut rng, -300, 300);
        let mut y = random_dd(&mut rng, -300, 300);
        let z = random_dd(&mut rng, -300, 300);
        if i % 3 == 0 {
            let t: f64 = rng.random_range(-1.0..1.0);
            y = ExtendedScalar::new(-x.hi, x.hi * t * 1e-20);
        }
        for (got, exact) in [
            (ext_add(x, y), Dyadic::from_dd(x).add(&Dyadic::from_dd(y))),
            (ext_mul(x, z), Dyadic::from_dd(x).mul(&Dyadic::from_dd(z))),
        ] {
            let err = Dyadic::from_dd(got).sub(&exact);
            if !err.le_scaled(&exact, -103) {
                over += 1;
            }
            if !exact.is_zero() {
                worst = worst.max((approx_f64(&err) / approx_f64(&exact)).abs() / (EPS_W * EPS_W));
            }
        }
    }
    Outcome {
        pass: failures == 0 && over == 0,
        detail: format!(
            "{failures} exactness failures in 2x10^5 EFTs; {over} of 2x10^4 ext ops above 8 eps^2 (max ~{worst:.1} eps^2)"
        ),
    }
}

/// Nearest-ish binary64 to a dyadic, for reporting only.
fn approx_f64(d: &Dyadic) -> f64 {
    let shift = (d.m.bits() as i64 - 60).max(0);
    let top = i64::try_from(&d.m >> shift as usize).unwrap();
    let e = (d.e + shift) as i32;
    top as f64 * 2f64.powi(e / 2) * 2f64.powi(e - e / 2)
}

fn givens_contract() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut worst_norm = 0.0f64;
    let mut worst_bottom = 0.0f64;
    // c² + |s|² - 1 evaluated exactly enough that only the rotation's own
    // rounding is measured.
    let mut record = |c: f64, s: (f64, f64), bottom: f64, r0: f64| {
        let sum = ExtendedScalar::from_prod(c, c)
            .add_dd(ExtendedScalar::from_prod(s.0, s.0))
            .add_dd(ExtendedScalar::from_prod(s.1, s.1))
            .add_f64(-1.0);
        worst_norm = worst_norm.max(sum.hi.abs() / EPS_W);
        if r0 > 0.0 {
            worst_bottom = worst_bottom.max(bottom / (EPS_W * r0));
        }
    };
    for i in 0..10_000 {
        let beta = if i % 97 == 0 { 0.0 } else { random_f64(&mut rng, -30, 30).abs() };
        let a = if i % 89 == 0 { 0.0 } else { random_f64(&mut rng, -30, 30) };
        let g = givens_rotation(a, beta);
        let bottom = g.apply(a, beta).1.abs();
        record(g.c, (g.s, 0.0), bottom, a.abs().hypot(beta));

        let ac = if i % 89 == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(random_f64(&mut rng, -30, 30), random_f64(&mut rng, -30, 30))
        };
        let g = givens_rotation(ac, beta);
        let bottom = g.apply(ac, Complex64::new(beta, 0.0)).1.abs();
        record(g.c, (g.s.re, g.s.im), bottom, ac.norm().hypot(beta));
    }
    let mut diag_ok = true;
    let mut checked = 0;
    for k in 1..=30 {
        for trial in 0..4 {
            diag_ok &= hessenberg_diag_ok::<f64>(&mut rng, k, trial);
            diag_ok &= hessenberg_diag_ok::<Complex64>(&mut rng, k, trial);
            checked += 2;
        }
    }
    Outcome {
        pass: worst_norm <= 4.0 && worst_bottom <= 4.0 && diag_ok,
        detail: format!(
            "max |c^2+|s|^2-1| = {worst_norm:.2} eps, max bottom = {worst_bottom:.2} eps r0; diag(R) real >= 0 on {checked} Hessenbergs: {diag_ok}"
        ),
    }
}

fn random_scalar<S: Scalar>(rng: &mut impl Rng) -> S {
    S::from_parts(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn hessenberg_diag_ok<S: Scalar>(rng: &mut impl Rng, k: usize, trial: usize) -> bool {
    let mut ws = KrylovWorkspace::<S>::with_rhs(1.0);
    let mut ok = true;
    for j in 1..=k {
        let h: Vec<S> = (0..j).map(|_| random_scalar(rng)).collect();
        let alpha = if trial == 3 && j % 5 == 0 { 0.0 } else { rng.random_range(0.0..2.0) };
        hessenberg_update(&mut ws, &h, alpha);
        for (i, col) in ws.r_cols.iter().enumerate() {
            let d = col[i];
            ok &= d.im() == 0.0 && d.re() >= 0.0;
        }
    }
    ok
}

fn residual_gap() -> Outcome {
    let (a, b) = load("graded_n100");
    let kappa = condition_number(&a.to_dense()).unwrap();
    let m = LowPrecFactorization::factor(&a, FactorKind::Lu, FactorPrecision::Single).unwrap();
    let cfg = SolverConfig::default();
    let rp = rp_gmres(&a, &b, &m, &cfg).unwrap();
    let rp_true = backward_error_extended(&a, &b, &lift_vec(&rp.x_hat)).unwrap();
    let fb = fbsmr(&a, &b, &m, &cfg).unwrap();
    let fb_true = backward_error_extended(&a, &b, &fb.x_tilde).unwrap();
    let fb_hat = backward_error_extended(&a, &b, &lift_vec(&fb.x_hat)).unwrap();
    Outcome {
        pass: kappa >= 1e10 && rp.final_estimate() <= 1e-12 && rp_true >= 1e-9 && fb_true <= 1e-14,
        detail: format!(
            "k(A) = {kappa:.1e}; rp-gmres estimate {:.1e} vs true {rp_true:.1e}; fbsmr true {fb_true:.1e} (x^ residual {fb_hat:.1e})",
            rp.final_estimate()
        ),
    }
}

fn orthogonalization_variants() -> Outcome {
    let cases = [
        ("graded_n100", FactorKind::Lu, FactorPrecision::Single),
        ("poisson_m16", FactorKind::Ilu0, FactorPrecision::Single),
        ("randsvd_n100_a12", FactorKind::Lu, FactorPrecision::Double),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (stem, kind, prec) in cases {
        let (a, b) = load(stem);
        let m = LowPrecFactorization::factor(&a, kind, prec).unwrap();
        let run = |orth| {
            let cfg = SolverConfig {
                orth,
                ..SolverConfig::default()
            };
            let r = fbsmr(&a, &b, &m, &cfg).unwrap();
            (r.converged && r.gamma <= cfg.tol, r.iterations)
        };
        let (mc, mi) = run(Orthogonalization::Mgs);
        let (cc, ci) = run(Orthogonalization::Cgs);
        pass &= mc && cc && mi.abs_diff(ci) <= 2;
        parts.push(format!("{stem}: mgs {mi}{} cgs {ci}{}", mark(mc), mark(cc)));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn mark(converged: bool) -> &'static str {
    if converged {
        ""
    } else {
        " (not converged)"
    }
}

fn equivalence_regression() -> Outcome {
    let mut identical = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    for k in 0..10u64 {
        let same = match k {
            8 => {
                let a = Matrix::Csr(poisson2d(9).unwrap());
                let b = random_rhs(64, k);
                let m = LowPrecFactorization::factor(&a, FactorKind::Ilu0, FactorPrecision::Single).unwrap();
                same_runs(&a, &b, &m, 12)
            }
            9 => {
                let n = 40;
                let a = DenseMatrix::from_fn(n, n, |i, j| {
                    let v: Complex64 = random_scalar(&mut rng);
                    if i == j {
                        v + Complex64::new(8.0, 3.0)
                    } else {
                        v.scale(0.5)
                    }
                });
                let b: Vec<Complex64> = (0..n).map(|_| random_scalar(&mut rng)).collect();
                let m = LowPrecFactorization::lu(&a, FactorPrecision::Single).unwrap();
                same_runs(&Matrix::Dense(a), &b, &m, 7)
            }
            _ => {
                let spec = RandsvdSpec::new(rng.random_range(20..=80), rng.random_range(2.0..12.0), k);
                let a = randsvd(&spec).unwrap().a;
                let b = random_rhs(spec.n, 100 + k);
                let m = LowPrecFactorization::lu(&a, FactorPrecision::Single).unwrap();
                same_runs(&Matrix::Dense(a), &b, &m, 5 + k as usize)
            }
        };
        identical += usize::from(same);
    }
    Outcome {
        pass: identical == 10,
        detail: format!("{identical}/10 instances with bitwise identical histories and iterates"),
    }
}

fn same_runs<S: Scalar>(a: &Matrix<S>, b: &[S], m: &LowPrecFactorization<S>, restart: usize) -> bool {
    let cfg = SolverConfig {
        restart,
        maxit: 120,
        stabilized: false,
        ..SolverConfig::default()
    };
    let f = fbsmr(a, b, m, &cfg).unwrap();
    let g = rp_gmres(a, b, m, &cfg).unwrap();
    let bits = |v: Option<f64>| v.map(f64::to_bits);
    f.history.len() == g.history.len()
        && f.history.iter().zip(&g.history).all(|(p, q)| {
            p.it == q.it
                && p.restart == q.restart
                && p.est_rel_res.to_bits() == q.est_rel_res.to_bits()
                && bits(p.true_rel_res) == bits(q.true_rel_res)
        })
        && f.x_hat
            .iter()
            .zip(&g.x_hat)
            .all(|(x, y)| x.to_parts().0.to_bits() == y.to_parts().0.to_bits() && x.to_parts().1.to_bits() == y.to_parts().1.to_bits())
        && f.iterations == g.iterations
        && f.gamma.to_bits() == g.gamma.to_bits()
}

fn poisson_manufactured() -> Outcome {
    let (a, b) = load("poisson_m16");
    let m = LowPrecFactorization::factor(&a, FactorKind::Ilu0, FactorPrecision::Single).unwrap();
    let rep = fbsmr(&a, &b, &m, &SolverConfig::default()).unwrap();
    let err = rep.x_hat.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
    Outcome {
        pass: a.nrows() == 225 && rep.converged && rep.gamma <= 1e-14 && err <= 1e-12,
        detail: format!(
            "n = {}, gamma = {:.1e} after {} iterations, max |x^ - 1| = {err:.1e}",
            a.nrows(),
            rep.gamma,
            rep.iterations
        ),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 9] = [
        ("randsvd error grid", table1_reproduction, 60),
        ("conservation law", conservation_law, 10),
        ("kappa_db asymptotics", kappa_db_asymptotics, 10),
        ("double-double exactness", double_double_exactness, 10),
        ("givens contract", givens_contract, 5),
        ("estimated vs true residual gap", residual_gap, 30),
        ("cgs/mgs agreement", orthogonalization_variants, 60),
        ("unstabilized equivalence", equivalence_regression, 10),
        ("poisson manufactured solution", poisson_manufactured, 10),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = f();
        let elapsed = t.elapsed();
        let in_time = elapsed <= Duration::from_secs(*budget);
        let ok = out.pass && in_time;
        failed += usize::from(!ok);
        println!(
            "criterion {} {:<32} {}  [{:.2}s / {}s] {}",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget,
            out.detail
        );
        if i == 0 {
            println!("    info: {}", table1_binary32_info());
        }
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
