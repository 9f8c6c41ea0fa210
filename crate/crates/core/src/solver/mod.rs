//! Restarted minimal-residual solvers with a right preconditioner.
//!
//! [`fbsmr`] accumulates the solution, the residual and `A z` in the
//! extended tier; [`rp_gmres`] is the same iteration entirely in working
//! precision.

mod arnoldi;
mod givens;
mod workspace;

pub use arnoldi::{arnoldi_step, ArnoldiStep, Orthogonalization};
pub use givens::{givens_rotation, Rotation};
pub use workspace::{back_substitute, hessenberg_update, KrylovWorkspace, StoredRotation};

use serde::{Deserialize, Serialize};

use crate::ddouble::EPS_W;
use crate::error::{check_len, Error, Result};
use crate::linalg::kernels::{
    axpy_block, axpy_extended, lift_vec, matvec, matvec_extended, residual, residual_extended,
    round_vec,
};
use crate::linalg::LinearOperator;
use crate::precond::Preconditioner;
use crate::scalar::{Extended, Scalar};

/// Consecutive restarts without a new best true residual before giving up.
pub const STAGNATION_RESTARTS: usize = 3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialGuess {
    /// `x₀ = M⁻¹ b`.
    #[default]
    PrecondRhs,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Relative residual tolerance against `‖b‖`.
    pub tol: f64,
    /// Maximum inner iterations per cycle.
    pub restart: usize,
    /// Total inner-iteration cap.
    pub maxit: usize,
    pub orth: Orthogonalization,
    pub init_guess: InitialGuess,
    /// Use the extended tier; `false` runs every step in working precision.
    pub stabilized: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 10.0 * EPS_W,
            restart: 30,
            maxit: 500,
            orth: Orthogonalization::Mgs,
            init_guess: InitialGuess::PrecondRhs,
            stabilized: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidConfig(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        if self.restart == 0 || self.restart > self.maxit {
            return Err(Error::InvalidConfig(format!(
                "need 1 <= restart <= maxit, got restart={} maxit={}",
                self.restart, self.maxit
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Termination {
    Converged,
    MaxIterations,
    Stagnated,
}

/// One row of the convergence history.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryRecord {
    pub it: usize,
    /// `|g_{k+1}| / ‖b‖`; at `it = 0` this is the initial true residual.
    pub est_rel_res: f64,
    /// `‖b - A x‖ / ‖b‖`, present at cycle boundaries only.
    pub true_rel_res: Option<f64>,
    pub restart: bool,
}

#[derive(Clone, Debug)]
pub struct SolveReport<S: Scalar> {
    pub x_hat: Vec<S>,
    pub x_tilde: Vec<S::Ext>,
    /// Final `‖b - A x̃‖ / ‖b‖`.
    pub gamma: f64,
    pub converged: bool,
    pub status: Termination,
    pub iterations: usize,
    pub restarts: usize,
    pub history: Vec<HistoryRecord>,
}

impl<S: Scalar> SolveReport<S> {
    /// Last estimated relative residual.
    pub fn final_estimate(&self) -> f64 {
        self.history.last().map_or(0.0, |h| h.est_rel_res)
    }

    fn zero(n: usize) -> Self {
        Self {
            x_hat: vec![S::zero(); n],
            x_tilde: vec![S::Ext::zero(); n],
            gamma: 0.0,
            converged: true,
            status: Termination::Converged,
            iterations: 0,
            restarts: 0,
            history: vec![HistoryRecord {
                it: 0,
                est_rel_res: 0.0,
                true_rel_res: Some(0.0),
                restart: true,
            }],
        }
    }
}

/// Storage and arithmetic for the iterate.
trait Tier<S: Scalar> {
    type X: Clone;
    fn init(x0: &[S]) -> Self::X;
    fn residual<A: LinearOperator<S> + ?Sized>(a: &A, b: &[S], x: &Self::X) -> Result<(Vec<S>, f64)>;
    fn matvec<A: LinearOperator<S> + ?Sized>(a: &A, z: &[S]) -> Result<Vec<S>>;
    fn update(x: &mut Self::X, z: &[Vec<S>], y: &[S]) -> Result<()>;
    fn finish(x: Self::X) -> (Vec<S>, Vec<S::Ext>);
}

struct Stabilized;
struct Working;

impl<S: Scalar> Tier<S> for Stabilized {
    type X = Vec<S::Ext>;
    fn init(x0: &[S]) -> Self::X {
        lift_vec(x0)
    }
    fn residual<A: LinearOperator<S> + ?Sized>(a: &A, b: &[S], x: &Self::X) -> Result<(Vec<S>, f64)> {
        residual_extended(a, b, x)
    }
    fn matvec<A: LinearOperator<S> + ?Sized>(a: &A, z: &[S]) -> Result<Vec<S>> {
        Ok(round_vec::<S>(&matvec_extended(a, z)?))
    }
    fn update(x: &mut Self::X, z: &[Vec<S>], y: &[S]) -> Result<()> {
        axpy_extended(x, z, y)
    }
    fn finish(x: Self::X) -> (Vec<S>, Vec<S::Ext>) {
        (round_vec::<S>(&x), x)
    }
}

impl<S: Scalar> Tier<S> for Working {
    type X = Vec<S>;
    fn init(x0: &[S]) -> Self::X {
        x0.to_vec()
    }
    fn residual<A: LinearOperator<S> + ?Sized>(a: &A, b: &[S], x: &Self::X) -> Result<(Vec<S>, f64)> {
        residual(a, b, x)
    }
    fn matvec<A: LinearOperator<S> + ?Sized>(a: &A, z: &[S]) -> Result<Vec<S>> {
        matvec(a, z)
    }
    fn update(x: &mut Self::X, z: &[Vec<S>], y: &[S]) -> Result<()> {
        axpy_block(x, z, y)
    }
    fn finish(x: Self::X) -> (Vec<S>, Vec<S::Ext>) {
        let lifted = lift_vec(&x);
        (x, lifted)
    }
}

fn check_problem<S: Scalar, A, M>(a: &A, b: &[S], m: &M, cfg: &SolverConfig) -> Result<()>
where
    A: LinearOperator<S> + ?Sized,
    M: Preconditioner<S> + ?Sized,
{
    cfg.validate()?;
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    check_len("right-hand side", a.nrows(), b.len())?;
    check_len("preconditioner", a.nrows(), m.dim())
}

fn initial_guess<S: Scalar, M: Preconditioner<S> + ?Sized>(b: &[S], m: &M, mode: InitialGuess) -> Vec<S> {
    match mode {
        InitialGuess::PrecondRhs => m.apply_inverse(b),
        InitialGuess::Zero => vec![S::zero(); b.len()],
    }
}

/// Solves the projected system, falling back to its leading nonsingular
/// block when a diagonal entry of `R̂` vanishes.
fn projected_solution<S: Scalar>(ws: &KrylovWorkspace<S>) -> Result<Vec<S>> {
    match ws.solve_projected() {
        Err(Error::SingularProjectedSystem { index }) => back_substitute(&ws.r_cols, &ws.g[..index]),
        other => other,
    }
}

/// FBSMR: right-preconditioned minimal residual with the solution update,
/// the residual and `A z` evaluated in the extended tier.
///
/// With `cfg.stabilized == false` the same iteration runs entirely in
/// working precision and reproduces [`rp_gmres`] exactly.
pub fn fbsmr<S, A, M>(a: &A, b: &[S], m: &M, cfg: &SolverConfig) -> Result<SolveReport<S>>
where
    S: Scalar,
    A: LinearOperator<S> + ?Sized,
    M: Preconditioner<S> + ?Sized,
{
    if cfg.stabilized {
        run::<S, A, M, Stabilized>(a, b, m, cfg)
    } else {
        run::<S, A, M, Working>(a, b, m, cfg)
    }
}

fn run<S, A, M, T>(a: &A, b: &[S], m: &M, cfg: &SolverConfig) -> Result<SolveReport<S>>
where
    S: Scalar,
    A: LinearOperator<S> + ?Sized,
    M: Preconditioner<S> + ?Sized,
    T: Tier<S>,
{
    check_problem(a, b, m, cfg)?;
    let beta0 = crate::linalg::norm2(b);
    if !beta0.is_finite() {
        return Err(Error::Diverged { iteration: 0 });
    }
    if beta0 == 0.0 {
        return Ok(SolveReport::zero(b.len()));
    }
    let tau_abs = cfg.tol * beta0;

    let mut x = T::init(&initial_guess(b, m, cfg.init_guess));
    let (mut r, mut rnorm) = T::residual(a, b, &x)?;
    let mut gamma = rnorm / beta0;
    if !gamma.is_finite() {
        return Err(Error::Diverged { iteration: 0 });
    }
    let mut history = vec![HistoryRecord {
        it: 0,
        est_rel_res: gamma,
        true_rel_res: Some(gamma),
        restart: true,
    }];
    let mut best = (x.clone(), gamma);
    let (mut its, mut restarts, mut stall) = (0usize, 0usize, 0usize);

    let status = loop {
        if gamma <= cfg.tol {
            break Termination::Converged;
        }
        if its >= cfg.maxit {
            break Termination::MaxIterations;
        }
        if stall >= STAGNATION_RESTARTS {
            break Termination::Stagnated;
        }

        let mut ws = KrylovWorkspace::new(&r, rnorm);
        while ws.len() < cfg.restart && its < cfg.maxit {
            let z = m.apply_inverse(ws.q.last().expect("basis is never empty"));
            let w = T::matvec(a, &z)?;
            let step = arnoldi_step(&ws.q, w, cfg.orth);
            ws.z.push(z);
            let qres = hessenberg_update(&mut ws, &step.h, step.alpha);
            its += 1;
            let est = qres / beta0;
            if !est.is_finite() {
                return Err(Error::Diverged { iteration: its });
            }
            history.push(HistoryRecord {
                it: its,
                est_rel_res: est,
                true_rel_res: None,
                restart: false,
            });
            match step.q_new {
                Some(q) => ws.q.push(q),
                None => break,
            }
            if qres <= tau_abs {
                break;
            }
        }

        let y = projected_solution(&ws)?;
        T::update(&mut x, &ws.z[..y.len()], &y)?;
        (r, rnorm) = T::residual(a, b, &x)?;
        gamma = rnorm / beta0;
        if !gamma.is_finite() {
            return Err(Error::Diverged { iteration: its });
        }
        let last = history.last_mut().expect("history is never empty");
        last.true_rel_res = Some(gamma);
        last.restart = true;
        restarts += 1;

        if gamma < best.1 {
            best = (x.clone(), gamma);
            stall = 0;
        } else {
            stall += 1;
        }
    };

    let (x, gamma) = if status == Termination::Converged { (x, gamma) } else { best };
    let (x_hat, x_tilde) = T::finish(x);
    Ok(SolveReport {
        x_hat,
        x_tilde,
        gamma,
        converged: status == Termination::Converged,
        status,
        iterations: its,
        restarts,
        history,
    })
}

/// Restarted GMRES with right preconditioner `M` and `x₀ = M⁻¹b`, all in
/// working precision. The true residual is recomputed at every restart.
pub fn rp_gmres<S, A, M>(a: &A, b: &[S], m: &M, cfg: &SolverConfig) -> Result<SolveReport<S>>
where
    S: Scalar,
    A: LinearOperator<S> + ?Sized,
    M: Preconditioner<S> + ?Sized,
{
    check_problem(a, b, m, cfg)?;
    let n = b.len();
    let bnorm = crate::linalg::norm2(b);
    if !bnorm.is_finite() {
        return Err(Error::Diverged { iteration: 0 });
    }
    if bnorm == 0.0 {
        return Ok(SolveReport::zero(n));
    }

    let mut x = initial_guess(b, m, cfg.init_guess);
    let (mut r, mut beta) = residual(a, b, &x)?;
    let mut rel = beta / bnorm;
    if !rel.is_finite() {
        return Err(Error::Diverged { iteration: 0 });
    }
    let mut history = vec![HistoryRecord {
        it: 0,
        est_rel_res: rel,
        true_rel_res: Some(rel),
        restart: true,
    }];
    let mut best_x = x.clone();
    let mut best_rel = rel;
    let mut its = 0;
    let mut cycles = 0;
    let mut no_progress = 0;

    let status = loop {
        if rel <= cfg.tol {
            break Termination::Converged;
        }
        if its >= cfg.maxit {
            break Termination::MaxIterations;
        }
        if no_progress >= STAGNATION_RESTARTS {
            break Termination::Stagnated;
        }

        let mut ws = KrylovWorkspace::new(&r, beta);
        for _ in 0..cfg.restart {
            if its == cfg.maxit {
                break;
            }
            let z = m.apply_inverse(&ws.q[ws.q.len() - 1]);
            let w = matvec(a, &z)?;
            let ArnoldiStep { h, alpha, q_new } = arnoldi_step(&ws.q, w, cfg.orth);
            ws.z.push(z);
            let g_next = hessenberg_update(&mut ws, &h, alpha);
            its += 1;
            if !(g_next / bnorm).is_finite() {
                return Err(Error::Diverged { iteration: its });
            }
            history.push(HistoryRecord {
                it: its,
                est_rel_res: g_next / bnorm,
                true_rel_res: None,
                restart: false,
            });
            let Some(q) = q_new else { break };
            ws.q.push(q);
            if g_next <= cfg.tol * bnorm {
                break;
            }
        }

        let y = projected_solution(&ws)?;
        axpy_block(&mut x, &ws.z[..y.len()], &y)?;
        (r, beta) = residual(a, b, &x)?;
        rel = beta / bnorm;
        if !rel.is_finite() {
            return Err(Error::Diverged { iteration: its });
        }
        if let Some(last) = history.last_mut() {
            last.true_rel_res = Some(rel);
            last.restart = true;
        }
        cycles += 1;
        if rel < best_rel {
            best_x.clone_from(&x);
            best_rel = rel;
            no_progress = 0;
        } else {
            no_progress += 1;
        }
    };

    if status != Termination::Converged {
        x = best_x;
        rel = best_rel;
    }
    let x_tilde = lift_vec(&x);
    Ok(SolveReport {
        x_hat: x,
        x_tilde,
        gamma: rel,
        converged: status == Termination::Converged,
        status,
        iterations: its,
        restarts: cycles,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CsrMatrix, DenseMatrix};
    use crate::precond::{FactorPrecision, IdentityPreconditioner, LowPrecFactorization};
    use num_complex::Complex64;

    fn poisson(m: usize) -> CsrMatrix<f64> {
        let k = m - 1;
        let h2 = (m * m) as f64;
        let mut t = Vec::new();
        for i in 0..k {
            for j in 0..k {
                let p = i * k + j;
                t.push((p, p, -4.0 * h2));
                if i > 0 {
                    t.push((p, p - k, h2));
                }
                if i + 1 < k {
                    t.push((p, p + k, h2));
                }
                if j > 0 {
                    t.push((p, p - 1, h2));
                }
                if j + 1 < k {
                    t.push((p, p + 1, h2));
                }
            }
        }
        CsrMatrix::from_triplets(k * k, k * k, &t).unwrap()
    }

    #[test]
    fn identity_system() {
        let a = DenseMatrix::<f64>::identity(5);
        let m = LowPrecFactorization::lu(&a, FactorPrecision::Single).unwrap();
        let b = vec![0.1, 0.2, 0.3, 0.4, 0.5];
        let rep = fbsmr(&a, &b, &m, &SolverConfig::default()).unwrap();
        assert!(rep.converged);
        assert!(rep.iterations <= 1);
        assert_eq!(rep.x_hat, b);
        let g = rp_gmres(&a, &b, &m, &SolverConfig::default()).unwrap();
        assert!(g.gamma <= EPS_W * 5.0);
    }

    #[test]
    fn zero_rhs() {
        let a = DenseMatrix::<f64>::identity(3);
        let rep = fbsmr(&a, &[0.0; 3], &IdentityPreconditioner { n: 3 }, &SolverConfig::default()).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.gamma, 0.0);
        assert_eq!(rep.x_hat, vec![0.0; 3]);
    }

    #[test]
    fn poisson_ilu() {
        let a = poisson(8);
        let ones = vec![1.0; a.nrows()];
        let b = crate::linalg::kernels::round_vec::<f64>(&matvec_extended(&a, &ones).unwrap());
        let m = LowPrecFactorization::ilu0(&a, FactorPrecision::Single).unwrap();
        let rep = fbsmr(&a, &b, &m, &SolverConfig::default()).unwrap();
        assert!(rep.converged, "{:?}", rep.status);
        assert!(rep.gamma <= 1e-15);
        for xi in &rep.x_hat {
            assert!((xi - 1.0).abs() <= 1e-13);
        }
        let g = rp_gmres(&a, &b, &m, &SolverConfig::default()).unwrap();
        assert!(g.gamma <= 10.0 * rep.gamma.max(EPS_W));
    }

    #[test]
    fn unstabilized_matches_baseline() {
        let a = poisson(6);
        let b: Vec<f64> = (0..a.nrows()).map(|i| (i as f64 * 0.37).sin()).collect();
        let m = LowPrecFactorization::ilu0(&a, FactorPrecision::Single).unwrap();
        let cfg = SolverConfig {
            stabilized: false,
            ..SolverConfig::default()
        };
        let x = fbsmr(&a, &b, &m, &cfg).unwrap();
        let y = rp_gmres(&a, &b, &m, &cfg).unwrap();
        assert_eq!(x.history, y.history);
        assert_eq!(x.x_hat, y.x_hat);
    }

    #[test]
    fn complex_diagonal() {
        let d: Vec<Complex64> = (1..=6).map(|k| Complex64::new(k as f64, 0.5 * k as f64)).collect();
        let a = DenseMatrix::from_diagonal(&d);
        let b = vec![Complex64::new(1.0, -1.0); 6];
        let rep = fbsmr(&a, &b, &IdentityPreconditioner { n: 6 }, &SolverConfig::default()).unwrap();
        assert!(rep.converged);
        for (xi, di) in rep.x_hat.iter().zip(&d) {
            assert!((xi * di - b[0]).norm() < 1e-14);
        }
    }

    #[test]
    fn maxit_returns_best_iterate() {
        let a = poisson(10);
        let b = vec![1.0; a.nrows()];
        let cfg = SolverConfig {
            restart: 2,
            maxit: 4,
            ..SolverConfig::default()
        };
        let rep = fbsmr(&a, &b, &IdentityPreconditioner { n: a.nrows() }, &cfg).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.status, Termination::MaxIterations);
        assert_eq!(rep.iterations, 4);
        let (_, rn) = residual_extended(&a, &b, &rep.x_tilde).unwrap();
        assert_eq!(rn / crate::linalg::norm2(&b), rep.gamma);
    }

    #[test]
    fn config_validation() {
        let bad = SolverConfig {
            tol: 0.0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            restart: 600,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn history_marks_restarts() {
        let a = poisson(10);
        let b = vec![1.0; a.nrows()];
        let cfg = SolverConfig {
            restart: 5,
            ..SolverConfig::default()
        };
        let rep = fbsmr(&a, &b, &IdentityPreconditioner { n: a.nrows() }, &cfg).unwrap();
        assert!(rep.history.windows(2).all(|w| w[0].it < w[1].it));
        for h in &rep.history {
            assert_eq!(h.restart, h.true_rel_res.is_some());
        }
        assert_eq!(rep.history.iter().filter(|h| h.restart).count(), rep.restarts + 1);
    }
}
