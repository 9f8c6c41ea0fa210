use crate::error::{Error, Result};
use crate::linalg::kernels::{dot, norm2};
use crate::linalg::DenseMatrix;
use crate::ddouble::EPS_W;
use crate::scalar::Scalar;

pub const DEFAULT_DENSE_LIMIT: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvdOptions {
    /// Relative orthogonality threshold for a column pair.
    pub tol: f64,
    pub max_sweeps: usize,
    pub dense_limit: usize,
}

impl Default for SvdOptions {
    fn default() -> Self {
        Self {
            tol: 10.0 * EPS_W,
            max_sweeps: 30,
            dense_limit: DEFAULT_DENSE_LIMIT,
        }
    }
}

/// `A = U diag(σ) Vᴴ` with `σ` nonincreasing.
#[derive(Clone, Debug)]
pub struct SvdResult<S> {
    pub u: DenseMatrix<S>,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix<S>,
    pub sweeps: usize,
}

impl<S: Scalar> SvdResult<S> {
    pub fn condition_number(&self) -> f64 {
        self.sigma[0] / self.sigma[self.sigma.len() - 1]
    }
}

pub fn svd_jacobi<S: Scalar>(a: &DenseMatrix<S>) -> Result<SvdResult<S>> {
    svd_jacobi_with(a, &SvdOptions::default())
}

/// One-sided (Hestenes) Jacobi SVD of an `m × n` matrix with `m >= n`.
///
/// The matrix is first reduced by a column-pivoted Householder QR,
/// `A P = Q R`, and the Jacobi iteration runs on `Rᴴ`, whose graded columns
/// converge in a handful of sweeps even when `κ(A)` is large.
///
/// A column pair is rotated when `|w_pᴴ w_q| > tol · √n · ‖w_p‖ ‖w_q‖`
/// (the `√n` absorbs rounding noise in the inner product); the iteration
/// stops after a sweep with no rotations.
pub fn svd_jacobi_with<S: Scalar>(a: &DenseMatrix<S>, opts: &SvdOptions) -> Result<SvdResult<S>> {
    let (m, n) = (a.nrows(), a.ncols());
    if m.max(n) > opts.dense_limit {
        return Err(Error::DenseLimit {
            n: m.max(n),
            limit: opts.dense_limit,
        });
    }
    if m < n {
        return Err(Error::InvalidConfig(format!("svd_jacobi needs rows >= cols, got {m}x{n}")));
    }
    let qr = pivoted_qr(a);
    // Columns of X = Rᴴ are the conjugated rows of R.
    let mut x: Vec<Vec<S>> = (0..n)
        .map(|i| (0..n).map(|j| if j >= i { qr.r[j][i].conj() } else { S::zero() }).collect())
        .collect();
    let mut w = identity_columns::<S>(n);
    let sweeps = jacobi_sweeps(&mut x, &mut w, opts.tol * (n as f64).sqrt(), opts.max_sweeps)?;

    // A P = Q W Σ (Y Σ⁻¹)ᴴ with Y = X W.
    let mut order: Vec<(f64, usize)> = x.iter().enumerate().map(|(j, col)| (norm2(col), j)).collect();
    order.sort_by(|p, q| q.0.total_cmp(&p.0));
    let sigma: Vec<f64> = order.iter().map(|&(s, _)| s).collect();
    let u = DenseMatrix::from_fn(m, n, |i, k| {
        let wj = &w[order[k].1];
        let mut acc = S::zero();
        for (l, &wl) in wj.iter().enumerate() {
            acc += qr.q[l][i] * wl;
        }
        acc
    });
    let mut v = DenseMatrix::zeros(n, n);
    for (k, &(s, j)) in order.iter().enumerate() {
        if s == 0.0 {
            continue;
        }
        for (row, &y) in x[j].iter().enumerate() {
            v.set(qr.perm[row], k, y.scale(1.0 / s));
        }
    }
    Ok(SvdResult { u, sigma, v, sweeps })
}

struct PivotedQr<S> {
    /// First `n` columns of `Q`.
    q: Vec<Vec<S>>,
    /// Columns of `R`; `r[j][i]` for `i <= j`.
    r: Vec<Vec<S>>,
    /// `(A P)[:, k] = A[:, perm[k]]`.
    perm: Vec<usize>,
}

fn pivoted_qr<S: Scalar>(a: &DenseMatrix<S>) -> PivotedQr<S> {
    let (m, n) = (a.nrows(), a.ncols());
    let mut cols: Vec<Vec<S>> = (0..n).map(|j| a.column(j)).collect();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut reflectors: Vec<(Vec<S>, S)> = Vec::with_capacity(n);
    for k in 0..n {
        let (piv, _) = (k..n)
            .map(|j| (j, norm2(&cols[j][k..])))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        cols.swap(k, piv);
        perm.swap(k, piv);
        let xk = &cols[k][k..];
        let alpha = -xk[0].sign().scale(norm2(xk));
        let mut v = xk.to_vec();
        v[0] -= alpha;
        let vn = norm2(&v);
        // H = I - v vᴴ / h with h = ‖v‖²/2
        let h = S::from_real(if vn > 0.0 { vn * vn / 2.0 } else { 1.0 });
        for col in cols.iter_mut().skip(k) {
            let s = dot(&v, &col[k..]) / h;
            for (ci, &vi) in col[k..].iter_mut().zip(&v) {
                *ci -= s * vi;
            }
        }
        reflectors.push((v, h));
    }
    let r: Vec<Vec<S>> = cols.iter().enumerate().map(|(j, c)| c[..=j].to_vec()).collect();
    let mut q: Vec<Vec<S>> = (0..n)
        .map(|j| (0..m).map(|i| if i == j { S::one() } else { S::zero() }).collect())
        .collect();
    for (k, (v, h)) in reflectors.iter().enumerate().rev() {
        for col in q.iter_mut() {
            let s = dot(v, &col[k..]) / *h;
            for (ci, &vi) in col[k..].iter_mut().zip(v) {
                *ci -= s * vi;
            }
        }
    }
    PivotedQr { q, r, perm }
}

fn identity_columns<S: Scalar>(n: usize) -> Vec<Vec<S>> {
    (0..n)
        .map(|j| (0..n).map(|i| if i == j { S::one() } else { S::zero() }).collect())
        .collect()
}

/// Cyclic one-sided Jacobi on the columns of `w`, accumulating the same
/// rotations into `acc`. Returns the number of sweeps.
fn jacobi_sweeps<S: Scalar>(w: &mut [Vec<S>], acc: &mut [Vec<S>], threshold: f64, max_sweeps: usize) -> Result<usize> {
    let n = w.len();
    let mut sweeps = 0;
    loop {
        if sweeps == max_sweeps {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let np = norm2(&w[p]);
                let nq = norm2(&w[q]);
                if np == 0.0 || nq == 0.0 {
                    continue;
                }
                let g = dot(&w[p], &w[q]);
                let gabs = g.abs();
                if gabs <= threshold * np * nq {
                    continue;
                }
                rotated = true;
                // Phase so that the pair's Gram entry becomes real positive.
                let phase = g.scale(1.0 / gabs).conj();
                let zeta = (nq - np) * (nq + np) / (2.0 * gabs);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                rotate(w, p, q, phase, c, s);
                rotate(acc, p, q, phase, c, s);
            }
        }
        if !rotated {
            return Ok(sweeps);
        }
    }
}

/// `[x_p, x_q e^{-iφ}] ← [x_p, x_q'] [c, s; -s, c]`.
fn rotate<S: Scalar>(cols: &mut [Vec<S>], p: usize, q: usize, phase: S, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let (xp, xq) = (&mut head[p], &mut tail[0]);
    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
        let bq = *b * phase;
        let ap = *a;
        *a = ap.scale(c) - bq.scale(s);
        *b = ap.scale(s) + bq.scale(c);
    }
}
