//! Reproducible test problems.
//!
//! Random draws use `rand_chacha::ChaCha8Rng` seeded through
//! `SeedableRng::seed_from_u64` and `rand_distr::StandardNormal`, so a seed
//! produces the same matrix on every platform.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::kernels::{matvec_extended, round_vec};
use crate::linalg::{mtx, CsrMatrix, DenseMatrix, LinearOperator, Matrix};
use crate::scalar::Scalar;

/// Name of the generator behind every seeded draw.
pub const RNG_NAME: &str = "ChaCha8Rng/seed_from_u64";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandsvdSpec {
    pub n: usize,
    /// Decades of conditioning: `κ(A) = 10^alpha`.
    pub alpha: f64,
    /// Spectrum shape exponent.
    pub r: f64,
    pub seed: u64,
}

impl RandsvdSpec {
    pub fn new(n: usize, alpha: f64, seed: u64) -> Self {
        Self { n, alpha, r: 1.0, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || !(self.alpha >= 0.0) || !(self.r > 0.0) || !self.alpha.is_finite() || !self.r.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "randsvd needs n >= 2, alpha >= 0, r > 0; got n={} alpha={} r={}",
                self.n, self.alpha, self.r
            )));
        }
        Ok(())
    }

    /// `σ_i = 10^(-α ((i-1)/(n-1))^r)`, `i = 1..n`.
    pub fn singular_values(&self) -> Vec<f64> {
        let d = (self.n - 1) as f64;
        (0..self.n)
            .map(|i| 10f64.powf(-self.alpha * (i as f64 / d).powf(self.r)))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct Randsvd {
    pub a: DenseMatrix<f64>,
    pub sigma: Vec<f64>,
    pub u: DenseMatrix<f64>,
    pub v: DenseMatrix<f64>,
}

/// `A = U diag(σ) Vᵀ` with Haar-distributed orthogonal `U`, `V`.
pub fn randsvd(spec: &RandsvdSpec) -> Result<Randsvd> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let u = haar_orthogonal(n, &mut rng);
    let v = haar_orthogonal(n, &mut rng);
    let sigma = spec.singular_values();
    let us = DenseMatrix::from_fn(n, n, |i, j| u.get(i, j) * sigma[j]);
    let a = us.matmul(&v.transpose())?;
    Ok(Randsvd { a, sigma, u, v })
}

/// Orthogonal factor of a Householder QR of a standard Gaussian matrix, with
/// columns signed so that `diag(R) > 0`.
pub fn haar_orthogonal(n: usize, rng: &mut impl Rng) -> DenseMatrix<f64> {
    // Column-major working copy.
    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    let mut reflectors: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n);
    let mut rdiag = vec![0.0; n];
    for k in 0..n {
        let x = &cols[k][k..];
        let norm = x.iter().fold(0.0f64, |acc, &t| acc.hypot(t));
        let alpha = if x[0] >= 0.0 { -norm } else { norm };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        let tau = if vnorm2 > 0.0 { 2.0 / vnorm2 } else { 0.0 };
        for col in cols.iter_mut().skip(k) {
            let s: f64 = v.iter().zip(&col[k..]).map(|(a, b)| a * b).sum();
            for (ci, vi) in col[k..].iter_mut().zip(&v) {
                *ci -= tau * s * vi;
            }
        }
        rdiag[k] = cols[k][k];
        reflectors.push((v, tau));
    }
    let mut q: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for (k, (v, tau)) in reflectors.iter().enumerate().rev() {
        for col in q.iter_mut() {
            let s: f64 = v.iter().zip(&col[k..]).map(|(a, b)| a * b).sum();
            for (ci, vi) in col[k..].iter_mut().zip(v) {
                *ci -= tau * s * vi;
            }
        }
    }
    DenseMatrix::from_fn(n, n, |i, j| if rdiag[j] < 0.0 { -q[j][i] } else { q[j][i] })
}

/// Rows of a randsvd matrix scaled by `10^(-decades (i-1)/(n-1))`.
///
/// `κ(A)` grows by up to `10^decades` while the componentwise conditioning
/// stays that of the unscaled matrix, so a binary32 LU remains an effective
/// preconditioner.
pub fn graded_randsvd(spec: &RandsvdSpec, decades: f64) -> Result<DenseMatrix<f64>> {
    if !(decades >= 0.0) || !decades.is_finite() {
        return Err(Error::InvalidConfig(format!("grading needs decades >= 0, got {decades}")));
    }
    let base = randsvd(spec)?.a;
    let d = (spec.n - 1) as f64;
    Ok(DenseMatrix::from_fn(spec.n, spec.n, |i, j| {
        base.get(i, j) * 10f64.powf(-decades * i as f64 / d)
    }))
}

/// 5-point Laplacian on the `(m-1)²` interior nodes of the unit square with
/// `h = 1/m`: `-4h⁻²` on the diagonal, `h⁻²` for each neighbour.
pub fn poisson2d(m: usize) -> Result<CsrMatrix<f64>> {
    if m < 2 {
        return Err(Error::InvalidConfig(format!("poisson2d needs m >= 2, got {m}")));
    }
    let k = m - 1;
    let h2inv = (m as f64) * (m as f64);
    let mut t = Vec::with_capacity(5 * k * k);
    for i in 0..k {
        for j in 0..k {
            let p = i * k + j;
            if i > 0 {
                t.push((p, p - k, h2inv));
            }
            if j > 0 {
                t.push((p, p - 1, h2inv));
            }
            t.push((p, p, -4.0 * h2inv));
            if j + 1 < k {
                t.push((p, p + 1, h2inv));
            }
            if i + 1 < k {
                t.push((p, p + k, h2inv));
            }
        }
    }
    CsrMatrix::from_triplets(k * k, k * k, &t)
}

/// Independent standard normal entries.
pub fn random_rhs(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn ones_rhs(n: usize) -> Vec<f64> {
    vec![1.0; n]
}

/// `b = A x*` evaluated in extended precision and rounded once.
pub fn manufactured_rhs<S: Scalar, A: LinearOperator<S> + ?Sized>(a: &A, x_star: &[S]) -> Result<Vec<S>> {
    Ok(round_vec::<S>(&matvec_extended(a, x_star)?))
}

/// Provenance written next to a generated problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemMetadata {
    pub kind: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub randsvd: Option<RandsvdSpec>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grid: Option<usize>,
    pub rhs: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rhs_seed: Option<u64>,
    pub rng: String,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub sigma: Vec<f64>,
}

/// Paths produced by [`write_problem`].
#[derive(Clone, Debug)]
pub struct ProblemFiles {
    pub matrix: PathBuf,
    pub rhs: PathBuf,
    pub metadata: PathBuf,
}

/// Writes `<stem>.mtx`, `<stem>_b.mtx` and `<stem>.json` into `dir`.
pub fn write_problem(
    dir: impl AsRef<Path>,
    stem: &str,
    a: &Matrix<f64>,
    b: &[f64],
    meta: &ProblemMetadata,
) -> Result<ProblemFiles> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let files = ProblemFiles {
        matrix: dir.join(format!("{stem}.mtx")),
        rhs: dir.join(format!("{stem}_b.mtx")),
        metadata: dir.join(format!("{stem}.json")),
    };
    mtx::write_matrix_file(&files.matrix, a)?;
    mtx::write_vector_file(&files.rhs, b)?;
    std::fs::write(&files.metadata, serde_json::to_string_pretty(meta)?)?;
    Ok(files)
}

pub fn read_metadata(path: impl AsRef<Path>) -> Result<ProblemMetadata> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}
