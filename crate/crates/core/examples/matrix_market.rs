//! Problems on disk: generate, write MatrixMarket files plus JSON metadata,
//! read them back and solve.
//!
//! `cargo run --example matrix_market [matrix.mtx rhs.mtx]`

use fbsmr::linalg::{mtx, Matrix};
use fbsmr::precond::{FactorKind, FactorPrecision, LowPrecFactorization};
use fbsmr::probgen::{manufactured_rhs, ones_rhs, poisson2d, read_metadata, write_problem, ProblemMetadata, RNG_NAME};
use fbsmr::solver::{fbsmr, SolverConfig};

fn main() -> fbsmr::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let dir = std::env::temp_dir().join("fbsmr-matrix-market");
    std::fs::create_dir_all(&dir)?;
    let (mpath, bpath) = if let [m, b] = args.as_slice() {
        (m.into(), b.into())
    } else {
        let a = Matrix::Csr(poisson2d(20)?);
        let b = manufactured_rhs(&a, &ones_rhs(a.ncols()))?;
        let meta = ProblemMetadata {
            kind: "poisson2d".into(),
            n: a.nrows(),
            randsvd: None,
            grid: Some(20),
            rhs: "manufactured-ones".into(),
            rhs_seed: None,
            rng: RNG_NAME.into(),
            sigma: Vec::new(),
        };
        let files = write_problem(&dir, "poisson20", &a, &b, &meta)?;
        println!("wrote {}", files.matrix.display());
        println!("metadata: {:?}", read_metadata(&files.metadata)?.kind);
        (files.matrix, files.rhs)
    };

    let header = mtx::read_header(&mpath)?;
    println!("header: {:?} {:?} {:?}", header.format, header.field, header.symmetry);
    let a: Matrix<f64> = mtx::read_matrix_file(&mpath)?;
    let b: Vec<f64> = mtx::read_vector_file(&bpath)?;
    let kind = if a.is_sparse() { FactorKind::Ilu0 } else { FactorKind::Lu };
    let m = LowPrecFactorization::factor(&a, kind, FactorPrecision::Single)?;
    let rep = fbsmr(&a, &b, &m, &SolverConfig::default())?;
    println!("{kind:?}: {:?} after {} iterations, gamma {:.2e}", rep.status, rep.iterations, rep.gamma);

    let out = dir.join("solution.mtx");
    mtx::write_vector_file(&out, &rep.x_hat)?;
    println!("solution written to {}", out.display());
    Ok(())
}
