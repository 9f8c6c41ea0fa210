//! Command-line experiments: problem generation, single solves with a
//! convergence history, the randsvd forward/backward error grid and
//! side-by-side comparisons.
//!
//! Every CSV starts with `# key=value` lines recording the tool version and
//! the parameters of the run, followed by a header row.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{direct_solve_extended, forward_error};
use crate::ddouble::EPS_W;
use crate::error::{Error, Result};
use crate::linalg::kernels::{lift_vec, norm2, residual_extended};
use crate::linalg::mtx::{self, MtxField};
use crate::linalg::Matrix;
use crate::precond::{FactorKind, FactorPrecision, IdentityPreconditioner, LowPrecFactorization, Preconditioner};
use crate::probgen::{self, ProblemFiles, ProblemMetadata, RandsvdSpec};
use crate::scalar::Scalar;
use crate::solver::{fbsmr, rp_gmres, HistoryRecord, InitialGuess, Orthogonalization, SolveReport, SolverConfig};

/// Environment variable holding the worker-thread count for the kernels.
pub const THREADS_ENV: &str = "FBSMR_NUM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "fbsmr", version, about = "Mixed-precision minimal residual solver experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a test problem as MatrixMarket files plus JSON metadata.
    Gen(GenArgs),
    /// Solve a MatrixMarket system and write the convergence history.
    Solve(SolveArgs),
    /// Run the randsvd forward/backward error grid for both methods.
    Table1(Table1Args),
    /// Run two solves that differ in one setting and merge their histories.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(subcommand)]
    pub problem: GenProblem,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// File stem; defaults to a name derived from the parameters.
    #[arg(long, global = true)]
    pub name: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum GenProblem {
    /// Dense matrix with singular values 10^(-alpha ((i-1)/(n-1))^r).
    Randsvd {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 10.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Rows additionally scaled across this many decades.
        #[arg(long)]
        graded: Option<f64>,
        #[arg(long, value_enum, default_value_t = RhsKind::Random)]
        rhs: RhsKind,
        /// Seed of a random right-hand side (default: seed + 1).
        #[arg(long)]
        rhs_seed: Option<u64>,
    },
    /// 5-point Laplacian on an m x m grid of the unit square.
    Poisson {
        #[arg(long, default_value_t = 8)]
        m: usize,
        #[arg(long, value_enum, default_value_t = RhsKind::Manufactured)]
        rhs: RhsKind,
        #[arg(long, default_value_t = 1)]
        rhs_seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhsKind {
    /// Standard normal entries.
    Random,
    /// All ones.
    Ones,
    /// `A · ones` in extended precision.
    Manufactured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Fbsmr,
    RpGmres,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Fbsmr => "fbsmr",
            Method::RpGmres => "rp-gmres",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrecondChoice {
    Lu,
    Chol,
    Ilu0,
    None,
}

impl PrecondChoice {
    pub fn name(self) -> &'static str {
        match self {
            PrecondChoice::Lu => "lu",
            PrecondChoice::Chol => "chol",
            PrecondChoice::Ilu0 => "ilu0",
            PrecondChoice::None => "none",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PrecisionChoice {
    Single,
    Double,
}

impl From<PrecisionChoice> for FactorPrecision {
    fn from(p: PrecisionChoice) -> Self {
        match p {
            PrecisionChoice::Single => FactorPrecision::Single,
            PrecisionChoice::Double => FactorPrecision::Double,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OrthChoice {
    Mgs,
    Cgs,
}

impl From<OrthChoice> for Orthogonalization {
    fn from(o: OrthChoice) -> Self {
        match o {
            OrthChoice::Mgs => Orthogonalization::Mgs,
            OrthChoice::Cgs => Orthogonalization::Cgs,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum X0Choice {
    /// `x₀ = M⁻¹ b`.
    Precond,
    Zero,
}

impl From<X0Choice> for InitialGuess {
    fn from(x: X0Choice) -> Self {
        match x {
            X0Choice::Precond => InitialGuess::PrecondRhs,
            X0Choice::Zero => InitialGuess::Zero,
        }
    }
}

/// Solver and preconditioner flags shared by `solve` and `compare`.
#[derive(Clone, Debug, Args)]
pub struct SolverFlags {
    #[arg(long, value_enum, default_value_t = PrecondChoice::Lu)]
    pub precond: PrecondChoice,
    /// Storage precision of the factorization.
    #[arg(long, value_enum, default_value_t = PrecisionChoice::Single)]
    pub factor_precision: PrecisionChoice,
    /// Relative residual tolerance (default 10 ε_w).
    #[arg(long, default_value_t = 10.0 * EPS_W)]
    pub tol: f64,
    #[arg(long, default_value_t = 30)]
    pub restart: usize,
    #[arg(long, default_value_t = 500)]
    pub maxit: usize,
    #[arg(long, value_enum, default_value_t = OrthChoice::Mgs)]
    pub orth: OrthChoice,
    #[arg(long, value_enum, default_value_t = X0Choice::Precond)]
    pub x0: X0Choice,
}

impl SolverFlags {
    pub fn config(&self, method: Method) -> SolverConfig {
        SolverConfig {
            tol: self.tol,
            restart: self.restart,
            maxit: self.maxit,
            orth: self.orth.into(),
            init_guess: self.x0.into(),
            stabilized: method == Method::Fbsmr,
        }
    }

    fn metadata(&self) -> Vec<(String, String)> {
        vec![
            ("precond".into(), self.precond.name().into()),
            ("factor_precision".into(), format!("{:?}", self.factor_precision).to_lowercase()),
            ("tol".into(), format!("{:e}", self.tol)),
            ("restart".into(), self.restart.to_string()),
            ("maxit".into(), self.maxit.to_string()),
            ("orth".into(), format!("{:?}", self.orth).to_lowercase()),
            ("x0".into(), format!("{:?}", self.x0).to_lowercase()),
        ]
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub matrix: PathBuf,
    pub rhs: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Fbsmr)]
    pub method: Method,
    #[command(flatten)]
    pub flags: SolverFlags,
    /// History CSV destination (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the summary record as JSON.
    #[arg(long)]
    pub record: Option<PathBuf>,
    /// Write the working-precision solution as a MatrixMarket vector.
    #[arg(long)]
    pub solution: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    #[arg(long, value_delimiter = ',', default_values_t = vec![100, 200])]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![10.0, 12.0, 14.0])]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-15)]
    pub tol: f64,
    #[arg(long, default_value_t = 30)]
    pub restart: usize,
    #[arg(long, default_value_t = 500)]
    pub maxit: usize,
    /// Storage precision of the LU factorization.
    #[arg(long, value_enum, default_value_t = PrecisionChoice::Double)]
    pub factor_precision: PrecisionChoice,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    /// `x₀ = M⁻¹b` versus `x₀ = 0`.
    Initguess,
    /// MGS versus CGS.
    Orth,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub matrix: PathBuf,
    pub rhs: PathBuf,
    #[arg(long, value_enum)]
    pub axis: Axis,
    #[arg(long, value_enum, default_value_t = Method::Fbsmr)]
    pub method: Method,
    #[command(flatten)]
    pub flags: SolverFlags,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// One solve, in the layout of the error tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub case_id: String,
    pub n: usize,
    pub method: Method,
    pub precond: PrecondChoice,
    pub forward_error: Option<f64>,
    pub backward_error: f64,
    pub converged: bool,
    pub iterations: usize,
    pub restarts: usize,
    pub wall_time_s: f64,
}

/// Builds `M` for `a`; `None` gives the identity.
pub fn build_preconditioner<S: Scalar>(
    a: &Matrix<S>,
    choice: PrecondChoice,
    precision: FactorPrecision,
) -> Result<Box<dyn Preconditioner<S>>> {
    let kind = match choice {
        PrecondChoice::Lu => FactorKind::Lu,
        PrecondChoice::Chol => FactorKind::Cholesky,
        PrecondChoice::Ilu0 => FactorKind::Ilu0,
        PrecondChoice::None => return Ok(Box::new(IdentityPreconditioner { n: a.nrows() })),
    };
    Ok(Box::new(LowPrecFactorization::factor(a, kind, precision)?))
}

pub fn run_method<S: Scalar>(
    method: Method,
    a: &Matrix<S>,
    b: &[S],
    m: &dyn Preconditioner<S>,
    cfg: &SolverConfig,
) -> Result<SolveReport<S>> {
    match method {
        Method::Fbsmr => fbsmr(a, b, m, cfg),
        Method::RpGmres => rp_gmres(a, b, m, cfg),
    }
}

/// Writes `# key=value` lines.
pub fn write_metadata(out: &mut impl Write, meta: &[(String, String)]) -> Result<()> {
    writeln!(out, "# tool=fbsmr {}", env!("CARGO_PKG_VERSION"))?;
    for (k, v) in meta {
        writeln!(out, "# {k}={v}")?;
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6e}")).unwrap_or_default()
}

/// History CSV: `it,est_rel_res,true_rel_res,restart_flag`; the true
/// residual is blank between restarts.
pub fn write_history_csv(out: impl Write, meta: &[(String, String)], history: &[HistoryRecord]) -> Result<()> {
    let mut out = out;
    write_metadata(&mut out, meta)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["it", "est_rel_res", "true_rel_res", "restart_flag"])?;
    for h in history {
        w.write_record([
            h.it.to_string(),
            format!("{:.6e}", h.est_rel_res),
            fmt_opt(h.true_rel_res),
            u8::from(h.restart).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a history CSV back, skipping `#` lines.
pub fn read_history_csv(input: impl std::io::Read) -> Result<Vec<HistoryRecord>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("").trim().to_string();
        let num = |s: String| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|e| Error::InvalidConfig(format!("bad number '{s}' in history: {e}")))
        };
        let it = field(0)
            .parse::<usize>()
            .map_err(|e| Error::InvalidConfig(format!("bad iteration index: {e}")))?;
        let t = field(2);
        out.push(HistoryRecord {
            it,
            est_rel_res: num(field(1))?,
            true_rel_res: if t.is_empty() { None } else { Some(num(t)?) },
            restart: field(3) == "1",
        });
    }
    Ok(out)
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Gen(args) => {
            let files = cmd_gen(&args)?;
            eprintln!(
                "wrote {} {} {}",
                files.matrix.display(),
                files.rhs.display(),
                files.metadata.display()
            );
            Ok(0)
        }
        Command::Solve(args) => {
            let rec = cmd_solve(&args)?;
            eprintln!(
                "{} n={} converged={} gamma={:.3e} iterations={} restarts={}",
                rec.method.name(),
                rec.n,
                rec.converged,
                rec.backward_error,
                rec.iterations,
                rec.restarts
            );
            Ok(if rec.converged { 0 } else { 1 })
        }
        Command::Table1(args) => {
            let rows = cmd_table1(&args)?;
            Ok(if rows.iter().all(|r| r.fbsmr_converged) { 0 } else { 1 })
        }
        Command::Compare(args) => {
            let res = cmd_compare(&args)?;
            for v in &res.variants {
                eprintln!(
                    "{}: converged={} gamma={:.3e} iterations={} restarts={}",
                    v.label, v.report_converged, v.gamma, v.iterations, v.restarts
                );
            }
            Ok(if res.variants.iter().all(|v| v.report_converged) { 0 } else { 1 })
        }
    }
}

pub fn cmd_gen(args: &GenArgs) -> Result<ProblemFiles> {
    match &args.problem {
        GenProblem::Randsvd {
            n,
            alpha,
            r,
            seed,
            graded,
            rhs,
            rhs_seed,
        } => {
            let spec = RandsvdSpec {
                n: *n,
                alpha: *alpha,
                r: *r,
                seed: *seed,
            };
            let a = match graded {
                Some(d) => probgen::graded_randsvd(&spec, *d)?,
                None => probgen::randsvd(&spec)?.a,
            };
            let rhs_seed = rhs_seed.unwrap_or(seed.wrapping_add(1));
            let b = make_rhs(&a, *rhs, rhs_seed)?;
            let meta = ProblemMetadata {
                kind: if graded.is_some() { "graded-randsvd" } else { "randsvd" }.into(),
                n: *n,
                randsvd: Some(spec),
                grid: None,
                rhs: rhs_name(*rhs).into(),
                rhs_seed: (*rhs == RhsKind::Random).then_some(rhs_seed),
                rng: probgen::RNG_NAME.into(),
                sigma: spec.singular_values(),
            };
            let stem = args
                .name
                .clone()
                .unwrap_or_else(|| format!("randsvd_n{n}_a{alpha}_r{r}_s{seed}"));
            probgen::write_problem(&args.out_dir, &stem, &Matrix::Dense(a), &b, &meta)
        }
        GenProblem::Poisson { m, rhs, rhs_seed } => {
            let a = probgen::poisson2d(*m)?;
            let b = make_rhs(&a, *rhs, *rhs_seed)?;
            let meta = ProblemMetadata {
                kind: "poisson2d".into(),
                n: a.nrows(),
                randsvd: None,
                grid: Some(*m),
                rhs: rhs_name(*rhs).into(),
                rhs_seed: (*rhs == RhsKind::Random).then_some(*rhs_seed),
                rng: probgen::RNG_NAME.into(),
                sigma: Vec::new(),
            };
            let stem = args.name.clone().unwrap_or_else(|| format!("poisson_m{m}"));
            probgen::write_problem(&args.out_dir, &stem, &Matrix::Csr(a), &b, &meta)
        }
    }
}

fn rhs_name(kind: RhsKind) -> &'static str {
    match kind {
        RhsKind::Random => "random",
        RhsKind::Ones => "ones",
        RhsKind::Manufactured => "manufactured-ones",
    }
}

fn make_rhs<A: crate::linalg::LinearOperator<f64>>(a: &A, kind: RhsKind, seed: u64) -> Result<Vec<f64>> {
    Ok(match kind {
        RhsKind::Random => probgen::random_rhs(a.nrows(), seed),
        RhsKind::Ones => probgen::ones_rhs(a.nrows()),
        RhsKind::Manufactured => probgen::manufactured_rhs(a, &probgen::ones_rhs(a.ncols()))?,
    })
}

fn is_complex(path: &Path) -> Result<bool> {
    Ok(mtx::read_header(path)?.field == MtxField::Complex)
}

pub fn cmd_solve(args: &SolveArgs) -> Result<ExperimentRecord> {
    if is_complex(&args.matrix)? || is_complex(&args.rhs)? {
        solve_typed::<Complex64>(args)
    } else {
        solve_typed::<f64>(args)
    }
}

fn solve_typed<S: Scalar>(args: &SolveArgs) -> Result<ExperimentRecord> {
    let a: Matrix<S> = mtx::read_matrix_file(&args.matrix)?;
    let b: Vec<S> = mtx::read_vector_file(&args.rhs)?;
    let m = build_preconditioner(&a, args.flags.precond, args.flags.factor_precision.into())?;
    let cfg = args.flags.config(args.method);
    let start = Instant::now();
    let rep = run_method(args.method, &a, &b, m.as_ref(), &cfg)?;
    let wall = start.elapsed().as_secs_f64();

    let mut meta = vec![
        ("command".to_string(), "solve".to_string()),
        ("matrix".into(), args.matrix.display().to_string()),
        ("rhs".into(), args.rhs.display().to_string()),
        ("n".into(), a.nrows().to_string()),
        ("method".into(), args.method.name().into()),
    ];
    meta.extend(args.flags.metadata());
    meta.push(("gamma".into(), format!("{:.6e}", rep.gamma)));
    meta.push(("converged".into(), rep.converged.to_string()));
    write_history_csv(output(&args.out)?, &meta, &rep.history)?;

    if let Some(p) = &args.solution {
        mtx::write_vector_file(p, &rep.x_hat)?;
    }
    let rec = ExperimentRecord {
        case_id: args
            .matrix
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        n: a.nrows(),
        method: args.method,
        precond: args.flags.precond,
        forward_error: None,
        backward_error: rep.gamma,
        converged: rep.converged,
        iterations: rep.iterations,
        restarts: rep.restarts,
        wall_time_s: wall,
    };
    if let Some(p) = &args.record {
        std::fs::write(p, serde_json::to_string_pretty(&rec)?)?;
    }
    Ok(rec)
}

/// One randsvd case of the error grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub n: usize,
    pub alpha: f64,
    pub rp_forward: f64,
    pub rp_backward: f64,
    pub fbsmr_forward_hat: f64,
    pub fbsmr_forward_tilde: f64,
    pub fbsmr_backward: f64,
    pub rp_iterations: usize,
    pub fbsmr_iterations: usize,
    pub fbsmr_converged: bool,
}

/// Relative backward error `‖b - A x‖ / ‖b‖` evaluated in extended precision.
pub fn backward_error_extended<S: Scalar>(a: &Matrix<S>, b: &[S], x: &[S::Ext]) -> Result<f64> {
    let (_, rn) = residual_extended(a, b, x)?;
    Ok(rn / norm2(b))
}

/// Runs one grid case: both solvers on the same randsvd matrix and random
/// right-hand side, with errors measured against the extended direct solve.
pub fn table1_case(
    spec: &RandsvdSpec,
    rhs_seed: u64,
    cfg: &SolverConfig,
    precision: FactorPrecision,
) -> Result<Table1Row> {
    let a = probgen::randsvd(spec)?.a;
    let b = probgen::random_rhs(spec.n, rhs_seed);
    let oracle = direct_solve_extended(&a, &b)?;
    let m = LowPrecFactorization::lu(&a, precision)?;
    let am = Matrix::Dense(a);
    let f = fbsmr(&am, &b, &m, &SolverConfig { stabilized: true, ..*cfg })?;
    let g = rp_gmres(&am, &b, &m, cfg)?;
    Ok(Table1Row {
        n: spec.n,
        alpha: spec.alpha,
        rp_forward: forward_error::<f64>(&lift_vec(&g.x_hat), &oracle),
        rp_backward: backward_error_extended(&am, &b, &lift_vec(&g.x_hat))?,
        fbsmr_forward_hat: forward_error::<f64>(&lift_vec(&f.x_hat), &oracle),
        fbsmr_forward_tilde: forward_error::<f64>(&f.x_tilde, &oracle),
        fbsmr_backward: f.gamma,
        rp_iterations: g.iterations,
        fbsmr_iterations: f.iterations,
        fbsmr_converged: f.converged,
    })
}

pub fn cmd_table1(args: &Table1Args) -> Result<Vec<Table1Row>> {
    let cfg = SolverConfig {
        tol: args.tol,
        restart: args.restart,
        maxit: args.maxit,
        ..SolverConfig::default()
    };
    cfg.validate()?;
    let mut rows = Vec::new();
    for &n in &args.n {
        for &alpha in &args.alpha {
            let spec = RandsvdSpec {
                n,
                alpha,
                r: args.r,
                seed: args.seed,
            };
            rows.push(table1_case(&spec, args.seed.wrapping_add(1), &cfg, args.factor_precision.into())?);
        }
    }
    let meta = vec![
        ("command".to_string(), "table1".to_string()),
        ("seed".into(), args.seed.to_string()),
        ("rhs_seed".into(), args.seed.wrapping_add(1).to_string()),
        ("rng".into(), probgen::RNG_NAME.into()),
        ("r".into(), args.r.to_string()),
        ("tol".into(), format!("{:e}", args.tol)),
        ("restart".into(), args.restart.to_string()),
        ("maxit".into(), args.maxit.to_string()),
        ("factor_precision".into(), format!("{:?}", args.factor_precision).to_lowercase()),
    ];
    write_table1_csv(output(&args.out)?, &meta, &rows)?;
    Ok(rows)
}

pub fn write_table1_csv(out: impl Write, meta: &[(String, String)], rows: &[Table1Row]) -> Result<()> {
    let mut out = out;
    write_metadata(&mut out, meta)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "alpha",
        "rp_gmres_forward",
        "rp_gmres_backward",
        "fbsmr_forward_xhat",
        "fbsmr_forward_xtilde",
        "fbsmr_backward",
        "rp_gmres_iterations",
        "fbsmr_iterations",
    ])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.alpha.to_string(),
            format!("{:.3e}", r.rp_forward),
            format!("{:.3e}", r.rp_backward),
            format!("{:.3e}", r.fbsmr_forward_hat),
            format!("{:.3e}", r.fbsmr_forward_tilde),
            format!("{:.3e}", r.fbsmr_backward),
            r.rp_iterations.to_string(),
            r.fbsmr_iterations.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug)]
pub struct CompareVariant {
    pub label: String,
    pub report_converged: bool,
    pub gamma: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub history: Vec<HistoryRecord>,
}

#[derive(Clone, Debug)]
pub struct CompareResult {
    pub axis: Axis,
    pub variants: Vec<CompareVariant>,
}

/// Two solves of the same system that differ only along `axis`.
pub fn compare<S: Scalar>(
    a: &Matrix<S>,
    b: &[S],
    m: &dyn Preconditioner<S>,
    method: Method,
    base: &SolverConfig,
    axis: Axis,
) -> Result<CompareResult> {
    let variants: Vec<(&str, SolverConfig)> = match axis {
        Axis::Initguess => vec![
            (
                "x0=precond",
                SolverConfig {
                    init_guess: InitialGuess::PrecondRhs,
                    ..*base
                },
            ),
            (
                "x0=zero",
                SolverConfig {
                    init_guess: InitialGuess::Zero,
                    ..*base
                },
            ),
        ],
        Axis::Orth => vec![
            (
                "mgs",
                SolverConfig {
                    orth: Orthogonalization::Mgs,
                    ..*base
                },
            ),
            (
                "cgs",
                SolverConfig {
                    orth: Orthogonalization::Cgs,
                    ..*base
                },
            ),
        ],
    };
    let mut out = Vec::new();
    for (label, cfg) in variants {
        let rep = run_method(method, a, b, m, &cfg)?;
        out.push(CompareVariant {
            label: label.into(),
            report_converged: rep.converged,
            gamma: rep.gamma,
            iterations: rep.iterations,
            restarts: rep.restarts,
            history: rep.history,
        });
    }
    Ok(CompareResult { axis, variants: out })
}

pub fn cmd_compare(args: &CompareArgs) -> Result<CompareResult> {
    if is_complex(&args.matrix)? || is_complex(&args.rhs)? {
        compare_typed::<Complex64>(args)
    } else {
        compare_typed::<f64>(args)
    }
}

fn compare_typed<S: Scalar>(args: &CompareArgs) -> Result<CompareResult> {
    let a: Matrix<S> = mtx::read_matrix_file(&args.matrix)?;
    let b: Vec<S> = mtx::read_vector_file(&args.rhs)?;
    let m = build_preconditioner(&a, args.flags.precond, args.flags.factor_precision.into())?;
    let res = compare(&a, &b, m.as_ref(), args.method, &args.flags.config(args.method), args.axis)?;
    let mut meta = vec![
        ("command".to_string(), "compare".to_string()),
        ("matrix".into(), args.matrix.display().to_string()),
        ("rhs".into(), args.rhs.display().to_string()),
        ("axis".into(), format!("{:?}", args.axis).to_lowercase()),
        ("method".into(), args.method.name().into()),
    ];
    meta.extend(args.flags.metadata());
    write_compare_csv(output(&args.out)?, &meta, &res)?;
    Ok(res)
}

/// Merged history: `variant,it,est_rel_res,true_rel_res,restart_flag`.
pub fn write_compare_csv(out: impl Write, meta: &[(String, String)], res: &CompareResult) -> Result<()> {
    let mut out = out;
    write_metadata(&mut out, meta)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["variant", "it", "est_rel_res", "true_rel_res", "restart_flag"])?;
    for v in &res.variants {
        for h in &v.history {
            w.write_record([
                v.label.clone(),
                h.it.to_string(),
                format!("{:.6e}", h.est_rel_res),
                fmt_opt(h.true_rel_res),
                u8::from(h.restart).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("fbsmr").chain(args.iter().copied()))
    }

    #[test]
    fn parses_subcommands_and_defaults() {
        let cli = parse(&["solve", "a.mtx", "b.mtx"]).unwrap();
        let Command::Solve(s) = cli.command else { panic!() };
        assert_eq!(s.method, Method::Fbsmr);
        assert_eq!(s.flags.tol, 10.0 * EPS_W);
        assert_eq!((s.flags.restart, s.flags.maxit), (30, 500));
        assert!(parse(&["compare", "a.mtx", "b.mtx", "--axis", "sideways"]).is_err());
        assert!(parse(&["solve", "a.mtx", "b.mtx", "--precond", "ilu0", "--orth", "cgs", "--x0", "zero", "--method", "rp-gmres"]).is_ok());
        let cli = parse(&["table1"]).unwrap();
        let Command::Table1(t) = cli.command else { panic!() };
        assert_eq!(t.n, vec![100, 200]);
        assert_eq!(t.alpha, vec![10.0, 12.0, 14.0]);
        assert!(parse(&["gen", "poisson", "--m", "8"]).is_ok());
    }

    #[test]
    fn history_csv_round_trip() {
        let h = vec![
            HistoryRecord { it: 0, est_rel_res: 1.0, true_rel_res: Some(1.0), restart: true },
            HistoryRecord { it: 1, est_rel_res: 0.25, true_rel_res: None, restart: false },
            HistoryRecord { it: 2, est_rel_res: 1e-17, true_rel_res: Some(3e-17), restart: true },
        ];
        let mut buf = Vec::new();
        write_history_csv(&mut buf, &[("seed".into(), "1".into())], &h).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# tool=fbsmr"));
        assert!(text.contains("# seed=1\n"));
        assert!(text.contains("it,est_rel_res,true_rel_res,restart_flag\n0,"));
        assert!(text.contains("\n1,2.500000e-1,,0\n"));
        assert_eq!(read_history_csv(buf.as_slice()).unwrap(), h);
    }
}
