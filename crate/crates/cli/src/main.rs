//! `kantorovich`: convexity analysis of `K(x) = (xᵀAx)(xᵀA⁻¹x)` from the
//! command line.
//!
//! Exit codes: `analyze` returns 0 (convex), 1 (not convex) or 2
//! (undetermined). The check commands return 0 on pass and 1 on failure.
//! Bad input of any kind returns 64; internal numerical failures return 70.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use kantorovich::boundary::{sweep_csv, DEFAULT_TOL};
use kantorovich::kantorovich::{hessian_fd_deviation, squared_denominator_bound_check};
use kantorovich::lmi::{grid_reports_csv, GRID_TOL};
use kantorovich::matrix::DEFAULT_EPS_PSD;
use kantorovich::sampling::DEFAULT_SEED;
use kantorovich::spd::DEFAULT_TOL_PD;
use kantorovich::{
    classify, delta_from_spec, io, kantorovich_bound_check, lemma41_grid_check, lemma42_44_check, robust_psd_grid,
    sweep, validate_spd, verify_h_lmi, DeltaVector, Error, FamilyKind, Form, GridSpec, MatrixSpec, Point, SamplePlan,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

const EXIT_INPUT: u8 = 64;
const EXIT_INTERNAL: u8 = 70;
const HESSIAN_FD_LIMIT: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "kantorovich", version, about = "Convexity analysis of the Kantorovich function")]
struct Cli {
    /// Seed for every randomized design and generator.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Directions per sampling run (default depends on the dimension).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    samples: Option<u64>,

    /// PSD tolerance, relative to max(1, ‖H‖∞).
    #[arg(long, global = true, default_value_t = DEFAULT_EPS_PSD)]
    eps: f64,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Human)]
    format: OutputFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Human,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Classify K as convex, not convex or undetermined for a matrix file.
    Analyze { file: PathBuf },
    /// Run the three-dimensional grid suites.
    Lemmas {
        /// Nodes per axis for every three-axis grid (defaults: 41 for the
        /// χ/ψ grid, 21 for the ω grids).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        grid: Option<u64>,
        /// Nodes per α/β axis.
        #[arg(long, default_value_t = 41, value_parser = clap::value_parser!(u64).range(2..))]
        ab_nodes: u64,
        /// Upper end of the δ/ω range; above 4 the run is exploratory.
        #[arg(long, default_value_t = 4.0)]
        omega_max: f64,
        /// Also write the worst-cell CSV here.
        #[arg(long)]
        csv_out: Option<PathBuf>,
    },
    /// Bracket the convexity threshold along eigenvalue families.
    Boundary {
        /// two_point, geometric, pinned_pair or custom:t1,...,tn.
        #[arg(long, value_delimiter = ';', default_value = "two_point;geometric;pinned_pair")]
        families: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Sample H_n(Δ, y) ⪰ 0 over the unit sphere for explicit Δ values.
    Lmi {
        #[arg(long)]
        dim: usize,
        /// Δ_ij for i < j in lexicographic order, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        delta: Vec<f64>,
    },
    /// Compare the analytic Hessian of K/4 with finite differences.
    HessianCheck {
        /// Matrix file; a random SPD matrix of size --dim otherwise.
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        points: u64,
    },
    /// Evaluate the Kantorovich upper bound at a point.
    KantorovichBound {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        point: Vec<f64>,
    },
}

/// Failure modes mapped onto exit codes.
enum Failure {
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoConvergence { .. } => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_INPUT),
            };
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}

fn plan(cli: &Cli) -> Result<SamplePlan, Failure> {
    if !(cli.eps > 0.0 && cli.eps.is_finite()) {
        return Err(Failure::Input(format!("--eps must be positive, got {}", cli.eps)));
    }
    Ok(SamplePlan {
        samples: cli.samples.map(|s| s as usize),
        seed: cli.seed,
        eps_psd: cli.eps,
        ..SamplePlan::default()
    })
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Analyze { file } => analyze(cli, file),
        Command::Lemmas {
            grid,
            ab_nodes,
            omega_max,
            csv_out,
        } => lemmas(cli, grid.map(|g| g as usize), *ab_nodes as usize, *omega_max, csv_out.as_deref()),
        Command::Boundary { families, dims, tol } => boundary(cli, families, dims, *tol),
        Command::Lmi { dim, delta } => lmi(cli, *dim, delta),
        Command::HessianCheck { file, dim, points } => hessian_check(cli, file.as_deref(), *dim, *points as usize),
        Command::KantorovichBound { file, point } => bound(cli, file, point),
    }
}

fn load(path: &Path) -> Result<MatrixSpec, Failure> {
    let rows = io::read_matrix_file(path)?;
    Ok(validate_spd(&rows, kantorovich::matrix::DEFAULT_TOL_SYM, DEFAULT_TOL_PD)?)
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("JSON values serialize"));
}

fn analyze(cli: &Cli, file: &Path) -> CmdResult {
    let spec = load(file)?;
    let verdict = classify(&spec, &plan(cli)?)?;
    let delta = delta_from_spec(&spec);
    match cli.format {
        OutputFormat::Human => {
            println!("n: {}", spec.dim());
            println!("eigenvalues: {:?}", spec.eigenvalues());
            if spec.dim() > 1 {
                println!("delta: {delta}");
            }
            println!("{verdict}");
        }
        OutputFormat::Json => print_json(&json!({
            "n": spec.dim(),
            "eigenvalues": spec.eigenvalues(),
            "delta": delta.values(),
            "verdict": verdict,
        })),
        OutputFormat::Csv => {
            println!("n,kappa,status,certificate");
            println!("{},{},{:?},{}", spec.dim(), verdict.kappa, verdict.status, verdict.certificate.name());
        }
    }
    Ok(verdict.status.exit_code() as u8)
}

fn lemmas(cli: &Cli, grid: Option<usize>, ab_nodes: usize, omega_max: f64, csv_out: Option<&Path>) -> CmdResult {
    if !(omega_max > 2.0 && omega_max.is_finite()) {
        return Err(Failure::Input(format!("--omega-max must exceed 2, got {omega_max}")));
    }
    let cube = |nodes: usize| GridSpec::cube(2.0, omega_max, nodes, 3);
    let chi_grid = cube(grid.unwrap_or(41))?;
    let omega_grid = cube(grid.unwrap_or(21))?;
    let ab_grid = GridSpec::cube(-1.0, 1.0, ab_nodes, 2)?;
    let beta_grid = GridSpec::cube(-1.0, 1.0, ab_nodes, 1)?;

    let mut reports = vec![lemma41_grid_check(&chi_grid)?];
    for form in Form::ALL {
        reports.push(robust_psd_grid(form, &omega_grid, &ab_grid)?);
    }
    reports.push(lemma42_44_check(&omega_grid, &beta_grid)?);

    let csv = grid_reports_csv(&reports);
    if let Some(path) = csv_out {
        std::fs::write(path, &csv).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    }
    match cli.format {
        OutputFormat::Human => {
            println!("grid suites (tolerance {GRID_TOL:e})");
            for r in &reports {
                println!("  {r}");
            }
        }
        OutputFormat::Json => print_json(&json!(reports)),
        OutputFormat::Csv => print!("{csv}"),
    }
    Ok(if reports.iter().all(|r| r.passed) { 0 } else { 1 })
}

fn boundary(cli: &Cli, families: &[String], dims: &[usize], tol: f64) -> CmdResult {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Failure::Input(format!("--tol must be positive, got {tol}")));
    }
    if let Some(&n) = dims.iter().find(|&&n| n < 2) {
        return Err(Failure::Input(format!("dimension {n} < 2")));
    }
    let kinds = families.iter().map(|f| FamilyKind::parse(f)).collect::<Result<Vec<_>, _>>()?;
    let plan = plan(cli)?;
    let rows = sweep(&kinds, dims, tol, &plan);
    for row in &rows {
        if let Err(e) = &row.result {
            eprintln!("{} n={}: {e}", row.family, row.dim);
        }
    }
    match cli.format {
        OutputFormat::Csv | OutputFormat::Human => print!("{}", sweep_csv(&rows, plan.seed)),
        OutputFormat::Json => {
            let out: Vec<_> = rows
                .iter()
                .map(|r| match &r.result {
                    Ok(e) => json!({ "family": r.family, "dim": r.dim, "estimate": e, "wall_ms": r.wall_ms as u64 }),
                    Err(err) => json!({ "family": r.family, "dim": r.dim, "error": err.to_string() }),
                })
                .collect();
            print_json(&json!(out));
        }
    }
    Ok(if rows.iter().all(|r| r.result.is_ok()) { 0 } else { 1 })
}

fn lmi(cli: &Cli, dim: usize, values: &[f64]) -> CmdResult {
    let delta = DeltaVector::new(dim, values.to_vec())?;
    let report = verify_h_lmi(&delta, &plan(cli)?)?;
    match cli.format {
        OutputFormat::Human => {
            println!("delta: {delta}");
            println!("{report}");
        }
        OutputFormat::Json => print_json(&json!(report)),
        OutputFormat::Csv => {
            println!("worst_value,samples,seed,tolerance,passed");
            println!(
                "{:.17e},{},{},{:e},{}",
                report.worst_value, report.samples, report.seed, report.tolerance, report.passed
            );
        }
    }
    Ok(if report.passed { 0 } else { 1 })
}

/// `BᵀB/n + I/2` for Gaussian `B`: SPD with moderate conditioning.
fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> Result<MatrixSpec, Failure> {
    let b: Vec<f64> = (0..n * n).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let g: f64 = (0..n).map(|k| b[k * n + i] * b[k * n + j]).sum();
                    g / n as f64 + if i == j { 0.5 } else { 0.0 }
                })
                .collect()
        })
        .collect();
    Ok(validate_spd(&rows, kantorovich::matrix::DEFAULT_TOL_SYM, DEFAULT_TOL_PD)?)
}

fn hessian_check(cli: &Cli, file: Option<&Path>, dim: usize, points: usize) -> CmdResult {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let spec = match file {
        Some(path) => load(path)?,
        None if dim >= 1 => random_spd(&mut rng, dim)?,
        None => return Err(Failure::Input("--dim must be at least 1".into())),
    };
    let n = spec.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let x: Vec<f64> = (0..n).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
        worst = worst.max(hessian_fd_deviation(&spec, &Point::new(x)?)?);
    }
    let passed = worst < HESSIAN_FD_LIMIT;
    match cli.format {
        OutputFormat::Human => println!(
            "n={n}, {points} points: max relative deviation {worst:.3e} ({} < {HESSIAN_FD_LIMIT:e})",
            if passed { "pass" } else { "FAIL" }
        ),
        OutputFormat::Json => print_json(&json!({ "n": n, "points": points, "max_relative_deviation": worst, "passed": passed })),
        OutputFormat::Csv => {
            println!("n,points,max_relative_deviation,passed");
            println!("{n},{points},{worst:e},{passed}");
        }
    }
    Ok(if passed { 0 } else { 1 })
}

fn bound(cli: &Cli, file: &Path, point: &[f64]) -> CmdResult {
    let spec = load(file)?;
    let x = Point::new(point.to_vec())?;
    let classical = kantorovich_bound_check(&spec, &x)?;
    let variant = squared_denominator_bound_check(&spec, &x)?;
    match cli.format {
        OutputFormat::Human => {
            println!(
                "classical  (λ1+λn)²/(4λ1λn)·‖x‖⁴: lhs {} rhs {} holds {}",
                classical.lhs, classical.rhs, classical.holds
            );
            println!(
                "variant    4λ1λn/(λ1²+λn²)·K ≤ ‖x‖⁴: lhs {} rhs {} holds {}",
                variant.lhs, variant.rhs, variant.holds
            );
        }
        OutputFormat::Json => print_json(&json!({ "classical": classical, "squared_denominator": variant })),
        OutputFormat::Csv => {
            println!("bound,lhs,rhs,holds");
            println!("classical,{:.17e},{:.17e},{}", classical.lhs, classical.rhs, classical.holds);
            println!("squared_denominator,{:.17e},{:.17e},{}", variant.lhs, variant.rhs, variant.holds);
        }
    }
    Ok(if classical.holds { 0 } else { 1 })
}
