#![allow(clippy::neg_cmp_op_on_partial_ord)]

use clap::{Args, Parser, Subcommand, ValueEnum};
use robin_polya::bounds::{self, BoundReport, SweepCase, TorsionVariant};
use robin_polya::geometry::{polygon_summary, DomainSpec, GeometrySummary, NormDescriptor};
use robin_polya::numverify::{
    self, disk_torsion_exact_p2, rect_exact_lambda_p2, slab_experiment, EigenEstimate, MeshSpec, SolverOptions,
    SLAB_CSV_HEADER,
};
use robin_polya::oned_robin::{mu1, RobinParams, DEFAULT_TOL};
use robin_polya::ptrig::{pi_p, PExponent, PTrig};
use robin_polya::report::write_csv;
use robin_polya::{Error, Result};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Pólya-type Robin eigenvalue and torsion bounds for the anisotropic
/// p-Laplacian, with numerical checks.
#[derive(Parser)]
#[command(name = "robin-polya", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate π_p or a p-trigonometric function.
    Ptrig(PtrigArgs),
    /// First eigenvalue μ₁(β, s₀) of the one-dimensional Robin problem.
    Mu1(Mu1Args),
    /// |Ω|, P_F(Ω), s₀ and the anisotropic inradius of a domain spec.
    Geometry(InputArgs),
    /// Bound report for every (p, β) pair on a domain spec.
    Bounds(BoundsArgs),
    /// Check the bounds against exact or finite element values.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Rectangle eigenvalue against μ₁ along a family of growing rectangles.
    Slab(SlabArgs),
    /// Torsion bounds against exact or finite element values.
    #[command(subcommand)]
    Torsion(TorsionCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum TrigFn {
    #[value(name = "pi_p")]
    PiP,
    #[value(name = "cos_p")]
    Cos,
    #[value(name = "arccos_p")]
    Arccos,
    #[value(name = "cosh_p")]
    Cosh,
    #[value(name = "arccosh_p")]
    Arccosh,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct PtrigArgs {
    #[arg(long)]
    p: f64,
    #[arg(long = "fn", value_enum)]
    function: TrigFn,
    /// Argument of cos_p / cosh_p.
    #[arg(long)]
    t: Option<f64>,
    /// Argument of arccos_p / arccosh_p.
    #[arg(long)]
    x: Option<f64>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct Mu1Args {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    s0: f64,
    /// Relative bisection tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args)]
struct InputArgs {
    /// Domain spec JSON: {"norm": {...}, "polygon": [[x, y], ...]}.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    input: PathBuf,
    /// One or more exponents, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<f64>,
    /// One or more Robin parameters, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    beta: Vec<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Worker threads for multi-case sweeps (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Exact separable λ₁ of an a × ℓ rectangle against the bounds.
    Rect(RectArgs),
    /// Finite element upper estimate of λ_F(β, Ω).
    Fem(FemArgs),
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct RectArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    l: f64,
    #[arg(long)]
    beta: f64,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct FemArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    beta: f64,
    /// Subdivisions per unit length.
    #[arg(long, default_value_t = 32)]
    n: usize,
    /// Gauss points per boundary edge.
    #[arg(long, default_value_t = 8)]
    quadrature_order: usize,
    #[arg(long, default_value_t = 10_000)]
    max_iterations: usize,
    /// Stop when the relative change of the quotient falls below this.
    #[arg(long, default_value_t = 1e-9)]
    rel_tol: f64,
    /// Additional descent runs from other starting points (general p or F).
    #[arg(long, default_value_t = 0)]
    restarts: usize,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct SlabArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    beta: f64,
    /// Largest ℓ; the grid is 1, 2, 5, 10, 20, 50, ... up to and including lmax.
    #[arg(long, default_value_t = 200.0)]
    lmax: f64,
    /// Explicit ℓ values, comma separated (overrides --lmax).
    #[arg(long, value_delimiter = ',')]
    l: Vec<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum TorsionCommand {
    /// Both torsion bounds on a disk against the exact p = 2 torsion.
    Disk(DiskArgs),
    /// Finite element lower estimate of τ_F(β, Ω).
    Fem(FemArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    AsStated,
    AsDerived,
    Both,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct DiskArgs {
    #[arg(long = "R")]
    radius: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long, value_enum, default_value = "both")]
    variant: VariantArg,
}

#[derive(Serialize)]
struct PtrigOutput {
    p: f64,
    function: &'static str,
    argument: Option<f64>,
    value: f64,
    derivative: Option<f64>,
}

#[derive(Serialize)]
struct GeometryOutput {
    norm: NormDescriptor,
    geometry: GeometrySummary,
    norm_warning: Option<String>,
}

#[derive(Serialize)]
struct RectOutput {
    a: f64,
    l: f64,
    beta: f64,
    lambda_exact: f64,
    s0: f64,
    mu1: f64,
    theorem1_margin: f64,
    theorem1_holds: bool,
    corollary_p2: f64,
    corollary_holds: bool,
}

#[derive(Serialize)]
struct FemOutput {
    p: f64,
    beta: f64,
    estimate: EigenEstimate,
    /// μ₁(β, s₀) for eigenvalue runs (compare with `estimate.value`); the as-derived
    /// torsion lower bound for torsion runs (compare with `estimate.tau`).
    bound: Option<f64>,
}

#[derive(Serialize)]
struct DiskOutput {
    p: f64,
    radius: f64,
    beta: f64,
    exact: f64,
    as_stated: Option<f64>,
    as_stated_holds: Option<bool>,
    as_derived: Option<f64>,
    as_derived_holds: Option<bool>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn csv_text<S: AsRef<str>>(header: &[S], rows: &[Vec<String>]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, header, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

fn read_domain(path: &Path) -> Result<DomainSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput { field: "input", reason: format!("cannot read {}: {e}", path.display()) })?;
    DomainSpec::from_json(&text)
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    if jobs == Some(0) {
        return Err(Error::InvalidInput { field: "jobs", reason: "must be at least 1".into() });
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Numerical { what: "thread pool", reason: e.to_string() })
}

fn run(command: Command) -> Result<String> {
    match command {
        Command::Ptrig(args) => run_ptrig(args),
        Command::Mu1(args) => {
            let params = RobinParams::new(args.p, args.beta, args.s0)?;
            if !(args.tol > 0.0 && args.tol < 1.0) {
                return Err(Error::InvalidInput { field: "tol", reason: format!("must lie in (0, 1), got {}", args.tol) });
            }
            json(&mu1(&params, args.tol)?)
        }
        Command::Geometry(args) => {
            let spec = read_domain(&args.input)?;
            json(&GeometryOutput {
                norm: spec.norm.descriptor().clone(),
                geometry: polygon_summary(&spec.polygon, &spec.norm),
                norm_warning: spec.norm.admissibility_warning().map(str::to_string),
            })
        }
        Command::Bounds(args) => run_bounds(args),
        Command::Verify(VerifyCommand::Rect(args)) => run_rect(args),
        Command::Verify(VerifyCommand::Fem(args)) => run_fem(args, false),
        Command::Slab(args) => run_slab(args),
        Command::Torsion(TorsionCommand::Disk(args)) => run_disk(args),
        Command::Torsion(TorsionCommand::Fem(args)) => run_fem(args, true),
    }
}

fn run_ptrig(args: PtrigArgs) -> Result<String> {
    let p = PExponent::new(args.p)?;
    let tr = PTrig::with_default_config(p);
    let need = |v: Option<f64>, field: &'static str| {
        v.ok_or(Error::InvalidInput { field, reason: "required for this function".into() })
    };
    let (function, argument, value, derivative) = match args.function {
        TrigFn::PiP => ("pi_p", None, pi_p(p), None),
        TrigFn::Cos => {
            let t = need(args.t, "t")?;
            let v = tr.cos(t)?;
            ("cos_p", Some(t), v.value, Some(v.derivative))
        }
        TrigFn::Cosh => {
            let t = need(args.t, "t")?;
            let v = tr.cosh(t)?;
            ("cosh_p", Some(t), v.value, Some(v.derivative))
        }
        TrigFn::Arccos => {
            let x = need(args.x, "x")?;
            ("arccos_p", Some(x), tr.arccos(x)?, None)
        }
        TrigFn::Arccosh => {
            let x = need(args.x, "x")?;
            ("arccosh_p", Some(x), tr.arccosh(x)?, None)
        }
    };
    json(&PtrigOutput { p: args.p, function, argument, value, derivative })
}

fn domain_label(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "domain".into())
}

fn norm_label(d: &NormDescriptor) -> String {
    match d {
        NormDescriptor::Euclidean => "euclidean".into(),
        NormDescriptor::Quadratic { a } => format!("quadratic[{} {} {} {}]", a[0][0], a[0][1], a[1][0], a[1][1]),
        NormDescriptor::Lq { q } => format!("lq{q}"),
        NormDescriptor::Scaled { factor, base } => format!("{factor}*{}", norm_label(base)),
    }
}

fn run_bounds(args: BoundsArgs) -> Result<String> {
    let spec = read_domain(&args.input)?;
    let nl = norm_label(spec.norm.descriptor());
    let dl = domain_label(&args.input);
    let mut cases = Vec::new();
    for &p in &args.p {
        let p = PExponent::new(p)?;
        for &beta in &args.beta {
            if !beta.is_finite() {
                return Err(Error::InvalidInput { field: "beta", reason: format!("must be finite, got {beta}") });
            }
            cases.push(SweepCase {
                p,
                beta,
                norm_label: nl.clone(),
                norm: spec.norm.clone(),
                domain_label: dl.clone(),
                polygon: spec.polygon.clone(),
            });
        }
    }
    let reports: Vec<BoundReport> = pool(args.jobs)?.install(|| bounds::sweep(&cases)).into_iter().collect::<Result<_>>()?;
    match args.format {
        Format::Json if reports.len() == 1 => json(&reports[0]),
        Format::Json => json(&reports),
        Format::Csv => {
            let rows: Vec<Vec<String>> =
                cases.iter().zip(&reports).map(|(c, r)| bounds::csv_row(&c.norm_label, &c.domain_label, r)).collect();
            csv_text(&bounds::csv_header(), &rows)
        }
    }
}

fn run_rect(args: RectArgs) -> Result<String> {
    let lambda = rect_exact_lambda_p2(args.a, args.l, args.beta)?;
    let g = GeometrySummary::from_measures(args.a * args.l, 2.0 * (args.a + args.l))?;
    let m = mu1(&RobinParams::new(2.0, args.beta, g.s0)?, DEFAULT_TOL)?.mu;
    let corollary = bounds::robin_corollary_p2(args.beta, &g)?;
    json(&RectOutput {
        a: args.a,
        l: args.l,
        beta: args.beta,
        lambda_exact: lambda,
        s0: g.s0,
        mu1: m,
        theorem1_margin: m - lambda,
        theorem1_holds: lambda <= m + 1e-9,
        corollary_p2: corollary,
        corollary_holds: lambda <= corollary,
    })
}

fn run_fem(args: FemArgs, torsion: bool) -> Result<String> {
    let spec = read_domain(&args.input)?;
    let p = PExponent::new(args.p)?;
    let mesh = MeshSpec::new(args.n, args.quadrature_order)?;
    if !(args.rel_tol > 0.0) {
        return Err(Error::InvalidInput { field: "rel_tol", reason: format!("must be positive, got {}", args.rel_tol) });
    }
    let opts = SolverOptions { max_iterations: args.max_iterations, rel_tol: args.rel_tol, restarts: args.restarts };
    let g = polygon_summary(&spec.polygon, &spec.norm);
    let (estimate, bound) = if torsion {
        let e = numverify::torsion_numeric_lower_with(&spec.polygon, p, args.beta, &spec.norm, mesh, &opts)?;
        (e, Some(bounds::torsion_lower(p, args.beta, &g, TorsionVariant::AsDerived)?))
    } else {
        let e = numverify::rayleigh_upper_with(&spec.polygon, p, args.beta, &spec.norm, mesh, &opts)?;
        (e, Some(bounds::robin_theorem1(p, args.beta, &g)?))
    };
    json(&FemOutput { p: args.p, beta: args.beta, estimate, bound })
}

/// 1, 2, 5, 10, 20, 50, ... below lmax, then lmax itself.
fn slab_grid(lmax: f64) -> Result<Vec<f64>> {
    if !(lmax >= 1.0 && lmax.is_finite() && lmax <= 1e12) {
        return Err(Error::InvalidInput { field: "lmax", reason: format!("must lie in [1, 1e12], got {lmax}") });
    }
    let mut out = Vec::new();
    let mut decade = 1.0;
    'outer: loop {
        for m in [1.0, 2.0, 5.0] {
            let l = m * decade;
            if l >= lmax {
                break 'outer;
            }
            out.push(l);
        }
        decade *= 10.0;
    }
    out.push(lmax);
    Ok(out)
}

fn run_slab(args: SlabArgs) -> Result<String> {
    let ls = if args.l.is_empty() { slab_grid(args.lmax)? } else { args.l.clone() };
    let result = slab_experiment(args.a, args.beta, &ls)?;
    match args.format {
        Format::Json => json(&result),
        Format::Csv => csv_text(&SLAB_CSV_HEADER, &result.csv_rows()),
    }
}

fn run_disk(args: DiskArgs) -> Result<String> {
    let exact = disk_torsion_exact_p2(args.radius, args.beta)?;
    let r = args.radius;
    let g = GeometrySummary::from_measures(std::f64::consts::PI * r * r, 2.0 * std::f64::consts::PI * r)?;
    let p = PExponent::new(2.0)?;
    let want = |v: VariantArg| args.variant == v || args.variant == VariantArg::Both;
    let stated = want(VariantArg::AsStated)
        .then(|| bounds::torsion_lower(p, args.beta, &g, TorsionVariant::AsStated))
        .transpose()?;
    let derived = want(VariantArg::AsDerived)
        .then(|| bounds::torsion_lower(p, args.beta, &g, TorsionVariant::AsDerived))
        .transpose()?;
    json(&DiskOutput {
        p: 2.0,
        radius: r,
        beta: args.beta,
        exact,
        as_stated: stated,
        as_stated_holds: stated.map(|s| s <= exact),
        as_derived: derived,
        as_derived_holds: derived.map(|d| d <= exact),
    })
}
