//! Command line front end: every subcommand validates its flags, calls into
//! the library, and emits JSON reports plus CSV fields that plotting and
//! regression tooling can consume directly.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::thread;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lane_emden::asymptotics::{fit_decay_exponent, kelvin_transform, pde_residual};
use lane_emden::exponents::{derive_exponents, validate_regime};
use lane_emden::fit::fit_line;
use lane_emden::potentials::{check_hypotheses, parse_potential, Potential, ProbePlan};
use lane_emden::profile::{profile_asymptotics, shoot_profile, Profile, ShootOpts};
use lane_emden::radial::make_log_grid;
use lane_emden::solver::{
    solve_fast_decay, solve_mixed, Direction, SolveOpts, SolveReport, SolveStatus,
};
use lane_emden::{ProblemParams, RadialFunction};

const SCHEMA_VERSION: &str = "1.0";

#[derive(Parser)]
#[command(
    name = "lane-emden",
    about = "Construct and analyze singular radial solutions of -\u{394}u = V u^p",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the exponent table for a pair (N, p) as JSON.
    Constants(ConstantsArgs),
    /// Integrate the separable profile and emit (t, w, dw) rows.
    Profile(ProfileArgs),
    /// Run one monotone solve and emit a JSON report plus the solution CSV.
    Solve(SolveArgs),
    /// Solve over a list of seeds k and emit the nu(k) table.
    Sweep(SweepArgs),
    /// Fit a power-law exponent on a window of a solution CSV.
    Analyze(AnalyzeArgs),
    /// Apply the Kelvin transform to a solution CSV.
    Kelvin(KelvinArgs),
    /// Probe a potential spec against the solvability hypotheses.
    CheckPotential(CheckPotentialArgs),
}

#[derive(Args)]
struct ParamFlags {
    /// Space dimension N >= 3.
    #[arg(long)]
    dim: usize,
    /// Nonlinearity exponent p.
    #[arg(long)]
    p: f64,
}

#[derive(Args)]
struct GridFlags {
    /// Lower grid radius (must sit below 1).
    #[arg(long)]
    grid_min: Option<f64>,
    /// Upper grid radius (must sit above 1).
    #[arg(long)]
    grid_max: Option<f64>,
    /// Node count including both endpoints.
    #[arg(long)]
    nodes: Option<usize>,
}

#[derive(Args)]
struct ConstantsArgs {
    #[command(flatten)]
    params: ParamFlags,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProfileArgs {
    #[command(flatten)]
    params: ParamFlags,
    /// CSV output path, default profile.csv in the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Integration horizon in the log variable.
    #[arg(long)]
    t_max: Option<f64>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    params: ParamFlags,
    /// Far-field seed; the solution behaves like nu r^{2-N} with nu near k.
    #[arg(long)]
    k: f64,
    /// Potential spec: const1, bridge:alpha0=A,beta=B, cap:alpha=A, bump:amp=A.
    #[arg(long, default_value = "const1")]
    potential: String,
    /// Per-node relative stopping tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[command(flatten)]
    grid: GridFlags,
    /// Report path, default report.json in the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Solution CSV path, default solution.csv in the output directory.
    #[arg(long)]
    solution_csv: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    params: ParamFlags,
    /// Comma-separated seeds, e.g. 1e-4,1e-3,1e-2. Overrides the range flags.
    #[arg(long)]
    ks: Option<String>,
    /// Smallest seed of a log-spaced range (with --k-max and --points).
    #[arg(long)]
    k_min: Option<f64>,
    #[arg(long)]
    k_max: Option<f64>,
    #[arg(long, default_value_t = 5)]
    points: usize,
    #[arg(long, default_value = "const1")]
    potential: String,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[command(flatten)]
    grid: GridFlags,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    threads: Option<usize>,
    /// Report path, default sweep.json in the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FitKind {
    /// First decade of the grid.
    Origin,
    /// Last decade of the grid.
    Infinity,
    /// One decade centered at the geometric middle.
    Mid,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Solution CSV with r,value rows on a log-uniform grid.
    #[arg(long = "in")]
    input: PathBuf,
    /// Window preset for the fit.
    #[arg(long, value_enum)]
    fit: FitKind,
    /// Explicit window override, lower edge.
    #[arg(long, requires = "window_hi")]
    window_lo: Option<f64>,
    /// Explicit window override, upper edge.
    #[arg(long, requires = "window_lo")]
    window_hi: Option<f64>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KelvinArgs {
    /// Solution CSV with r,value rows on a grid symmetric about r = 1.
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    params: ParamFlags,
    /// Decay exponent of the potential the input solves against.
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    /// Potential spec; defaults to cap:alpha=<alpha>.
    #[arg(long)]
    potential: Option<String>,
    /// Transformed-solution CSV path, default kelvin.csv in the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional CSV path for the transformed potential.
    #[arg(long)]
    v_out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckPotentialArgs {
    #[command(flatten)]
    params: ParamFlags,
    #[arg(long)]
    potential: String,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Validation(String),
    NonConvergence(String),
}

impl From<lane_emden::Error> for Failure {
    fn from(e: lane_emden::Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Validation(format!("io: {e}"))
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            emit_error(2, &msg);
            ExitCode::from(2)
        }
        Err(Failure::NonConvergence(msg)) => {
            emit_error(3, &msg);
            ExitCode::from(3)
        }
    }
}

fn emit_error(exit_code: u8, message: &str) {
    let body = serde_json::json!({ "exit_code": exit_code, "error": message });
    eprintln!("{body}");
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Constants(a) => run_constants(a),
        Command::Profile(a) => run_profile(a),
        Command::Solve(a) => run_solve(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Analyze(a) => run_analyze(a),
        Command::Kelvin(a) => run_kelvin(a),
        Command::CheckPotential(a) => run_check_potential(a),
    }
}

fn out_dir() -> PathBuf {
    std::env::var_os("LANE_EMDEN_OUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Explicit paths are honored verbatim; defaulted artifact names land in the
/// output directory (flag LANE_EMDEN_OUT_DIR, falling back to the cwd).
fn resolve_out(flag: Option<PathBuf>, default_name: &str) -> PathBuf {
    flag.unwrap_or_else(|| out_dir().join(default_name))
}

fn unix_timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn parse_params(flags: &ParamFlags) -> CliResult<ProblemParams> {
    Ok(ProblemParams::new(flags.dim, flags.p)?)
}

fn require_above_serrin(params: ProblemParams) -> CliResult<()> {
    let exps = derive_exponents(params)?;
    if params.p <= exps.serrin {
        return Err(Failure::Validation(format!(
            "p must exceed Serrin exponent N/(N-2) = {:.6}; got p = {}",
            exps.serrin, params.p
        )));
    }
    Ok(())
}

fn build_opts(tol: f64, max_iter: usize, grid: &GridFlags) -> CliResult<SolveOpts> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Failure::Validation(format!(
            "tol must be a positive finite number, got {tol}"
        )));
    }
    if max_iter == 0 {
        return Err(Failure::Validation("max-iter must be at least 1".into()));
    }
    let mut opts = SolveOpts {
        tol,
        max_iter,
        ..SolveOpts::default()
    };
    if grid.grid_min.is_some() || grid.grid_max.is_some() || grid.nodes.is_some() {
        let r_min = grid.grid_min.unwrap_or(1e-9);
        let r_max = grid.grid_max.unwrap_or(1e9);
        let nodes = grid.nodes.unwrap_or(1801);
        opts.grid = Some(Arc::new(make_log_grid(r_min, r_max, nodes)?));
    }
    Ok(opts)
}

fn write_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> CliResult<()> {
    let body = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::Validation(format!("serialization: {e}")))?;
    match out {
        Some(path) => {
            fs::write(path, body + "\n")?;
        }
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = writeln!(stdout, "{body}") {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(e.into());
                }
            }
        }
    }
    Ok(())
}

fn write_radial_csv(path: &Path, u: &RadialFunction) -> CliResult<()> {
    let mut buf = String::with_capacity(u.grid.len() * 48);
    buf.push_str("r,value\n");
    for (i, &r) in u.grid.nodes.iter().enumerate() {
        buf.push_str(&format!("{r:e},{:e}\n", u.values[i]));
    }
    fs::write(path, buf)?;
    Ok(())
}

fn write_profile_csv(path: &Path, profile: &Profile) -> CliResult<()> {
    let mut buf = String::with_capacity(profile.t_grid.len() * 64);
    buf.push_str("t,w,dw\n");
    for (i, &t) in profile.t_grid.iter().enumerate() {
        buf.push_str(&format!(
            "{t:e},{:e},{:e}\n",
            profile.values[i], profile.derivative[i]
        ));
    }
    fs::write(path, buf)?;
    Ok(())
}

/// Rebuild a radial function from r,value rows. The rows must form a
/// log-uniform grid straddling 1; the power-law tails are fitted from the
/// first and last decades so evaluation past the grid stays sensible.
fn read_radial_csv(path: &Path) -> CliResult<RadialFunction> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))?;
    let mut rs = Vec::new();
    let mut vs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('r') || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',');
        let bad = || {
            Failure::Validation(format!(
                "{}:{}: expected r,value got {line:?}",
                path.display(),
                lineno + 1
            ))
        };
        let r: f64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        let v: f64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        rs.push(r);
        vs.push(v);
    }
    if rs.len() < 16 {
        return Err(Failure::Validation(format!(
            "{}: need at least 16 rows, got {}",
            path.display(),
            rs.len()
        )));
    }
    let m = rs.len();
    let ratio = rs[1] / rs[0];
    for w in rs.windows(2) {
        if !(w[1] > w[0]) || ((w[1] / w[0]) / ratio - 1.0).abs() > 1e-9 {
            return Err(Failure::Validation(format!(
                "{}: rows must sit on an increasing log-uniform grid",
                path.display()
            )));
        }
    }
    let grid = Arc::new(make_log_grid(rs[0], rs[m - 1], m)?);
    let edge = (m / 4).clamp(4, 12);
    let inner = edge_slope(&rs[..edge], &vs[..edge]);
    let outer = edge_slope(&rs[m - edge..], &vs[m - edge..]);
    Ok(RadialFunction::new(grid, vs, inner, outer)?)
}

fn edge_slope(rs: &[f64], vs: &[f64]) -> f64 {
    if vs.iter().any(|&v| !(v > 0.0)) {
        return 0.0;
    }
    let xs: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = vs.iter().map(|v| v.ln()).collect();
    fit_line(&xs, &ys).map(|f| f.slope).unwrap_or(0.0)
}

fn run_constants(args: ConstantsArgs) -> CliResult<()> {
    let params = parse_params(&args.params)?;
    let exps = derive_exponents(params)?;
    #[derive(Serialize)]
    struct ConstantsOut {
        schema_version: &'static str,
        generated_unix_s: u64,
        exponents: lane_emden::ExponentSet,
    }
    write_json(
        &args.out,
        &ConstantsOut {
            schema_version: SCHEMA_VERSION,
            generated_unix_s: unix_timestamp(),
            exponents: exps,
        },
    )
}

fn run_profile(args: ProfileArgs) -> CliResult<()> {
    let params = parse_params(&args.params)?;
    require_above_serrin(params)?;
    let mut shoot = ShootOpts::default();
    if let Some(t_max) = args.t_max {
        if !(t_max > 0.0) {
            return Err(Failure::Validation(format!(
                "t-max must be positive, got {t_max}"
            )));
        }
        shoot.t_max = t_max;
    }
    let profile = shoot_profile(params, &shoot)?;
    let asym = profile_asymptotics(&profile, params)?;
    let csv_path = resolve_out(args.out, "profile.csv");
    write_profile_csv(&csv_path, &profile)?;

    #[derive(Serialize)]
    struct ProfileOut {
        schema_version: &'static str,
        generated_unix_s: u64,
        params: ProblemParams,
        regime: lane_emden::Regime,
        sup_value: f64,
        asymptotics: lane_emden::profile::ProfileAsymptotics,
        csv_path: String,
    }
    write_json(
        &None,
        &ProfileOut {
            schema_version: SCHEMA_VERSION,
            generated_unix_s: unix_timestamp(),
            params,
            regime: profile.regime,
            sup_value: profile.sup_value,
            asymptotics: asym,
            csv_path: csv_path.display().to_string(),
        },
    )
}

fn dispatch_solve(
    params: ProblemParams,
    v: &Potential,
    k: f64,
    opts: &SolveOpts,
) -> lane_emden::Result<SolveReport> {
    match v.sign_class() {
        Some(_) => solve_fast_decay(params, v, k, opts),
        None => solve_mixed(params, v, k, opts),
    }
}

#[derive(Serialize)]
struct SolveOut {
    schema_version: &'static str,
    generated_unix_s: u64,
    params: ProblemParams,
    potential: String,
    k: f64,
    nu: f64,
    nu_far_field: f64,
    iterations: usize,
    direction: Direction,
    barrier_eps: f64,
    theta0: f64,
    residual_norm: f64,
    pde_residual_norm: f64,
    status: SolveStatus,
    solution_csv_path: String,
}

fn run_solve(args: SolveArgs) -> CliResult<()> {
    let params = parse_params(&args.params)?;
    require_above_serrin(params)?;
    if !(args.k > 0.0) || !args.k.is_finite() {
        return Err(Failure::Validation(format!(
            "k must be a positive finite number, got {}",
            args.k
        )));
    }
    let v = parse_potential(&args.potential, params.dim)?;
    let opts = build_opts(args.tol, args.max_iter, &args.grid)?;
    let report = dispatch_solve(params, &v, args.k, &opts)?;
    let pde = pde_residual(&report.solution, &v, params)?;

    let csv_path = resolve_out(args.solution_csv, "solution.csv");
    write_radial_csv(&csv_path, &report.solution)?;
    let out = SolveOut {
        schema_version: SCHEMA_VERSION,
        generated_unix_s: unix_timestamp(),
        params,
        potential: args.potential.clone(),
        k: args.k,
        nu: report.nu,
        nu_far_field: report.nu_far_field,
        iterations: report.iterations,
        direction: report.direction,
        barrier_eps: report.barrier_eps,
        theta0: report.theta0,
        residual_norm: report.residual_norm,
        pde_residual_norm: pde.norm,
        status: report.status,
        solution_csv_path: csv_path.display().to_string(),
    };
    write_json(&Some(resolve_out(args.out, "report.json")), &out)?;
    if report.status != SolveStatus::Converged {
        return Err(Failure::NonConvergence(format!(
            "did not converge in {} iterations (last change {:.3e}); report written",
            report.iterations, report.residual_norm
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepEntry {
    k: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    direction: Option<Direction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    barrier_eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    status: Option<SolveStatus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn parse_k_list(args: &SweepArgs) -> CliResult<Vec<f64>> {
    let ks: Vec<f64> = if let Some(spec) = &args.ks {
        spec.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Failure::Validation(format!("bad seed {s:?} in --ks")))
            })
            .collect::<CliResult<_>>()?
    } else {
        let (lo, hi) = match (args.k_min, args.k_max) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => {
                return Err(Failure::Validation(
                    "pass --ks or both --k-min and --k-max".into(),
                ))
            }
        };
        if args.points < 2 {
            return Err(Failure::Validation("need at least 2 points".into()));
        }
        let step = (hi / lo).powf(1.0 / (args.points as f64 - 1.0));
        (0..args.points)
            .map(|i| lo * step.powi(i as i32))
            .collect()
    };
    if ks.is_empty() {
        return Err(Failure::Validation("empty seed list".into()));
    }
    for w in ks.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Failure::Validation(format!(
                "seeds must increase strictly: {} then {}",
                w[0], w[1]
            )));
        }
    }
    if !(ks[0] > 0.0) {
        return Err(Failure::Validation(format!(
            "seeds must be positive, got {}",
            ks[0]
        )));
    }
    Ok(ks)
}

fn run_sweep(args: SweepArgs) -> CliResult<()> {
    let params = parse_params(&args.params)?;
    require_above_serrin(params)?;
    let ks = parse_k_list(&args)?;
    let v = parse_potential(&args.potential, params.dim)?;
    let opts = build_opts(args.tol, args.max_iter, &args.grid)?;

    let requested = args.threads.unwrap_or_else(|| {
        thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    });
    let threads = requested.clamp(1, ks.len());

    let mut entries: Vec<Option<SweepEntry>> = (0..ks.len()).map(|_| None).collect();
    let chunks: Vec<Vec<usize>> = (0..threads)
        .map(|t| (t..ks.len()).step_by(threads).collect())
        .collect();
    let computed: Vec<Vec<(usize, SweepEntry)>> = thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .iter()
            .map(|idxs| {
                let v = &v;
                let opts = &opts;
                let ks = &ks;
                scope.spawn(move || {
                    idxs.iter()
                        .map(|&i| {
                            let entry = match dispatch_solve(params, v, ks[i], opts) {
                                Ok(rep) => SweepEntry {
                                    k: ks[i],
                                    nu: Some(rep.nu),
                                    iterations: Some(rep.iterations),
                                    direction: Some(rep.direction),
                                    barrier_eps: Some(rep.barrier_eps),
                                    residual_norm: Some(rep.residual_norm),
                                    status: Some(rep.status),
                                    error: None,
                                },
                                Err(e) => SweepEntry {
                                    k: ks[i],
                                    nu: None,
                                    iterations: None,
                                    direction: None,
                                    barrier_eps: None,
                                    residual_norm: None,
                                    status: None,
                                    error: Some(e.to_string()),
                                },
                            };
                            (i, entry)
                        })
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    for batch in computed {
        for (i, entry) in batch {
            entries[i] = Some(entry);
        }
    }
    let results: Vec<SweepEntry> = entries.into_iter().map(|e| e.unwrap()).collect();

    let troubled: Vec<f64> = results
        .iter()
        .filter(|e| e.error.is_some() || e.status == Some(SolveStatus::MaxIterReached))
        .map(|e| e.k)
        .collect();

    #[derive(Serialize)]
    struct SweepOut {
        schema_version: &'static str,
        generated_unix_s: u64,
        params: ProblemParams,
        potential: String,
        results: Vec<SweepEntry>,
    }
    write_json(
        &Some(resolve_out(args.out, "sweep.json")),
        &SweepOut {
            schema_version: SCHEMA_VERSION,
            generated_unix_s: unix_timestamp(),
            params,
            potential: args.potential.clone(),
            results,
        },
    )?;
    if !troubled.is_empty() {
        return Err(Failure::NonConvergence(format!(
            "{} of {} seeds failed or hit max-iter ({:?}); report written",
            troubled.len(),
            ks.len(),
            troubled
        )));
    }
    Ok(())
}

fn run_analyze(args: AnalyzeArgs) -> CliResult<()> {
    let u = read_radial_csv(&args.input)?;
    let (r_min, r_max) = (u.grid.r_min, u.grid.r_max);
    let window = match (args.window_lo, args.window_hi) {
        (Some(lo), Some(hi)) => {
            if !(lo < hi) {
                return Err(Failure::Validation(format!(
                    "window must be increasing, got ({lo}, {hi})"
                )));
            }
            (lo, hi)
        }
        _ => match args.fit {
            FitKind::Origin => (r_min, r_min * 10.0),
            FitKind::Infinity => (r_max / 10.0, r_max),
            FitKind::Mid => {
                let c = (r_min * r_max).sqrt();
                (c / 10f64.sqrt(), c * 10f64.sqrt())
            }
        },
    };
    let fit = fit_decay_exponent(&u, window)?;

    #[derive(Serialize)]
    struct AnalyzeOut {
        schema_version: &'static str,
        generated_unix_s: u64,
        input: String,
        fit_kind: &'static str,
        window: (f64, f64),
        slope: f64,
        stderr: f64,
        r_squared: f64,
        reliable: bool,
    }
    write_json(
        &args.out,
        &AnalyzeOut {
            schema_version: SCHEMA_VERSION,
            generated_unix_s: unix_timestamp(),
            input: args.input.display().to_string(),
            fit_kind: match args.fit {
                FitKind::Origin => "origin",
                FitKind::Infinity => "infinity",
                FitKind::Mid => "mid",
            },
            window: fit.window,
            slope: fit.slope,
            stderr: fit.stderr,
            r_squared: fit.r_squared,
            reliable: fit.reliable(),
        },
    )
}

fn run_kelvin(args: KelvinArgs) -> CliResult<()> {
    let params = parse_params(&args.params)?;
    let u = read_radial_csv(&args.input)?;
    let spec = args
        .potential
        .clone()
        .unwrap_or_else(|| format!("cap:alpha={}", args.alpha));
    let v = parse_potential(&spec, params.dim)?;
    let pair = kelvin_transform(&u, &v, params, args.alpha)?;
    let csv_path = resolve_out(args.out, "kelvin.csv");
    write_radial_csv(&csv_path, &pair.u_sharp)?;
    let v_csv_path = match args.v_out {
        Some(path) => {
            write_radial_csv(&path, &pair.v_sharp)?;
            Some(path.display().to_string())
        }
        None => None,
    };

    #[derive(Serialize)]
    struct KelvinOut {
        schema_version: &'static str,
        generated_unix_s: u64,
        params: ProblemParams,
        input: String,
        alpha: f64,
        potential: String,
        rho: f64,
        transformed_csv_path: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        transformed_potential_csv_path: Option<String>,
    }
    write_json(
        &None,
        &KelvinOut {
            schema_version: SCHEMA_VERSION,
            generated_unix_s: unix_timestamp(),
            params,
            input: args.input.display().to_string(),
            alpha: args.alpha,
            potential: spec,
            rho: pair.rho,
            transformed_csv_path: csv_path.display().to_string(),
            transformed_potential_csv_path: v_csv_path,
        },
    )
}

fn run_check_potential(args: CheckPotentialArgs) -> CliResult<()> {
    let params = parse_params(&args.params)?;
    let v = parse_potential(&args.potential, params.dim)?;
    let mut report = check_hypotheses(&v, params, &ProbePlan::default());
    let regime = validate_regime(params, v.growth_exponent(), v.meta.alpha)?;
    report.checks.extend(regime.checks);
    let all_pass = report.all_pass();
    let failed: Vec<&'static str> = report
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name)
        .collect();

    #[derive(Serialize)]
    struct CheckOut {
        schema_version: &'static str,
        generated_unix_s: u64,
        params: ProblemParams,
        potential: String,
        all_pass: bool,
        report: lane_emden::potentials::HypothesisReport,
    }
    write_json(
        &args.out,
        &CheckOut {
            schema_version: SCHEMA_VERSION,
            generated_unix_s: unix_timestamp(),
            params,
            potential: args.potential.clone(),
            all_pass,
            report,
        },
    )?;
    if !all_pass {
        return Err(Failure::Validation(format!(
            "hypothesis checks failed: {}",
            failed.join(", ")
        )));
    }
    Ok(())
}
