use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use minigraph::annulusgrid::{AngularOrder, PolarGrid};
use minigraph::bounds::{self, equator_bound_report, BoundReport, SweepGrid, SUITES};
use minigraph::config::{parse_pair, KeyValueConfig};
use minigraph::curvature::{best_curvature, curvature_table, write_curvature_csv, CurvatureRow};
use minigraph::harmonicmap::{minimize_energy, MinimizerOptions};
use minigraph::metricspace::{parse_metric_spec, parse_radial_table, MetricField, RadialMetric};
use minigraph::minimalsurface::{build_graph_radial, catenoid_piece, ConformalImmersion};
use minigraph::radialfamily::{radial_map, solve_c, solve_profile, RadialProfile};
use serde_json::json;

const EXIT_USAGE: u8 = 1;
const EXIT_BUILD: u8 = 2;
const EXIT_CONVERGENCE: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "minigraph", version, about = "Minimal graphs from harmonic maps between annuli")]
struct Cli {
    /// key = value file; flags override its keys
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default 1)
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory (default .)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Force a single worker
    #[arg(long, global = true)]
    deterministic: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Catenoidal surface (c <= 0) with its graph and reports
    Catenoid(SurfaceArgs),
    /// Helicoidal surface (c > 0)
    Helicoid(SurfaceArgs),
    /// Radial profile table, or the c matching a pair of annuli
    Radial(RadialArgs),
    /// Energy minimiser between two annuli
    Minimize(MinimizeArgs),
    /// Bound verification suites
    Verify(VerifyArgs),
    /// Summarise report JSON files
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct SurfaceArgs {
    /// euclidean, sphere, hyperbolic, power:k, cigar:a or table:path.csv
    #[arg(long)]
    metric: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    /// Domain radii s_lo,s_hi
    #[arg(long)]
    s_range: Option<String>,
    /// Catenoid heights v1,v2 (euclidean, c = -0.25)
    #[arg(long, allow_hyphen_values = true)]
    v_range: Option<String>,
    /// n_u,n_theta
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    h0: Option<f64>,
    /// Also write an OBJ mesh
    #[arg(long)]
    obj: bool,
}

#[derive(Args, Debug)]
struct RadialArgs {
    #[arg(long)]
    metric: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long)]
    s_range: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    /// r,R: find c with A(r,1) -> A(R,1)
    #[arg(long)]
    solve_c: Option<String>,
}

#[derive(Args, Debug)]
struct MinimizeArgs {
    #[arg(long)]
    metric: Option<String>,
    /// Domain annulus r,R
    #[arg(long)]
    domain: Option<String>,
    /// Target annulus r,R
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    max_sweeps: Option<usize>,
    #[arg(long)]
    tol_energy: Option<f64>,
    #[arg(long)]
    tol_grad: Option<f64>,
    #[arg(long)]
    damping: Option<f64>,
    /// Angular stencil order: 2, 4 or 6
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// equator, schwarzpick, heinz, flux, bochner or all
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    files: Vec<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, msg: msg.into() }
    }
}

impl From<minigraph::Error> for Failure {
    fn from(e: minigraph::Error) -> Self {
        Failure { code: EXIT_BUILD, msg: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: EXIT_BUILD, msg: format!("io: {e}") }
    }
}

type Outcome<T> = Result<T, Failure>;

const CONFIG_KEYS: &[&str] = &[
    "metric", "c", "s-range", "v-range", "grid", "h0", "samples", "solve-c", "domain", "target", "max-sweeps",
    "tol-energy", "tol-grad", "damping", "order", "suite", "tol", "workers", "out",
];

/// Flag, then config key, then default.
struct Settings {
    cfg: KeyValueConfig,
}

impl Settings {
    fn load(path: Option<&Path>) -> Outcome<Self> {
        let cfg = match path {
            None => KeyValueConfig::default(),
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| Failure::usage(format!("cannot read config {}: {e}", p.display())))?;
                let cfg = KeyValueConfig::parse(&text).map_err(|e| Failure::usage(format!("config {}: {e}", p.display())))?;
                cfg.reject_unknown(CONFIG_KEYS).map_err(|e| Failure::usage(format!("config {}: {e}", p.display())))?;
                cfg
            }
        };
        Ok(Settings { cfg })
    }

    fn value<T: FromStr>(&self, flag: Option<T>, key: &str) -> Outcome<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.cfg.get(key).map_err(|e| Failure::usage(format!("config: {e}")))
    }

    fn or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Outcome<T> {
        Ok(self.value(flag, key)?.unwrap_or(default))
    }

    fn pair<T: FromStr>(&self, flag: Option<&str>, key: &str) -> Outcome<Option<(T, T)>> {
        match flag {
            Some(s) => parse_pair(s).map(Some).map_err(|e| Failure::usage(format!("--{key}: {e}"))),
            None => self.cfg.get_pair(key).map_err(|e| Failure::usage(format!("config: {e}"))),
        }
    }

    fn text(&self, flag: Option<&str>, key: &str, default: &str) -> String {
        flag.map(str::to_string).or_else(|| self.cfg.raw(key).map(str::to_string)).unwrap_or_else(|| default.to_string())
    }
}

fn load_metric(spec: &str) -> Outcome<RadialMetric> {
    if let Some(path) = spec.strip_prefix("table:") {
        let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read metric table {path}: {e}")))?;
        return Ok(RadialMetric::table(parse_radial_table(&text)?));
    }
    parse_metric_spec(spec).map_err(|e| Failure::usage(e.to_string()))
}

fn grid_of(s: &Settings, flag: Option<&str>) -> Outcome<(usize, usize)> {
    let (n_u, n_t) = s.pair(flag, "grid")?.unwrap_or((64, 64));
    if n_u < 8 || n_t < 8 {
        return Err(Failure::usage(format!("--grid needs both sizes >= 8, got {n_u},{n_t}")));
    }
    Ok((n_u, n_t))
}

fn create(dir: &Path, name: &str) -> Outcome<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_json(dir: &Path, name: &str, value: &impl serde::Serialize) -> Outcome<()> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Failure { code: EXIT_BUILD, msg: format!("json: {e}") })?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Largest |a − b| / max|b| over nodes where both are finite.
fn disagreement(rows: &[CurvatureRow], a: impl Fn(&CurvatureRow) -> f64, b: impl Fn(&CurvatureRow) -> f64) -> f64 {
    let scale = rows.iter().map(&b).filter(|v| v.is_finite()).fold(0.0, |m: f64, v| m.max(v.abs())).max(1e-300);
    rows.iter()
        .filter(|r| a(r).is_finite() && b(r).is_finite())
        .fold(0.0, |m: f64, r| m.max((a(r) - b(r)).abs() / scale))
}

fn curvature_reports(rows: &[CurvatureRow]) -> Vec<BoundReport> {
    vec![
        BoundReport::new("curvature_numeric_vs_closed", disagreement(rows, |r| r.k_numeric, |r| r.k_closed), 1e-3, "relative, sup over nodes"),
        BoundReport::new("curvature_decomp_vs_closed", disagreement(rows, |r| r.k_decomp, |r| r.k_closed), 1e-3, "relative, sup over nodes"),
        BoundReport::new("curvature_numeric_vs_decomp", disagreement(rows, |r| r.k_numeric, |r| r.k_decomp), 1e-3, "relative, sup over nodes"),
    ]
}

fn conformality_report(imm: &ConformalImmersion) -> Outcome<BoundReport> {
    let g = imm.grid();
    let mut worst = 0.0f64;
    for i in 0..g.n_u {
        for j in 0..g.n_theta {
            let (a, b) = imm.conformality_defect(i, j)?;
            worst = worst.max(a.abs()).max(b.abs());
        }
    }
    Ok(BoundReport::new("conformality", worst, 1e-8, "sup over nodes"))
}

fn write_surface(dir: &Path, imm: &ConformalImmersion, rows: &[CurvatureRow], obj: bool) -> Outcome<()> {
    let k = best_curvature(rows);
    imm.write_csv(create(dir, "surface.csv")?, &k)?;
    write_curvature_csv(create(dir, "curvature.csv")?, rows)?;
    if obj {
        let mut w = create(dir, "surface.obj")?;
        imm.write_obj(&mut w, &k)?;
        w.flush()?;
    }
    Ok(())
}

fn cmd_surface(s: &Settings, a: &SurfaceArgs, dir: &Path, helicoid: bool) -> Outcome<()> {
    let metric_name = s.text(a.metric.as_deref(), "metric", "euclidean");
    let metric = load_metric(&metric_name)?;
    let c = s.or(a.c, "c", if helicoid { 0.25 } else { -0.25 })?;
    let (n_u, n_t) = grid_of(s, a.grid.as_deref())?;
    let h0 = s.or(a.h0, "h0", 0.0)?;
    if helicoid && !(c > 0.0) {
        return Err(Failure { code: EXIT_BUILD, msg: format!("minimalsurface: helicoid needs c > 0, got {c}") });
    }
    if !helicoid && c > 0.0 {
        return Err(Failure { code: EXIT_BUILD, msg: format!("minimalsurface: catenoid needs c <= 0, got {c}; use helicoid") });
    }
    let mut reports = Vec::new();
    if let Some((v1, v2)) = s.pair::<f64>(a.v_range.as_deref(), "v-range")? {
        if helicoid || !metric.is_euclidean() || c != -0.25 {
            return Err(Failure::usage("--v-range needs the catenoid command with the euclidean metric and c = -0.25"));
        }
        if !(v2 > v1) {
            return Err(Failure::usage(format!("--v-range needs v1 < v2, got {v1},{v2}")));
        }
        let d = v2 - v1;
        let imm = catenoid_piece(v1, d, n_u | 1, n_t)?;
        let rows = curvature_table(&imm)?;
        write_surface(dir, &imm, &rows, a.obj)?;
        let eq = equator_bound_report(&imm, d)?.with("v1", v1).with("v2", v2);
        println!("equator: |K| = {:.6}, pi^2/d^2 = {:.6}, margin = {:.6}", eq.lhs, eq.rhs, eq.margin);
        reports.push(eq);
        reports.push(conformality_report(&imm)?);
        let cg = bounds::c_from_geometry(d, imm.grid().modulus())?;
        reports.push(BoundReport::new("c_from_geometry", (cg - imm.c).abs(), 1e-8, "stored vs geometric c").with("c", cg));
        reports.extend(curvature_reports(&rows));
        write_json(dir, "report.json", &reports)?;
        return Ok(());
    }
    let (s_lo, s_hi) = s.pair(a.s_range.as_deref(), "s-range")?.unwrap_or(if helicoid { (0.5, 2.0) } else { (1.0, 2.0) });
    let profile = Arc::new(solve_profile(&metric, c, s_lo, s_hi)?);
    let grid = PolarGrid::new(s_lo, s_hi, n_u, n_t)?;
    let imm = ConformalImmersion::from_profile(profile.clone(), grid, h0)?;
    let rows = curvature_table(&imm)?;
    write_surface(dir, &imm, &rows, a.obj)?;
    profile.write_csv(create(dir, "profile.csv")?, 101)?;
    reports.push(conformality_report(&imm)?);
    reports.extend(curvature_reports(&rows));
    if !helicoid {
        match graph_reports(profile, h0, n_u, n_t, c) {
            Ok(g) => reports.extend(g),
            Err(e) => eprintln!("warning: graph diagnostics skipped: {}", e.msg),
        }
    }
    let worst = reports.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    println!("{} surface, {} c = {c}: {} reports, worst margin {worst:e}", if helicoid { "helicoidal" } else { "catenoidal" }, metric.name(), reports.len());
    write_json(dir, "report.json", &reports)?;
    Ok(())
}

fn graph_reports(profile: Arc<RadialProfile>, h0: f64, n_u: usize, n_t: usize, c: f64) -> Outcome<Vec<BoundReport>> {
    let graph = build_graph_radial(profile, h0, n_u, n_t)?;
    let residual = graph.without_analytic().residual_sup(2)?;
    if c == 0.0 {
        println!("graph residual sup = {residual:e}");
        return Ok(vec![BoundReport::new("graph_residual", residual, 0.0, graph.note.clone().unwrap_or_default())]);
    }
    let flux = graph.reflected().flux_identity_check(c)?;
    println!("graph residual sup = {residual:e}");
    Ok(vec![BoundReport::new("flux_identity", flux.flux_defect, 1e-8, "analytic gradient")
        .with("divergence_sup", flux.divergence_sup)
        .with("graph_residual_sup", residual)])
}

fn cmd_radial(s: &Settings, a: &RadialArgs, dir: &Path) -> Outcome<()> {
    let metric = load_metric(&s.text(a.metric.as_deref(), "metric", "euclidean"))?;
    if let Some((r, big_r)) = s.pair::<f64>(a.solve_c.as_deref(), "solve-c")? {
        let c = solve_c(&metric, r, big_r)?;
        println!("c = {c}");
        return Ok(());
    }
    let c = s.or(a.c, "c", -0.25)?;
    let (s_lo, s_hi) = s.pair(a.s_range.as_deref(), "s-range")?.unwrap_or((1.0, 2.0));
    let n = s.or(a.samples, "samples", 101)?;
    let profile = solve_profile(&metric, c, s_lo, s_hi)?;
    profile.write_csv(create(dir, "profile.csv")?, n)?;
    let (t_lo, t_hi) = profile.t_range()?;
    println!("profile {} c = {c}: [{s_lo}, {s_hi}] -> [{t_lo}, {t_hi}]", metric.name());
    Ok(())
}

fn cmd_minimize(s: &Settings, a: &MinimizeArgs, dir: &Path) -> Outcome<()> {
    let metric = load_metric(&s.text(a.metric.as_deref(), "metric", "euclidean"))?;
    let (r_in, r_out) = s.pair(a.domain.as_deref(), "domain")?.unwrap_or((0.5, 1.0));
    let target = s.pair(a.target.as_deref(), "target")?.unwrap_or((0.7, 1.0));
    let (n_u, n_t) = grid_of(s, a.grid.as_deref())?;
    let order = AngularOrder::from_order(s.or(a.order, "order", 2)?).map_err(|e| Failure::usage(e.to_string()))?;
    let defaults = MinimizerOptions::default();
    let opts = MinimizerOptions {
        max_sweeps: s.or(a.max_sweeps, "max-sweeps", defaults.max_sweeps)?,
        tol_energy: s.or(a.tol_energy, "tol-energy", defaults.tol_energy)?,
        tol_grad: s.or(a.tol_grad, "tol-grad", defaults.tol_grad)?,
        damping: s.value(a.damping, "damping")?,
        ..defaults
    };
    let grid = PolarGrid::new(r_in, r_out, n_u, n_t)?.with_order(order);
    let field = MetricField::Radial(metric.clone());
    let out = minimize_energy(&grid, target, &field, &opts)?;
    let cand = &out.candidate;
    cand.f.write_csv(create(dir, "map.csv")?)?;
    {
        let mut w = create(dir, "energy_trace.csv")?;
        writeln!(w, "sweep,energy")?;
        for (k, e) in out.energy_trace.iter().enumerate() {
            writeln!(w, "{k},{e}")?;
        }
        w.flush()?;
    }
    let energy = cand.dirichlet_energy()?;
    let fit = cand.hopf_fit_c(2)?;
    let mut report = json!({
        "converged": out.converged,
        "sweeps": out.sweeps,
        "max_update": out.max_update,
        "fold_cells": out.fold_cells,
        "energy": energy.energy,
        "area_lower_bound": energy.area_lower_bound,
        "antiholomorphic_excess": energy.antiholomorphic_excess,
        "hopf_c": fit.c,
        "hopf_deviation": fit.deviation,
        "domain_modulus": grid.modulus(),
        "target_modulus": (target.1 / target.0).ln(),
    });
    if let Some(w) = out.fold_warning() {
        eprintln!("warning: {w}");
        report["fold_warning"] = json!(w);
    }
    if out.converged && r_out == 1.0 && target.1 == 1.0 {
        match profile_match(&metric, &grid, r_in, target.0, cand) {
            Ok((c, d)) => {
                report["profile_c"] = json!(c);
                report["profile_match"] = json!(d);
            }
            Err(e) => report["profile_note"] = json!(e.to_string()),
        }
    }
    write_json(dir, "minimize.json", &report)?;
    println!("sweeps {} converged {} energy {:.9} hopf c {:.6} deviation {:.3e}", out.sweeps, out.converged, energy.energy, fit.c, fit.deviation);
    if !out.converged {
        return Err(Failure {
            code: EXIT_CONVERGENCE,
            msg: format!("harmonicmap: no convergence after {} sweeps (last update {:e}); partial results written", out.sweeps, out.max_update),
        });
    }
    Ok(())
}

/// Max node distance between the minimiser output and the radial map with
/// the same boundary data.
fn profile_match(
    metric: &RadialMetric,
    grid: &PolarGrid,
    r: f64,
    big_r: f64,
    cand: &minigraph::harmonicmap::HarmonicMapCandidate,
) -> minigraph::Result<(f64, f64)> {
    let c = solve_c(metric, r, big_r)?;
    let p = Arc::new(solve_profile(metric, c, r, 1.0)?);
    let radial = radial_map(p, grid.clone())?;
    let d = radial.f.samples.iter().zip(&cand.f.samples).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    Ok((c, d))
}

fn cmd_verify(s: &Settings, a: &VerifyArgs, dir: Option<&Path>) -> Outcome<()> {
    let suite = s.text(a.suite.as_deref(), "suite", "all");
    if suite != "all" && !SUITES.contains(&suite.as_str()) {
        return Err(Failure::usage(format!("unknown suite '{suite}'; expected one of {} or all", SUITES.join(", "))));
    }
    let (n_u, n_theta) = grid_of(s, a.grid.as_deref())?;
    let tol = s.or(a.tol, "tol", 1e-9)?;
    let suites = bounds::run_suite(&suite, SweepGrid { n_u, n_theta })?;
    let mut all = Vec::new();
    let mut failed = 0;
    for r in &suites {
        let bad = r.reports.iter().filter(|x| !x.passes(tol)).count();
        failed += bad;
        let worst = r.worst().map(|w| format!("{} {:e}", w.name, w.margin)).unwrap_or_default();
        println!("{}: {} reports, worst margin {worst}, {}", r.suite, r.reports.len(), if bad == 0 { "PASS" } else { "FAIL" });
        if let Some(sharp) = r.reports.iter().find(|x| x.name == "schwarz_pick_sharpness") {
            println!("{}: sharpness ratio {:.6}", r.suite, sharp.rhs);
        }
        for x in r.reports.iter().filter(|x| !x.passes(tol)) {
            println!("  FAIL {} lhs {:e} rhs {:e} margin {:e} ({})", x.name, x.lhs, x.rhs, x.margin, x.witness);
        }
        all.extend(r.reports.iter().cloned().map(|mut x| {
            x.name = format!("{}/{}", r.suite, x.name);
            x
        }));
    }
    match dir {
        Some(d) => write_json(d, "verify.json", &all)?,
        None => println!("{}", bounds::reports_to_json(&all)?),
    }
    if failed > 0 {
        return Err(Failure { code: EXIT_VERIFY, msg: format!("bounds: {failed} report(s) with margin < -{tol}") });
    }
    Ok(())
}

fn cmd_report(s: &Settings, a: &ReportArgs) -> Outcome<()> {
    if a.files.is_empty() {
        return Err(Failure::usage("report needs at least one JSON file"));
    }
    let tol = s.or(a.tol, "tol", 1e-9)?;
    let mut failed = 0;
    for path in &a.files {
        let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
        let reports = bounds::parse_reports(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        for r in &reports {
            let ok = r.passes(tol);
            failed += usize::from(!ok);
            println!("{} {} {:e} {}", path.display(), r.name, r.margin, if ok { "PASS" } else { "FAIL" });
        }
    }
    if failed > 0 {
        return Err(Failure { code: EXIT_VERIFY, msg: format!("{failed} report(s) with margin < -{tol}") });
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome<()> {
    let s = Settings::load(cli.config.as_deref())?;
    let workers = if cli.deterministic { 1 } else { s.or(cli.workers, "workers", 1)? };
    if workers == 0 {
        return Err(Failure::usage("--workers must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| Failure::usage(format!("cannot start {workers} workers: {e}")))?;
    let out: Option<PathBuf> = s.value(cli.out.clone(), "out")?;
    let dir = out.clone().unwrap_or_else(|| PathBuf::from("."));
    if out.is_some() {
        fs::create_dir_all(&dir)?;
    }
    match &cli.command {
        Command::Catenoid(a) => cmd_surface(&s, a, &dir, false),
        Command::Helicoid(a) => cmd_surface(&s, a, &dir, true),
        Command::Radial(a) => cmd_radial(&s, a, &dir),
        Command::Minimize(a) => cmd_minimize(&s, a, &dir),
        Command::Verify(a) => cmd_verify(&s, a, out.as_deref()),
        Command::Report(a) => cmd_report(&s, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
