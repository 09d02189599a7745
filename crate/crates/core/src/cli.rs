//! Batch front-end behind the `jacobi-cone` binary.
//!
//! Output goes to `--out` or stdout, as JSON or CSV. A `--config` file of
//! `key = value` lines supplies defaults for any long flag of the chosen
//! subcommand; flags given on the command line win.
//!
//! Exit codes: 0 on success, 1 on invalid input or I/O failure, 2 when a
//! numerical procedure fails.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::beta_poly::{
    generate, poly_from_terms_wire, radial_leading_layer, BetaPolynomial, PolyWire,
};
use crate::beta_solver::{
    expand_on_sphere, solve_dirichlet, solve_dirichlet_with, BoundaryTrace, GridSpec,
    HalfBallField, SolveOptions,
};
use crate::cone_spectrum::{
    build_cone, spectrum, strict_stability, write_spectrum_csv, ConeSpec, StabilityClass,
};
use crate::cylinder_modes::{
    avint_profile, mode_projection_transform, separated_ode_residual, synthesize, JacobiFieldSpec,
    ModeSpec, OdeGrid,
};
use crate::error::Error;
use crate::growth::{
    check_allowed_ratio, doubling_dichotomy, exponent_ladder, fit_exponents, liouville_gap,
    psi_convexity, write_dichotomy_csv, Alpha, GrowthProfile, TGrid,
};
use crate::poly::{parse_rational, rational_to_f64, Poly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Parsed command line.
#[derive(Debug, Parser)]
#[command(
    name = "jacobi-cone",
    version,
    about = "Spectra, beta-harmonic polynomials and growth of Jacobi fields on minimal cones"
)]
pub struct RunConfig {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file (a directory for `report --all`); stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Flat `key = value` file of flag defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigen-levels and characteristic exponents of the cone over S^p x S^q.
    Spectrum {
        #[arg(long, default_value_t = 3)]
        p: u32,
        #[arg(long, default_value_t = 3)]
        q: u32,
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
    /// The beta-harmonic polynomial with a given leading layer.
    Poly {
        #[arg(long, default_value_t = 1)]
        ell: usize,
        /// Rational or decimal, e.g. `1`, `5/2`, `0.5`.
        #[arg(long, default_value = "1")]
        beta: String,
        #[arg(long, default_value_t = 2)]
        degree: u32,
        /// Leading layer as `{"terms": [...]}` JSON, inline or a file path.
        /// Defaults to `y^degree` (`|y|^degree` when ell > 1).
        #[arg(long)]
        p0: Option<String>,
    },
    /// Weighted Dirichlet problem on the half-ball.
    Solve {
        /// Taken from the trace when omitted.
        #[arg(long)]
        ell: Option<usize>,
        /// Taken from a polynomial trace when omitted.
        #[arg(long)]
        beta: Option<String>,
        /// `N` for an N x N grid or `NRxNA`.
        #[arg(long, default_value = "64")]
        grid: String,
        /// Trace CSV or polynomial JSON from `poly`.
        #[arg(long)]
        trace: PathBuf,
        /// Cap on conjugate-gradient iterations; the solver default when absent.
        #[arg(long)]
        max_iterations: Option<usize>,
    },
    /// Coefficients of a solved field on the sphere of radius rho.
    Expand {
        /// Field CSV or JSON from `solve`.
        #[arg(long)]
        field: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        #[arg(long, default_value_t = 4)]
        max_degree: u32,
    },
    /// Jacobi fields on the cylinder from `j:q:amplitude` modes.
    Modes {
        #[arg(long, default_value_t = 3)]
        p: u32,
        #[arg(long, default_value_t = 3)]
        q: u32,
        #[arg(long, default_value_t = 1)]
        ell: usize,
        /// Comma-separated `j:q:amplitude` triples.
        #[arg(long, default_value = "1:0:1")]
        modes: String,
        #[arg(long, default_value = "0.25,0.5,0.75,1")]
        radii: String,
        /// Step in log r for the separated-equation residual.
        #[arg(long, default_value_t = 1e-3)]
        ode_step: f64,
    },
    /// Frequency-profile analyses.
    Growth {
        #[command(subcommand)]
        action: GrowthAction,
    },
    /// Summary of the standard checks; `--all` writes every artifact into `--out`.
    Report {
        #[arg(long)]
        all: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum GrowthAction {
    /// Merged homogeneities `q + (beta_j - beta_1)/2`.
    Ladder {
        #[arg(long, default_value_t = 3)]
        p: u32,
        #[arg(long, default_value_t = 3)]
        q: u32,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(long, default_value_t = 4)]
        max_q: u32,
    },
    /// Smallest second difference of `psi(t) = log avint(e^t)`.
    Convexity {
        /// Comma-separated `exponent:weight` pairs.
        #[arg(long, default_value = "0:1,1:1")]
        terms: String,
        #[arg(long, default_value_t = -8.0, allow_hyphen_values = true)]
        t_min: f64,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        t_max: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
    },
    /// Doubling dichotomy at given or random ratios `Q`.
    Dichotomy {
        #[arg(long, default_value = "0:1,1:1")]
        terms: String,
        /// Comma-separated `Q` values; random draws from the seed when absent.
        #[arg(long)]
        ratios: Option<String>,
        #[arg(long, default_value = "0.125,0.25,0.5,1")]
        rho: String,
        /// Number of random `Q` values.
        #[arg(long, default_value_t = 100)]
        draws: usize,
    },
    /// Two-sided growth bounds `R^(-alpha)` and `R^(-2+alpha)`.
    Gap {
        #[arg(long, default_value = "0.5")]
        alpha: String,
        #[arg(long, default_value = "0.25,0.5,1,2,4,8")]
        radii: String,
    },
    /// Nonnegative fit of sampled values on the exponent ladder.
    Fit {
        /// JSON from `modes`, or CSV with `rho` and a value column.
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, default_value_t = 3)]
        p: u32,
        #[arg(long, default_value_t = 3)]
        q: u32,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(long, default_value_t = 4)]
        max_q: u32,
    },
}

#[derive(Debug)]
enum CliError {
    Config(PathBuf, String),
    Read(PathBuf, std::io::Error),
    Write(PathBuf, std::io::Error),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(p, m) => write!(f, "malformed config {}: {m}", p.display()),
            CliError::Read(p, e) => write!(f, "cannot read {}: {e}", p.display()),
            CliError::Write(p, e) => write!(f, "cannot write {}: {e}", p.display()),
            CliError::Lib(e) if e.is_numerical() => write!(f, "numerical failure: {e}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Run with process stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Run with explicit output streams; returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let argv = match merge_config(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    let matches = match RunConfig::command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let config = match RunConfig::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return 1;
        }
    };
    match execute(&config, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

const GLOBAL_VALUE_FLAGS: [&str; 4] = ["--format", "--out", "--seed", "--config"];

/// Insert `--key value` pairs from the config file after the subcommand path,
/// skipping keys already given on the command line.
fn merge_config(argv: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let strs: Vec<String> = argv
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let mut path = None;
    for (i, a) in strs.iter().enumerate() {
        if a == "--config" {
            path = strs.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path.map(PathBuf::from) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Read(path.clone(), e))?;
    let mut entries = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Config(
                path,
                format!("line {}: expected key = value", n + 1),
            ));
        };
        let key = k.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(CliError::Config(
                path,
                format!("line {}: bad key {:?}", n + 1, k.trim()),
            ));
        }
        entries.push((n + 1, key, v.trim().to_string()));
    }

    // subcommand path: first positional token, plus the action under `growth`
    let root = RunConfig::command();
    let mut insert_at = None;
    let mut scope: Vec<clap::Command> = vec![root.clone()];
    let mut i = 1;
    while i < strs.len() {
        let a = &strs[i];
        if GLOBAL_VALUE_FLAGS.contains(&a.as_str()) {
            i += 2;
            continue;
        }
        if a.starts_with('-') {
            i += 1;
            continue;
        }
        match scope.last().unwrap().find_subcommand(a) {
            Some(sub) => {
                let sub = sub.clone();
                let leaf = !sub.has_subcommands();
                scope.push(sub);
                insert_at = Some(i + 1);
                if leaf {
                    break;
                }
            }
            None => break,
        }
        i += 1;
    }

    let mut all_longs = Vec::new();
    collect_longs(&root, &mut all_longs);
    let mut out = argv.clone();
    let mut extra: Vec<OsString> = Vec::new();
    for (line, key, value) in entries {
        if !all_longs.iter().any(|(l, _)| l == &key) {
            return Err(CliError::Config(
                path,
                format!("line {line}: unknown key {key:?}"),
            ));
        }
        let flag = format!("--{key}");
        if strs
            .iter()
            .any(|a| a == &flag || a.starts_with(&format!("{flag}=")))
        {
            continue;
        }
        let applicable = scope
            .iter()
            .flat_map(|c| c.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()));
        let Some(arg) = applicable else {
            continue;
        };
        if arg.get_action().takes_values() {
            extra.push(flag.into());
            extra.push(value.into());
        } else {
            match value.as_str() {
                "true" | "1" | "yes" => extra.push(flag.into()),
                "false" | "0" | "no" => {}
                other => {
                    return Err(CliError::Config(
                        path,
                        format!("line {line}: {key} expects true or false, got {other:?}"),
                    ));
                }
            }
        }
    }
    let at = insert_at.unwrap_or(out.len());
    out.splice(at..at, extra);
    Ok(out)
}

fn collect_longs(cmd: &clap::Command, acc: &mut Vec<(String, bool)>) {
    for a in cmd.get_arguments() {
        if let Some(l) = a.get_long() {
            acc.push((l.to_string(), a.get_action().takes_values()));
        }
    }
    for s in cmd.get_subcommands() {
        collect_longs(s, acc);
    }
}

fn execute(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    if let Command::Report { all: true } = cfg.command {
        let dir = cfg
            .out
            .clone()
            .ok_or_else(|| Error::Invalid("report --all needs --out <directory>".into()))?;
        let summary = write_report_dir(&dir, cfg.seed)?;
        return emit(cfg, out, &summary);
    }
    let text = match &cfg.command {
        Command::Spectrum { p, q, count } => cmd_spectrum(*p, *q, *count, cfg.format)?,
        Command::Poly {
            ell,
            beta,
            degree,
            p0,
        } => cmd_poly(*ell, beta, *degree, p0.as_deref(), cfg.format)?,
        Command::Solve {
            ell,
            beta,
            grid,
            trace,
            max_iterations,
        } => cmd_solve(
            *ell,
            beta.as_deref(),
            grid,
            trace,
            *max_iterations,
            cfg.format,
        )?,
        Command::Expand {
            field,
            rho,
            max_degree,
        } => cmd_expand(field, *rho, *max_degree, cfg.format)?,
        Command::Modes {
            p,
            q,
            ell,
            modes,
            radii,
            ode_step,
        } => cmd_modes(*p, *q, *ell, modes, radii, *ode_step, cfg.format)?,
        Command::Growth { action } => cmd_growth(action, cfg.seed, cfg.format)?,
        Command::Report { .. } => report_summary(cfg.format)?,
    };
    emit(cfg, out, &text)
}

fn emit(cfg: &RunConfig, out: &mut dyn Write, text: &str) -> CliResult<()> {
    match &cfg.out {
        Some(path) if !matches!(cfg.command, Command::Report { all: true }) => {
            std::fs::write(path, text).map_err(|e| CliError::Write(path.clone(), e))
        }
        _ => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Write(PathBuf::from("<stdout>"), e)),
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Read(path.to_path_buf(), e))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn parse_list(text: &str, what: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad {what} value {s:?}")).into())
        })
        .collect()
}

fn parse_terms(text: &str) -> CliResult<Vec<(f64, f64)>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let bad = || Error::Parse(format!("expected exponent:weight, got {s:?}"));
            let (a, b) = s.split_once(':').ok_or_else(bad)?;
            Ok((
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}

fn parse_grid(text: &str) -> CliResult<GridSpec> {
    let bad = || Error::Parse(format!("grid must be N or NRxNA, got {text:?}"));
    let grid = match text.split_once(['x', 'X']) {
        Some((a, b)) => GridSpec::new(
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        )?,
        None => GridSpec::square(text.trim().parse().map_err(|_| bad())?)?,
    };
    Ok(grid)
}

/// `y^q` for one variable, `|y|^q` (even `q`) or `y_1^q` otherwise.
fn default_leading_layer(ell: usize, q: u32) -> Poly {
    if ell > 1 && q % 2 == 0 {
        return radial_leading_layer(ell, q);
    }
    let mut e = vec![0; ell];
    e[0] = q;
    Poly::monomial(ell, e, BigRational::from_integer(1.into()))
}

fn spectrum_json(cone: &ConeSpec, count: usize) -> Value {
    let st = strict_stability(cone);
    let class = match st.class {
        StabilityClass::StrictlyStable => "strictly_stable",
        StabilityClass::Borderline => "borderline",
        StabilityClass::Unstable => "unstable",
    };
    json!({
        "cone": {"p": cone.p, "q": cone.q, "n": cone.n, "second_ff_sq": cone.second_ff_sq.to_string()},
        "stability": {"class": class, "margin": st.margin.to_string()},
        "levels": spectrum(cone, count).iter().map(|l| l.to_json()).collect::<Vec<_>>(),
    })
}

fn cmd_spectrum(p: u32, q: u32, count: usize, format: Format) -> CliResult<String> {
    if count == 0 {
        return Err(Error::Invalid("count must be positive".into()).into());
    }
    let cone = build_cone(p, q)?;
    Ok(match format {
        Format::Json => pretty(&spectrum_json(&cone, count)),
        Format::Csv => {
            let mut buf = Vec::new();
            write_spectrum_csv(&spectrum(&cone, count), &mut buf).expect("in-memory write");
            String::from_utf8(buf).expect("utf8")
        }
    })
}

fn build_poly(ell: usize, beta: &str, degree: u32, p0: Option<&str>) -> CliResult<BetaPolynomial> {
    if ell == 0 {
        return Err(Error::Invalid("ell must be positive".into()).into());
    }
    let beta = parse_rational(beta)?;
    let lead = match p0 {
        None => default_leading_layer(ell, degree),
        Some(text) => {
            let body = if text.trim_start().starts_with('{') {
                text.to_string()
            } else {
                read(Path::new(text))?
            };
            let wire: PolyWire = serde_json::from_str(&body).map_err(Error::from)?;
            let p = poly_from_terms_wire(ell, &wire.terms)?;
            let d = p.homogeneous_degree()?;
            if !p.is_zero() && d != degree {
                return Err(Error::Invalid(format!(
                    "leading layer has degree {d}, expected {degree}"
                ))
                .into());
            }
            p
        }
    };
    Ok(generate(&beta, ell, &lead)?)
}

fn poly_json(h: &BetaPolynomial) -> Value {
    let mut v = serde_json::to_value(h.to_wire()).expect("serializable");
    let coeffs: Vec<Value> = h
        .full_poly()
        .terms()
        .map(|(e, c)| json!({"r_power": e[0], "y_powers": &e[1..], "coefficient": c.to_string()}))
        .collect();
    v["coefficients"] = Value::Array(coeffs);
    v
}

fn cmd_poly(
    ell: usize,
    beta: &str,
    degree: u32,
    p0: Option<&str>,
    format: Format,
) -> CliResult<String> {
    let h = build_poly(ell, beta, degree, p0)?;
    Ok(match format {
        Format::Json => pretty(&poly_json(&h)),
        Format::Csv => {
            let mut s = String::from("r_power");
            for d in 1..=ell {
                write!(s, ",y{d}_power").unwrap();
            }
            s.push_str(",coefficient\n");
            for (e, c) in h.full_poly().terms() {
                let exps: Vec<String> = e.iter().map(|x| x.to_string()).collect();
                writeln!(s, "{},{c}", exps.join(",")).unwrap();
            }
            s
        }
    })
}

fn load_trace(
    path: &Path,
    ell: Option<usize>,
    beta: Option<&str>,
) -> CliResult<(BoundaryTrace, f64)> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        let h = BetaPolynomial::from_json(&text)?;
        if let Some(l) = ell {
            if l != h.ell() {
                return Err(Error::VariableCount {
                    expected: l,
                    found: h.ell(),
                }
                .into());
            }
        }
        let beta = match beta {
            Some(b) => rational_to_f64(&parse_rational(b)?),
            None => h.beta_f64(),
        };
        Ok((
            BoundaryTrace::from_function(&h, BoundaryTrace::DEFAULT_SAMPLES)?,
            beta,
        ))
    } else {
        let trace = BoundaryTrace::from_csv(&text)?;
        if let Some(l) = ell {
            if l != trace.ell() {
                return Err(Error::VariableCount {
                    expected: l,
                    found: trace.ell(),
                }
                .into());
            }
        }
        let beta =
            beta.ok_or_else(|| Error::Invalid("--beta is required with a sampled trace".into()))?;
        Ok((trace, rational_to_f64(&parse_rational(beta)?)))
    }
}

fn cmd_solve(
    ell: Option<usize>,
    beta: Option<&str>,
    grid: &str,
    trace: &Path,
    max_iterations: Option<usize>,
    format: Format,
) -> CliResult<String> {
    let (trace, beta) = load_trace(trace, ell, beta)?;
    let grid = parse_grid(grid)?;
    let options = SolveOptions {
        max_iterations,
        ..SolveOptions::default()
    };
    let field = solve_dirichlet_with(beta, trace.ell(), &trace, grid, options)?;
    Ok(match format {
        Format::Csv => field.to_csv(),
        Format::Json => {
            let stats = field.solver_stats().expect("solved field");
            let axis = field.axis_regularity();
            pretty(&json!({
                "ell": trace.ell(),
                "beta": beta,
                "n_rho": grid.n_rho,
                "n_angle": grid.n_angle,
                "iterations": stats.iterations,
                "relative_residual": stats.relative_residual,
                "weak_form_residual": field.weak_form_residual(),
                "energy": field.energy(),
                "axis": {"max_radial_slope": axis.max_radial_slope, "even_extension_defect": axis.even_extension_defect},
                "field_csv": field.to_csv(),
            }))
        }
    })
}

fn load_field(path: &Path) -> CliResult<HalfBallField> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text).map_err(Error::from)?;
        let csv = v["field_csv"]
            .as_str()
            .ok_or_else(|| Error::Parse("field JSON lacks \"field_csv\"".into()))?;
        Ok(HalfBallField::from_csv(csv)?)
    } else {
        Ok(HalfBallField::from_csv(&text)?)
    }
}

fn cmd_expand(field: &Path, rho: f64, max_degree: u32, format: Format) -> CliResult<String> {
    let field = load_field(field)?;
    let e = expand_on_sphere(&field, rho, max_degree)?;
    Ok(match format {
        Format::Csv => {
            let mut s = String::from("q,coefficient,norm\n");
            for m in e.modes() {
                writeln!(s, "{},{:?},{:?}", m.q, m.coefficient, m.norm).unwrap();
            }
            s
        }
        Format::Json => pretty(&json!({
            "ell": e.ell(),
            "beta": e.beta(),
            "rho": rho,
            "max_degree": max_degree,
            "modes": e.modes().iter().map(|m| json!({"q": m.q, "coefficient": m.coefficient, "norm": m.norm})).collect::<Vec<_>>(),
            "trace_norm_sq": e.trace_norm_sq(),
            "residual_norm": e.residual_norm(),
        })),
    })
}

fn parse_modes(cone: &ConeSpec, ell: usize, text: &str) -> CliResult<Vec<ModeSpec>> {
    let mut out = Vec::new();
    for item in text.split(',').filter(|s| !s.trim().is_empty()) {
        let bad = || Error::Parse(format!("expected j:q:amplitude, got {item:?}"));
        let parts: Vec<&str> = item.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad().into());
        }
        let j: usize = parts[0].parse().map_err(|_| bad())?;
        let q: u32 = parts[1].parse().map_err(|_| bad())?;
        let a: f64 = parts[2].parse().map_err(|_| bad())?;
        out.push(ModeSpec::from_leading(
            cone,
            j,
            ell,
            &default_leading_layer(ell, q),
            a,
        )?);
    }
    Ok(out)
}

fn modes_value(
    p: u32,
    q: u32,
    ell: usize,
    modes: &str,
    radii: &[f64],
    ode_step: f64,
) -> CliResult<(Value, String)> {
    let cone = build_cone(p, q)?;
    let spec = JacobiFieldSpec::new(cone.clone(), ell, parse_modes(&cone, ell, modes)?)?;
    let avint = avint_profile(&spec, radii)?;
    let fields = synthesize(&spec);
    let grid = OdeGrid::new(spec.r_range().0, spec.r_range().1, ode_step);
    let mut components = Vec::new();
    for c in fields.components() {
        let residual = separated_ode_residual(c, &cone, c.level, &grid)?;
        let h = mode_projection_transform(c, &cone, c.level)?;
        components.push(json!({
            "j": c.level,
            "gamma": c.gamma,
            "beta": h.beta.to_string(),
            "ode_residual": residual,
            "beta_harmonic": h.symbolic_check(),
        }));
    }
    let rows: Vec<Value> = avint
        .rows
        .iter()
        .map(|r| json!({"rho": r.rho, "avint_analytic": r.analytic, "avint_quadrature": r.quadrature, "relative_gap": r.relative_gap}))
        .collect();
    let v = json!({
        "cone": {"p": p, "q": q, "n": cone.n},
        "ell": ell,
        "modes": modes,
        "components": components,
        "profile": serde_json::to_value(&avint.profile).expect("serializable"),
        "rows": rows,
    });
    let mut buf = Vec::new();
    avint.write_csv(&mut buf).expect("in-memory write");
    Ok((v, String::from_utf8(buf).expect("utf8")))
}

fn cmd_modes(
    p: u32,
    q: u32,
    ell: usize,
    modes: &str,
    radii: &str,
    ode_step: f64,
    format: Format,
) -> CliResult<String> {
    let (v, csv) = modes_value(p, q, ell, modes, &parse_list(radii, "radius")?, ode_step)?;
    Ok(match format {
        Format::Json => pretty(&v),
        Format::Csv => csv,
    })
}

/// `(rho, value)` samples from `modes` JSON, a sampled-profile JSON or a CSV.
fn load_samples(path: &Path) -> CliResult<GrowthProfile> {
    let text = read(path)?;
    let points: Vec<(f64, f64)> = if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text).map_err(Error::from)?;
        if let Some(rows) = v["rows"].as_array() {
            rows.iter()
                .map(|r| (r["rho"].as_f64(), r["avint_quadrature"].as_f64()))
                .map(|(a, b)| {
                    a.zip(b)
                        .ok_or_else(|| Error::Parse("bad row in samples".into()))
                })
                .collect::<Result<_, _>>()?
        } else if let Some(pts) = v["data"]["points"].as_array() {
            pts.iter()
                .map(|p| (p[0].as_f64(), p[1].as_f64()))
                .map(|(a, b)| {
                    a.zip(b)
                        .ok_or_else(|| Error::Parse("bad point in samples".into()))
                })
                .collect::<Result<_, _>>()?
        } else {
            return Err(
                Error::Parse("samples JSON needs \"rows\" or \"data.points\"".into()).into(),
            );
        }
    } else {
        let mut lines = text
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
        let header: Vec<&str> = lines
            .next()
            .ok_or_else(|| Error::Parse("empty samples file".into()))?
            .split(',')
            .map(str::trim)
            .collect();
        let rho_col = header.iter().position(|h| *h == "rho");
        let val_col = ["avint_quadrature", "value", "avint_analytic"]
            .iter()
            .find_map(|name| header.iter().position(|h| h == name));
        let (Some(rc), Some(vc)) = (rho_col, val_col) else {
            return Err(Error::Parse("samples CSV needs rho and value columns".into()).into());
        };
        lines
            .map(|l| {
                let cells: Vec<&str> = l.split(',').map(str::trim).collect();
                let get = |i: usize| {
                    cells
                        .get(i)
                        .and_then(|c| c.parse::<f64>().ok())
                        .ok_or_else(|| Error::Parse(format!("bad samples row {l:?}")))
                };
                Ok((get(rc)?, get(vc)?))
            })
            .collect::<Result<_, Error>>()?
    };
    Ok(GrowthProfile::sampled(points, path.display().to_string())?)
}

fn ladder_exponents(
    p: u32,
    q: u32,
    levels: usize,
    max_q: u32,
) -> CliResult<Vec<crate::growth::LadderRung>> {
    if levels == 0 {
        return Err(Error::Invalid("levels must be positive".into()).into());
    }
    let cone = build_cone(p, q)?;
    Ok(exponent_ladder(&spectrum(&cone, levels), max_q)?)
}

/// `count` ratios `Q` drawn log-uniformly from `(1, 4^(top + 1))` outside the guard bands.
fn random_ratios(profile: &GrowthProfile, count: usize, seed: u64) -> Vec<f64> {
    let top = profile.active_exponents().last().copied().unwrap_or(0.0);
    let hi = (top + 1.0) * 4f64.ln();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let q = rng.gen_range(0.0..hi).exp();
        if check_allowed_ratio(profile, q).is_ok() {
            out.push(q);
        }
    }
    out
}

fn dichotomy_rows(
    profile: &GrowthProfile,
    ratios: &[f64],
    radii: &[f64],
) -> CliResult<Vec<crate::growth::Dichotomy>> {
    let mut rows = Vec::with_capacity(ratios.len() * radii.len());
    for &q in ratios {
        for &rho in radii {
            rows.push(doubling_dichotomy(profile, q, rho)?);
        }
    }
    Ok(rows)
}

fn cmd_growth(action: &GrowthAction, seed: u64, format: Format) -> CliResult<String> {
    match action {
        GrowthAction::Ladder {
            p,
            q,
            levels,
            max_q,
        } => {
            let rungs = ladder_exponents(*p, *q, *levels, *max_q)?;
            Ok(match format {
                Format::Json => pretty(&serde_json::to_value(&rungs).expect("serializable")),
                Format::Csv => {
                    let mut s = String::from("exponent,exact,sources\n");
                    for r in &rungs {
                        let src: Vec<String> =
                            r.sources.iter().map(|(j, q)| format!("{j}:{q}")).collect();
                        let exact = r.exact.as_ref().map(|e| e.to_string()).unwrap_or_default();
                        writeln!(s, "{:?},{exact},{}", r.exponent, src.join(" ")).unwrap();
                    }
                    s
                }
            })
        }
        GrowthAction::Convexity {
            terms,
            t_min,
            t_max,
            step,
        } => {
            let profile = GrowthProfile::analytic(parse_terms(terms)?, "command line")?;
            let grid = TGrid {
                t_min: *t_min,
                t_max: *t_max,
                step: *step,
            };
            let min = psi_convexity(&profile, Some(grid))?;
            Ok(match format {
                Format::Json => pretty(
                    &json!({"profile": profile, "min_second_difference": min, "convex": min >= -1e-9}),
                ),
                Format::Csv => format!("min_second_difference,convex\n{min:?},{}\n", min >= -1e-9),
            })
        }
        GrowthAction::Dichotomy {
            terms,
            ratios,
            rho,
            draws,
        } => {
            let profile = GrowthProfile::analytic(parse_terms(terms)?, "command line")?;
            let ratios = match ratios {
                Some(t) => parse_list(t, "ratio")?,
                None => random_ratios(&profile, *draws, seed),
            };
            let rows = dichotomy_rows(&profile, &ratios, &parse_list(rho, "radius")?)?;
            Ok(match format {
                Format::Json => pretty(&json!({
                    "profile": profile,
                    "rows": rows,
                    "counterexamples": rows.iter().filter(|r| !r.consistent()).count(),
                })),
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_dichotomy_csv(&rows, &mut buf).expect("in-memory write");
                    String::from_utf8(buf).expect("utf8")
                }
            })
        }
        GrowthAction::Gap { alpha, radii } => {
            let report = liouville_gap(&Alpha::parse(alpha)?, &parse_list(radii, "radius")?)?;
            Ok(match format {
                Format::Json => {
                    let mut v = serde_json::to_value(&report).expect("serializable");
                    v["summary"] = Value::String(report.summary());
                    pretty(&v)
                }
                Format::Csv => {
                    let mut s = format!("# {}\nR,lower,upper,feasible\n", report.summary());
                    for g in &report.samples {
                        writeln!(s, "{:?},{:?},{:?},{}", g.r, g.lower, g.upper, g.feasible)
                            .unwrap();
                    }
                    s
                }
            })
        }
        GrowthAction::Fit {
            samples,
            p,
            q,
            levels,
            max_q,
        } => {
            let data = load_samples(samples)?;
            let ladder: Vec<f64> = ladder_exponents(*p, *q, *levels, *max_q)?
                .iter()
                .map(|r| r.exponent)
                .collect();
            let fit = fit_exponents(&data, &ladder)?;
            Ok(match format {
                Format::Json => pretty(&serde_json::to_value(&fit).expect("serializable")),
                Format::Csv => {
                    let mut s = String::from("exponent,weight\n");
                    for (e, w) in fit.exponents.iter().zip(&fit.weights) {
                        writeln!(s, "{e:?},{w:?}").unwrap();
                    }
                    s
                }
            })
        }
    }
}

fn report_value() -> CliResult<Value> {
    let cone = ConeSpec::simons();
    let h2 = build_poly(1, "1", 2, None)?;
    let gap = liouville_gap(&Alpha::parse("0.5")?, &[0.5, 1.0, 2.0])?;
    Ok(json!({
        "spectrum": spectrum_json(&cone, 5),
        "h2": h2.full_poly().to_string(),
        "liouville": gap.summary(),
    }))
}

fn report_summary(format: Format) -> CliResult<String> {
    let v = report_value()?;
    Ok(match format {
        Format::Json => pretty(&v),
        Format::Csv => {
            let mut s = String::from("item,value\n");
            writeln!(s, "h2,{}", v["h2"].as_str().unwrap()).unwrap();
            writeln!(s, "liouville,{}", v["liouville"].as_str().unwrap()).unwrap();
            writeln!(
                s,
                "stability_margin,{}",
                v["spectrum"]["stability"]["margin"].as_str().unwrap()
            )
            .unwrap();
            s
        }
    })
}

/// Every standard artifact for the Simons cone, written into `dir`.
fn write_report_dir(dir: &Path, seed: u64) -> CliResult<String> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Write(dir.to_path_buf(), e))?;
    let put = |name: &str, text: &str| -> CliResult<String> {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| CliError::Write(path, e))?;
        Ok(name.to_string())
    };
    let mut files = Vec::new();
    files.push(put("spectrum.csv", &cmd_spectrum(3, 3, 10, Format::Csv)?)?);
    files.push(put(
        "spectrum.json",
        &cmd_spectrum(3, 3, 10, Format::Json)?,
    )?);
    let h2 = build_poly(1, "1", 2, None)?;
    files.push(put("h2.json", &pretty(&poly_json(&h2)))?);
    let trace = BoundaryTrace::from_function(&h2, BoundaryTrace::DEFAULT_SAMPLES)?;
    let field = solve_dirichlet(1.0, 1, &trace, GridSpec::square(64)?)?;
    files.push(put("h2_field.csv", &field.to_csv())?);
    let e = expand_on_sphere(&field, 0.5, 6)?;
    let mut exp = String::from("q,coefficient,norm\n");
    for m in e.modes() {
        writeln!(exp, "{},{:?},{:?}", m.q, m.coefficient, m.norm).unwrap();
    }
    files.push(put("h2_expansion.csv", &exp)?);
    let radii: Vec<f64> = (1..=16).map(|i| i as f64 / 16.0).collect();
    let (modes_json, avint_csv) = modes_value(3, 3, 1, "1:0:1,1:1:0.5,2:0:0.25", &radii, 1e-3)?;
    files.push(put("avint.csv", &avint_csv)?);
    files.push(put("modes.json", &pretty(&modes_json))?);
    let ladder = ladder_exponents(3, 3, 2, 4)?;
    files.push(put(
        "ladder.json",
        &pretty(&serde_json::to_value(&ladder).expect("serializable")),
    )?);
    let exps: Vec<(f64, f64)> = ladder.iter().take(4).map(|r| (r.exponent, 1.0)).collect();
    let profile = GrowthProfile::analytic(exps, "report ladder")?;
    let rows = dichotomy_rows(
        &profile,
        &random_ratios(&profile, 100, seed),
        &[0.125, 0.25, 0.5, 1.0],
    )?;
    let mut buf = Vec::new();
    write_dichotomy_csv(&rows, &mut buf).expect("in-memory write");
    files.push(put(
        "dichotomy.csv",
        &String::from_utf8(buf).expect("utf8"),
    )?);
    let mut psi = String::from("t,psi\n");
    for i in 0..=200 {
        let t = -8.0 + 0.05 * i as f64;
        writeln!(psi, "{t:?},{:?}", profile.psi(t)).unwrap();
    }
    files.push(put("psi.csv", &psi)?);
    let gap = liouville_gap(&Alpha::parse("0.5")?, &[0.25, 0.5, 1.0, 2.0, 4.0, 8.0])?;
    files.push(put(
        "liouville.json",
        &pretty(&serde_json::to_value(&gap).expect("serializable")),
    )?);
    let mut v = report_value()?;
    v["seed"] = json!(seed);
    v["counterexamples"] = json!(rows.iter().filter(|r| !r.consistent()).count());
    v["files"] = json!(files);
    let summary = pretty(&v);
    put("summary.json", &summary)?;
    Ok(summary)
}
