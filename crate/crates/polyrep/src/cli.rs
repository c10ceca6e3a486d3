//! Command-line front end.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use polyrep_core::bifurcation::{self, ScanWarning};
use polyrep_core::equilibria::{self, Equilibrium};
use polyrep_core::flow::{self, FlowOptions, Section, Trajectory};
use polyrep_core::geometry::{self, HomoclinicOptions, ManifoldTrace, TraceVerdict};
use polyrep_core::linalg::{self, Vec3};
use polyrep_core::lyapunov::{self, LyapunovParams, LyapunovSpectrum};
use polyrep_core::{CubeState, EquilibriumName, Error, ParameterRange, MU_MAX, MU_MIN};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::gallery;
use crate::output::{json_bytes, num, Destination, Format, Table};
use crate::pool;

#[derive(Debug, Parser)]
#[command(
    name = "polyrep",
    version,
    about = "Numerical laboratory for a one-parameter polymatrix replicator on the cube",
    args_override_self = true,
    allow_negative_numbers = true
)]
pub struct Cli {
    /// Key-value file with default flags; command-line flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output format (each command has its own default).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when omitted or `-`.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Lower end of the accepted parameter range.
    #[arg(long, global = true, default_value_t = MU_MIN, value_name = "MU")]
    pub mu_min: f64,
    /// Upper end of the accepted parameter range.
    #[arg(long, global = true, default_value_t = MU_MAX, value_name = "MU")]
    pub mu_max: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equilibria with eigenvalues and classification.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Equilibria(EquilibriaArgs),
    /// Eigenvalues and eigenvectors at one equilibrium.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Eigen(EigenArgs),
    /// Detects and refines bifurcation events over a parameter range.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    ScanBifurcations(ScanArgs),
    /// Case label of a parameter value.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    ClassifyCase(ClassifyArgs),
    /// Integrates one orbit.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Integrate(IntegrateArgs),
    /// Lyapunov spectrum at one parameter, or the chaos onset estimate.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Lyapunov(LyapunovArgs),
    /// Lyapunov spectra over a parameter grid, computed in parallel.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Sweep(SweepArgs),
    /// Traces invariant manifolds of the interior equilibrium, or runs a probe.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Manifolds(ManifoldsArgs),
    /// Distance between the stable and unstable manifolds of O on a section.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Homoclinic(HomoclinicArgs),
    /// Poincaré return map on a section.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Poincare(PoincareArgs),
    /// Writes the dataset bundle of a figure preset.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Gallery(GalleryArgs),
}

pub const SUBCOMMANDS: [&str; 11] = [
    "equilibria",
    "eigen",
    "scan-bifurcations",
    "classify-case",
    "integrate",
    "lyapunov",
    "sweep",
    "manifolds",
    "homoclinic",
    "poincare",
    "gallery",
];

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected `x,y,z`, got `{s}`"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(parts) {
        *slot = p.parse().map_err(|_| format!("`{p}` is not a number"))?;
    }
    Ok(v)
}

fn parse_name(s: &str) -> Result<EquilibriumName, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct MuArg {
    /// Parameter value.
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
}

#[derive(Debug, Clone, Args)]
pub struct FlowArgs {
    /// Relative integration tolerance.
    #[arg(long, default_value_t = flow::DEFAULT_RTOL)]
    pub rtol: f64,
    /// Absolute integration tolerance.
    #[arg(long, default_value_t = flow::DEFAULT_ATOL)]
    pub atol: f64,
}

impl FlowArgs {
    fn options(&self) -> Result<FlowOptions, AppError> {
        positive("rtol", self.rtol)?;
        positive("atol", self.atol)?;
        Ok(FlowOptions { rtol: self.rtol, atol: self.atol, ..FlowOptions::default() })
    }
}

/// Initial condition: an explicit point, the scheme next to O, or an
/// equilibrium plus an offset. The scheme is the default.
#[derive(Debug, Clone, Args)]
pub struct StartArgs {
    /// Explicit initial point.
    #[arg(long, value_parser = parse_vec3, value_name = "X,Y,Z", conflicts_with_all = ["scheme", "equilibrium"])]
    pub point: Option<Vec3>,
    /// Start at O plus the standard small offset.
    #[arg(long)]
    pub scheme: bool,
    /// Size of the scheme offset.
    #[arg(long, default_value_t = lyapunov::DEFAULT_EPS)]
    pub eps: f64,
    /// Start at this equilibrium plus `--offset`.
    #[arg(long, value_parser = parse_name, conflicts_with = "scheme")]
    pub equilibrium: Option<EquilibriumName>,
    /// Offset added to `--equilibrium`.
    #[arg(long, value_parser = parse_vec3, value_name = "DX,DY,DZ", requires = "equilibrium", allow_hyphen_values = true)]
    pub offset: Option<Vec3>,
}

impl StartArgs {
    fn resolve(&self, mu: f64) -> Result<CubeState, AppError> {
        if let Some(p) = self.point {
            return Ok(CubeState::from(p));
        }
        if let Some(name) = self.equilibrium {
            let e = equilibria::location(name, mu)?;
            let d = self.offset.unwrap_or([0.0; 3]);
            return Ok(CubeState::from(linalg::add(&e.to_array(), &d)));
        }
        positive("eps", self.eps)?;
        Ok(lyapunov::initial_condition(mu, self.eps)?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SectionArgs {
    /// Point on the section plane (default: O).
    #[arg(long, value_parser = parse_vec3, value_name = "X,Y,Z", requires = "section_normal")]
    pub section_point: Option<Vec3>,
    /// Normal of the section plane (default: the plane through the edge, face and interior equilibria).
    #[arg(long, value_parser = parse_vec3, value_name = "A,B,C", requires = "section_point", allow_hyphen_values = true)]
    pub section_normal: Option<Vec3>,
}

impl SectionArgs {
    fn resolve(&self, mu: f64) -> Result<Section, AppError> {
        match (self.section_point, self.section_normal) {
            (Some(p), Some(n)) => Ok(Section::new(p, n)?),
            _ => Ok(Section::default_for(mu)?),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct LeArgs {
    /// Total integration time.
    #[arg(long, default_value_t = lyapunov::DEFAULT_T)]
    pub horizon: f64,
    /// Initial time excluded from the averages.
    #[arg(long, default_value_t = lyapunov::DEFAULT_DISCARD)]
    pub discard: f64,
    /// Time between re-orthonormalisations.
    #[arg(long, default_value_t = lyapunov::DEFAULT_RENORM_DT)]
    pub renorm_dt: f64,
    #[command(flatten)]
    pub flow: FlowArgs,
}

impl LeArgs {
    fn params(&self) -> Result<LyapunovParams, AppError> {
        positive("horizon", self.horizon)?;
        positive("renorm-dt", self.renorm_dt)?;
        Ok(LyapunovParams {
            t: self.horizon,
            discard: self.discard,
            renorm_dt: self.renorm_dt,
            flow: self.flow.options()?,
        })
    }
}

#[derive(Debug, Args)]
pub struct EquilibriaArgs {
    #[command(flatten)]
    pub mu: MuArg,
    /// Include formal equilibria outside the cube.
    #[arg(long)]
    pub all: bool,
    /// Use the multistart Newton finder instead of the closed forms.
    #[arg(long, conflicts_with = "all")]
    pub numeric: bool,
    /// Seeds per axis for `--numeric`.
    #[arg(long, default_value_t = 10)]
    pub density: usize,
}

#[derive(Debug, Args)]
pub struct EigenArgs {
    #[command(flatten)]
    pub mu: MuArg,
    /// Equilibrium name (v1..v8, A1..A4, B1..B3, O).
    #[arg(long, value_parser = parse_name, required_unless_present = "point")]
    pub name: Option<EquilibriumName>,
    /// Arbitrary rest point instead of a named one.
    #[arg(long, value_parser = parse_vec3, value_name = "X,Y,Z", conflicts_with = "name")]
    pub point: Option<Vec3>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Start of the scanned range.
    #[arg(long, default_value_t = MU_MIN)]
    pub from: f64,
    /// End of the scanned range.
    #[arg(long, default_value_t = MU_MAX)]
    pub to: f64,
    /// Grid spacing of the scan.
    #[arg(long, default_value_t = bifurcation::DEFAULT_STEP)]
    pub step: f64,
    /// Refinement tolerance.
    #[arg(long, default_value_t = bifurcation::DEFAULT_TOL)]
    pub tol: f64,
    /// Keep only events of this kind.
    #[arg(long, value_parser = ["transcritical", "hopf", "belyakov", "cube-entry-exit"])]
    pub kind: Option<String>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub mu: MuArg,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub mu: MuArg,
    #[command(flatten)]
    pub start: StartArgs,
    /// Final time; negative values integrate backward.
    #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
    pub t_end: f64,
    /// Sample the dense output every `dt` instead of storing every step.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Keep every n-th sample.
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    #[command(flatten)]
    pub flow: FlowArgs,
}

#[derive(Debug, Args)]
pub struct LyapunovArgs {
    /// Parameter value.
    #[arg(long, required_unless_present = "mu_sa")]
    pub mu: Option<f64>,
    /// Estimate the onset of a positive top exponent instead.
    #[arg(long, conflicts_with = "mu")]
    pub mu_sa: bool,
    /// Lower end of the onset search.
    #[arg(long, default_value_t = 0.0)]
    pub from: f64,
    /// Upper end of the onset search.
    #[arg(long, default_value_t = 3.0)]
    pub to: f64,
    /// Bisection tolerance of the onset search.
    #[arg(long, default_value_t = 0.05)]
    pub tol: f64,
    /// Spacing of the upward pre-scan of the onset search.
    #[arg(long, default_value_t = 0.05)]
    pub scan_step: f64,
    #[command(flatten)]
    pub start: StartArgs,
    #[command(flatten)]
    pub le: LeArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// First parameter value.
    #[arg(long, default_value_t = MU_MIN)]
    pub from: f64,
    /// Last parameter value.
    #[arg(long, default_value_t = MU_MAX)]
    pub to: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    /// Also write the JSON summary to this file.
    #[arg(long, value_name = "PATH")]
    pub summary: Option<PathBuf>,
    #[command(flatten)]
    pub le: LeArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Branches {
    Unstable,
    Stable,
    Both,
}

#[derive(Debug, Args)]
pub struct ManifoldsArgs {
    #[command(flatten)]
    pub mu: MuArg,
    /// Which manifolds of O to trace.
    #[arg(long, value_enum, default_value_t = Branches::Both)]
    pub branches: Branches,
    /// Number of seeds on the unstable circle.
    #[arg(long, default_value_t = 16)]
    pub seeds: usize,
    /// Integration time of each trace (backward for stable branches).
    #[arg(long, default_value_t = 200.0)]
    pub t_end: f64,
    /// Distance of the seeds from the equilibrium.
    #[arg(long, default_value_t = geometry::SEED_RADIUS)]
    pub radius: f64,
    /// Keep every n-th trace point in the CSV.
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// Heteroclinic probe SOURCE:TARGET instead of traces.
    #[arg(long, value_name = "SOURCE:TARGET", conflicts_with = "edge")]
    pub probe: Option<String>,
    /// Edge-closure probe A:B:TARGET around the edge [A,B] instead of traces.
    #[arg(long, value_name = "A:B:TARGET")]
    pub edge: Option<String>,
    /// Hit threshold of the probes.
    #[arg(long, default_value_t = geometry::TOL_HIT)]
    pub tol_hit: f64,
    /// Also write the JSON verdict summary to this file.
    #[arg(long, value_name = "PATH")]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HomoclinicArgs {
    #[command(flatten)]
    pub mu: MuArg,
    /// Number of seeds on the unstable circle.
    #[arg(long, default_value_t = HomoclinicOptions::default().n_seeds)]
    pub seeds: usize,
    /// Distance of the seeds from O.
    #[arg(long, default_value_t = geometry::SEED_RADIUS)]
    pub radius: f64,
    /// Forward horizon of the unstable traces.
    #[arg(long, default_value_t = HomoclinicOptions::default().unstable_horizon)]
    pub unstable_horizon: f64,
    /// Backward horizon of the stable branches.
    #[arg(long, default_value_t = HomoclinicOptions::default().stable_horizon)]
    pub stable_horizon: f64,
    #[command(flatten)]
    pub section: SectionArgs,
}

#[derive(Debug, Args)]
pub struct PoincareArgs {
    #[command(flatten)]
    pub mu: MuArg,
    #[command(flatten)]
    pub start: StartArgs,
    #[command(flatten)]
    pub section: SectionArgs,
    /// Number of returns to record.
    #[arg(long, default_value_t = 200)]
    pub returns: usize,
    /// Time before returns are recorded.
    #[arg(long, default_value_t = 500.0)]
    pub transient: f64,
    /// Give up after this much time.
    #[arg(long, default_value_t = 1e5)]
    pub t_max: f64,
    /// Linking distance used to count clusters of return points.
    #[arg(long, default_value_t = 1e-3)]
    pub cluster_tol: f64,
    /// Also write the JSON summary to this file.
    #[arg(long, value_name = "PATH")]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GalleryArgs {
    /// Preset name, e.g. `mu=3.6` or `case=IV`.
    #[arg(long, required_unless_present = "list")]
    pub preset: Option<String>,
    /// Directory receiving the bundle.
    #[arg(long, required_unless_present = "list")]
    pub out_dir: Option<PathBuf>,
    /// Print the preset names and exit.
    #[arg(long)]
    pub list: bool,
}

/// Failure of a command, mapped onto the process exit status.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Numerical(String),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_UNDETERMINED: i32 = 3;

/// Exit status for a core error.
pub fn exit_code_of(e: &Error) -> i32 {
    match e {
        Error::Undetermined(_) | Error::CaseBoundary { .. } | Error::InsufficientReturns { .. } => EXIT_UNDETERMINED,
        Error::StepSizeUnderflow { .. }
        | Error::MaxStepsExceeded { .. }
        | Error::InvarianceViolation { .. }
        | Error::NoSignChange { .. }
        | Error::NotAnEquilibrium { .. } => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => EXIT_USAGE,
            AppError::Core(e) => exit_code_of(e),
            AppError::Io(_) | AppError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<(), AppError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(AppError::Usage(format!("--{name} must be positive, got {v}")))
    }
}

/// Bytes of the main output plus the exit status to report after writing.
struct Rendered {
    bytes: Vec<u8>,
    status: i32,
}

impl Rendered {
    fn ok(bytes: Vec<u8>) -> Self {
        Self { bytes, status: EXIT_OK }
    }
}

struct Ctx {
    format: Option<Format>,
    range: ParameterRange,
}

impl Ctx {
    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn mu(&self, mu: f64) -> Result<f64, AppError> {
        Ok(self.range.check(mu)?)
    }
}

/// Runs a parsed command line and returns the exit status.
pub fn run(cli: Cli) -> Result<i32, AppError> {
    let range = ParameterRange::new(cli.mu_min, cli.mu_max)?;
    let ctx = Ctx { format: cli.format, range };
    let dest = Destination::from_option(cli.output.as_deref());
    let r = match &cli.command {
        Command::Equilibria(a) => equilibria_cmd(&ctx, a)?,
        Command::Eigen(a) => eigen_cmd(&ctx, a)?,
        Command::ScanBifurcations(a) => scan_cmd(&ctx, a)?,
        Command::ClassifyCase(a) => classify_cmd(&ctx, a)?,
        Command::Integrate(a) => integrate_cmd(&ctx, a)?,
        Command::Lyapunov(a) => lyapunov_cmd(&ctx, a)?,
        Command::Sweep(a) => sweep_cmd(&ctx, a)?,
        Command::Manifolds(a) => manifolds_cmd(&ctx, a)?,
        Command::Homoclinic(a) => homoclinic_cmd(&ctx, a)?,
        Command::Poincare(a) => poincare_cmd(&ctx, a)?,
        Command::Gallery(a) => gallery_cmd(a)?,
    };
    dest.write(&r.bytes)?;
    Ok(r.status)
}

const EIGEN_COLUMNS: [&str; 6] = ["re1", "im1", "re2", "im2", "re3", "im3"];

fn eigen_cells(e: &equilibria::EigenData) -> Vec<String> {
    e.eigenvalues.iter().flat_map(|l| [num(l.re), num(l.im)]).collect()
}

fn eigen_json(e: &equilibria::EigenData) -> Value {
    json!(e.eigenvalues.iter().map(|l| json!({"re": l.re, "im": l.im})).collect::<Vec<_>>())
}

/// Eigen data from the Jacobian at a closed-form location, formal points included.
fn jacobian_eigen(mu: f64, p: CubeState) -> equilibria::EigenData {
    let (eigenvalues, eigenvectors) = linalg::eigen_decomposition(&polyrep_core::cube::jacobian(mu, p));
    equilibria::EigenData {
        eigenvalues,
        eigenvectors,
        classification: equilibria::classify(&eigenvalues, &eigenvectors),
    }
}

fn equilibria_cmd(ctx: &Ctx, a: &EquilibriaArgs) -> Result<Rendered, AppError> {
    let mu = ctx.mu(a.mu.mu)?;
    let rows: Vec<(String, CubeState, bool)> = if a.numeric {
        let named = equilibria::closed_form_equilibria(mu);
        equilibria::numeric_equilibria(mu, a.density)?
            .points
            .into_iter()
            .map(|p| {
                let name = named
                    .iter()
                    .filter(|e| e.location.distance(&p) < 1e-6)
                    .map(|e| e.name.to_string())
                    .next()
                    .unwrap_or_else(|| "?".into());
                (name, p, true)
            })
            .collect()
    } else {
        equilibria::closed_form_equilibria(mu)
            .into_iter()
            .filter(|e: &Equilibrium| a.all || e.in_cube)
            .map(|e| (e.name.to_string(), e.location, e.in_cube))
            .collect()
    };
    let data: Vec<_> = rows.iter().map(|(_, p, _)| jacobian_eigen(mu, *p)).collect();
    let bytes = match ctx.format(Format::Csv) {
        Format::Csv => {
            let mut header = vec!["name", "mu", "x", "y", "z", "in_cube"];
            header.extend(EIGEN_COLUMNS);
            header.push("classification");
            let mut t = Table::new(&header);
            for ((name, p, inside), e) in rows.iter().zip(&data) {
                let mut r = vec![name.clone(), num(mu), num(p.x), num(p.y), num(p.z), inside.to_string()];
                r.extend(eigen_cells(e));
                r.push(e.classification.to_string());
                t.push(r);
            }
            t.to_bytes()
        }
        Format::Json => json_bytes(
            &rows
                .iter()
                .zip(&data)
                .map(|((name, p, inside), e)| {
                    json!({
                        "name": name, "mu": mu, "x": p.x, "y": p.y, "z": p.z, "in_cube": inside,
                        "eigenvalues": eigen_json(e), "classification": e.classification.as_str(),
                    })
                })
                .collect::<Vec<_>>(),
        ),
    };
    Ok(Rendered::ok(bytes))
}

fn eigen_cmd(ctx: &Ctx, a: &EigenArgs) -> Result<Rendered, AppError> {
    let mu = ctx.mu(a.mu.mu)?;
    let (label, p) = match (a.name, a.point) {
        (Some(n), _) => (n.to_string(), equilibria::location(n, mu)?),
        (None, Some(p)) => ("point".to_string(), CubeState::from(p)),
        (None, None) => return Err(AppError::Usage("give --name or --point".into())),
    };
    let e = equilibria::eigen_analysis(mu, p)?;
    let bytes = match ctx.format(Format::Csv) {
        Format::Csv => {
            let mut t = Table::new(&[
                "name",
                "mu",
                "k",
                "re",
                "im",
                "v1_re",
                "v1_im",
                "v2_re",
                "v2_im",
                "v3_re",
                "v3_im",
                "classification",
            ]);
            for (k, (l, v)) in e.eigenvalues.iter().zip(&e.eigenvectors).enumerate() {
                let mut r = vec![label.clone(), num(mu), (k + 1).to_string(), num(l.re), num(l.im)];
                r.extend(v.iter().flat_map(|c| [num(c.re), num(c.im)]));
                r.push(e.classification.to_string());
                t.push(r);
            }
            t.to_bytes()
        }
        Format::Json => json_bytes(&json!({
            "name": label, "mu": mu, "x": p.x, "y": p.y, "z": p.z,
            "eigenvalues": eigen_json(&e),
            "eigenvectors": e.eigenvectors.iter()
                .map(|v| v.iter().map(|c| json!({"re": c.re, "im": c.im})).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "classification": e.classification.as_str(),
        })),
    };
    Ok(Rendered::ok(bytes))
}

fn scan_cmd(ctx: &Ctx, a: &ScanArgs) -> Result<Rendered, AppError> {
    positive("step", a.step)?;
    positive("tol", a.tol)?;
    let report = bifurcation::scan(a.from, a.to, a.step, a.tol)?;
    for w in &report.warnings {
        match w {
            ScanWarning::UnexplainedStabilityChange { equilibrium, bracket } => eprintln!(
                "warning: unexplained stability change of {equilibrium} in [{}, {}]",
                num(bracket.0),
                num(bracket.1)
            ),
            ScanWarning::ZeroEigenvalueWithoutCollision { equilibrium, mu } => {
                eprintln!("warning: zero eigenvalue of {equilibrium} without a partner at {}", num(*mu))
            }
        }
    }
    let events: Vec<_> =
        report.events.iter().filter(|e| a.kind.as_deref().map_or(true, |k| e.kind.as_str() == k)).collect();
    let bytes = match ctx.format(Format::Json) {
        Format::Json => json_bytes(
            &events
                .iter()
                .map(|e| {
                    json!({
                        "kind": e.kind.as_str(),
                        "equilibrium": e.equilibrium.as_str(),
                        "partner": e.partner.map(|p| p.as_str()),
                        "mu_star": e.mu_star,
                        "bracket": [e.bracket.0, e.bracket.1],
                        "tol": e.tol,
                    })
                })
                .collect::<Vec<_>>(),
        ),
        Format::Csv => {
            let mut t = Table::new(&["kind", "equilibrium", "partner", "mu_star", "lo", "hi", "tol"]);
            for e in events {
                t.push(vec![
                    e.kind.to_string(),
                    e.equilibrium.to_string(),
                    e.partner.map_or(String::new(), |p| p.to_string()),
                    num(e.mu_star),
                    num(e.bracket.0),
                    num(e.bracket.1),
                    num(e.tol),
                ]);
            }
            t.to_bytes()
        }
    };
    Ok(Rendered::ok(bytes))
}

fn classify_cmd(ctx: &Ctx, a: &ClassifyArgs) -> Result<Rendered, AppError> {
    let mu = ctx.mu(a.mu.mu)?;
    let case = bifurcation::classify_case(mu)?;
    let bytes = match ctx.format(Format::Json) {
        Format::Json => json_bytes(&json!({"mu": mu, "case": case.as_str()})),
        Format::Csv => {
            let mut t = Table::new(&["mu", "case"]);
            t.push(vec![num(mu), case.to_string()]);
            t.to_bytes()
        }
    };
    Ok(Rendered::ok(bytes))
}

fn trajectory_table(traj: &Trajectory) -> Table {
    let mut t = Table::new(&["t", "x", "y", "z"]);
    for (ti, p) in traj.times.iter().zip(&traj.states) {
        t.push(vec![num(*ti), num(p.x), num(p.y), num(p.z)]);
    }
    t
}

fn integrate_cmd(ctx: &Ctx, a: &IntegrateArgs) -> Result<Rendered, AppError> {
    let mu = ctx.mu(a.mu.mu)?;
    let p0 = a.start.resolve(mu)?;
    let opts = a.flow.options()?;
    if a.stride == 0 {
        return Err(AppError::Usage("--stride must be at least 1".into()));
    }
    let traj = match a.dt {
        Some(dt) => {
            positive("dt", dt)?;
            flow::integrate_sampled(mu, p0, a.t_end, dt, &opts)?
        }
        None => flow::integrate(mu, p0, a.t_end, &opts)?,
    }
    .downsample(a.stride);
    let bytes = match ctx.format(Format::Csv) {
        Format::Csv => trajectory_table(&traj).to_bytes(),
        Format::Json => json_bytes(&json!({
            "mu": mu,
            "t": traj.times,
            "x": traj.states.iter().map(|p| p.x).collect::<Vec<_>>(),
            "y": traj.states.iter().map(|p| p.y).collect::<Vec<_>>(),
            "z": traj.states.iter().map(|p| p.z).collect::<Vec<_>>(),
        })),
    };
    Ok(Rendered::ok(bytes))
}

fn spectrum_row(s: &LyapunovSpectrum) -> Vec<String> {
    vec![num(s.mu), num(s.exponents[0]), num(s.exponents[1]), num(s.exponents[2]), s.signature.to_string()]
}

fn spectrum_json(s: &LyapunovSpectrum) -> Value {
    json!({
        "mu": s.mu,
        "exponents": s.exponents,
        "signature": s.signature.to_string(),
        "sum": s.sum(),
        "mean_divergence": s.mean_divergence,
        "horizon": s.horizon,
        "discard": s.discard,
    })
}

const LE_COLUMNS: [&str; 5] = ["mu", "LE1", "LE2", "LE3", "signature"];

fn lyapunov_cmd(ctx: &Ctx, a: &LyapunovArgs) -> Result<Rendered, AppError> {
    let params = a.le.params()?;
    if a.mu_sa {
        let est = lyapunov::estimate_mu_sa(a.from, a.to, a.tol, a.scan_step, &params)?;
        let bytes = match ctx.format(Format::Json) {
            Format::Json => json_bytes(&json!({
                "mu_sa": est, "from": a.from, "to": a.to, "tol": a.tol,
                "scan_step": a.scan_step, "horizon": params.t,
            })),
            Format::Csv => {
                let mut t = Table::new(&["mu_sa", "tol", "horizon"]);
                t.push(vec![num(est), num(a.tol), num(params.t)]);
                t.to_bytes()
            }
        };
        return Ok(Rendered::ok(bytes));
    }
    let mu = ctx.mu(a.mu.ok_or_else(|| AppError::Usage("give --mu or --mu-sa".into()))?)?;
    let p0 = a.start.resolve(mu)?;
    let s = lyapunov::spectrum(mu, p0, &params)?;
    let bytes = match ctx.format(Format::Csv) {
        Format::Csv => {
            let mut t = Table::new(&LE_COLUMNS);
            t.push(spectrum_row(&s));
            t.to_bytes()
        }
        Format::Json => json_bytes(&spectrum_json(&s)),
    };
    Ok(Rendered::ok(bytes))
}

fn sweep_cmd(ctx: &Ctx, a: &SweepArgs) -> Result<Rendered, AppError> {
    let params = a.le.params()?;
    let workers = pool::worker_count().map_err(AppError::Usage)?;
    let table = pool::parallel_sweep(&pool::build_pool(workers), a.from, a.to, a.points, &params)?;
    let mut failed = 0;
    let mut csv = Table::new(&LE_COLUMNS);
    let mut rows = Vec::new();
    for r in &table.rows {
        match &r.result {
            Ok(s) => {
                csv.push(spectrum_row(s));
                rows.push(spectrum_json(s));
            }
            Err(e) => {
                failed += 1;
                eprintln!("mu = {}: {e}", num(r.mu));
                let nan = num(f64::NAN);
                csv.push(vec![num(r.mu), nan.clone(), nan.clone(), nan, "failed".into()]);
                rows.push(json!({"mu": r.mu, "error": e.to_string()}));
            }
        }
    }
    let summary = json!({
        "from": a.from, "to": a.to, "points": a.points, "horizon": params.t,
        "discard": params.discard, "threshold": lyapunov::POSITIVE_THRESHOLD,
        "failed": failed,
        "positive_intervals": table.positive_intervals.iter().map(|(l, h)| [*l, *h]).collect::<Vec<_>>(),
    });
    if let Some(p) = &a.summary {
        crate::output::write_file(p, &json_bytes(&summary))?;
    }
    let bytes = match ctx.format(Format::Csv) {
        Format::Csv => csv.to_bytes(),
        Format::Json => {
            let mut s = summary;
            s["rows"] = json!(rows);
            json_bytes(&s)
        }
    };
    Ok(Rendered { bytes, status: if failed > 0 { EXIT_NUMERICAL } else { EXIT_OK } })
}

fn verdict_json(v: &TraceVerdict) -> Value {
    match v {
        TraceVerdict::Equilibrium(n) => json!({"kind": "equilibrium", "equilibrium": n.as_str()}),
        TraceVerdict::Cycle { period, amplitude } => {
            json!({"kind": "cycle", "period": period, "amplitude": amplitude})
        }
        TraceVerdict::Wandering => json!({"kind": "wandering"}),
    }
}

/// Unstable traces run one per worker; the two stable branches run alongside.
pub fn parallel_traces(
    mu: f64,
    branches: Branches,
    seeds: usize,
    t_end: f64,
    radius: f64,
) -> Result<Vec<(&'static str, ManifoldTrace)>, AppError> {
    let workers = pool::worker_count().map_err(AppError::Usage)?;
    let pool = pool::build_pool(workers);
    let want_u = branches != Branches::Stable;
    let want_s = branches != Branches::Unstable;
    let (unstable, stable) = pool.install(|| {
        rayon::join(
            || -> polyrep_core::Result<Vec<ManifoldTrace>> {
                if !want_u {
                    return Ok(Vec::new());
                }
                let offsets = geometry::unstable_seed_offsets(mu, seeds, radius)?;
                let idx: Vec<usize> = (0..offsets.len()).collect();
                idx.par_iter().map(|&k| geometry::trace_unstable_branch(mu, k, offsets[k], t_end)).collect()
            },
            || -> polyrep_core::Result<Vec<ManifoldTrace>> {
                if !want_s {
                    return Ok(Vec::new());
                }
                Ok(geometry::trace_stable_with(mu, t_end, radius)?.to_vec())
            },
        )
    });
    let mut out: Vec<(&'static str, ManifoldTrace)> = unstable?.into_iter().map(|t| ("unstable", t)).collect();
    out.extend(stable?.into_iter().map(|t| ("stable", t)));
    Ok(out)
}

fn split_names(s: &str, n: usize, what: &str) -> Result<Vec<String>, AppError> {
    let parts: Vec<String> = s.split(':').map(|p| p.trim().to_string()).collect();
    if parts.len() != n || parts.iter().any(String::is_empty) {
        return Err(AppError::Usage(format!("--{what} expects {n} names separated by `:`, got `{s}`")));
    }
    Ok(parts)
}

fn manifolds_cmd(ctx: &Ctx, a: &ManifoldsArgs) -> Result<Rendered, AppError> {
    let mu = ctx.mu(a.mu.mu)?;
    positive("t-end", a.t_end)?;
    positive("radius", a.radius)?;
    positive("tol-hit", a.tol_hit)?;
    if let Some(p) = &a.probe {
        let n = split_names(p, 2, "probe")?;
        let r = geometry::heteroclinic_probe_with(
            mu,
            parse_name(&n[0]).map_err(AppError::Usage)?,
            parse_name(&n[1]).map_err(AppError::Usage)?,
            a.tol_hit,
            a.t_end,
            a.seeds,
            a.radius,
        )?;
        let v = json!({
            "mu": mu, "probe": "heteroclinic", "source": r.source.as_str(), "target": r.target.as_str(),
            "min_distance": r.min_distance, "t_min": r.t_min, "seeds": r.seeds,
            "tol_hit": a.tol_hit, "hit": r.hit,
        });
        return Ok(probe_output(ctx, v));
    }
    if let Some(e) = &a.edge {
        let n = split_names(e, 3, "edge")?;
        let r = geometry::edge_closure_probe(mu, &n[0], &n[1], &n[2], 1e-4, a.tol_hit, a.t_end)?;
        let v = json!({
            "mu": mu, "probe": "edge-closure", "edge": [r.edge.0.as_str(), r.edge.1.as_str()],
            "target": r.target.as_str(), "point": [r.point.x, r.point.y, r.point.z], "theta": r.theta,
            "fates": [r.fates.0.map(|n| n.as_str()), r.fates.1.map(|n| n.as_str())],
            "min_distance": r.min_distance, "tol_hit": a.tol_hit, "hit": r.hit,
        });
        return Ok(probe_output(ctx, v));
    }
    if a.stride == 0 {
        return Err(AppError::Usage("--stride must be at least 1".into()));
    }
    let traces = parallel_traces(mu, a.branches, a.seeds, a.t_end, a.radius)?;
    let summary = json!({
        "mu": mu,
        "traces": traces.iter().map(|(m, t)| json!({
            "manifold": m, "branch": t.branch, "seed_offset": t.seed_offset,
            "verdict": verdict_json(&t.verdict), "winding": t.winding,
            "final_time": t.trajectory.final_time(),
        })).collect::<Vec<_>>(),
    });
    if let Some(p) = &a.summary {
        crate::output::write_file(p, &json_bytes(&summary))?;
    }
    let bytes = match ctx.format(Format::Csv) {
        Format::Json => json_bytes(&summary),
        Format::Csv => trace_table(&traces, a.stride).to_bytes(),
    };
    Ok(Rendered::ok(bytes))
}

pub(crate) fn trace_table(traces: &[(&str, ManifoldTrace)], stride: usize) -> Table {
    let mut t = Table::new(&["manifold", "branch", "t", "x", "y", "z"]);
    for (m, tr) in traces {
        let d = tr.trajectory.downsample(stride);
        for (ti, p) in d.times.iter().zip(&d.states) {
            t.push(vec![m.to_string(), tr.branch.to_string(), num(*ti), num(p.x), num(p.y), num(p.z)]);
        }
    }
    t
}

fn probe_output(ctx: &Ctx, v: Value) -> Rendered {
    let bytes = match ctx.format(Format::Json) {
        Format::Json => json_bytes(&v),
        Format::Csv => {
            let obj = v.as_object().expect("object");
            let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
            let mut t = Table::new(&keys);
            t.push(obj.values().map(cell).collect());
            t.to_bytes()
        }
    };
    Rendered::ok(bytes)
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => {
            n.as_f64().map_or_else(|| n.to_string(), |f| if n.is_f64() { num(f) } else { n.to_string() })
        }
        Value::Array(a) => a.iter().map(cell).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

fn homoclinic_cmd(ctx: &Ctx, a: &HomoclinicArgs) -> Result<Rendered, AppError> {
    let mu = ctx.mu(a.mu.mu)?;
    positive("radius", a.radius)?;
    positive("unstable-horizon", a.unstable_horizon)?;
    positive("stable-horizon", a.stable_horizon)?;
    let section = a.section.resolve(mu)?;
    let opts = HomoclinicOptions {
        n_seeds: a.seeds,
        seed_radius: a.radius,
        unstable_horizon: a.unstable_horizon,
        stable_horizon: a.stable_horizon,
    };
    let r = geometry::homoclinic_proximity_with(mu, &section, &opts)?;
    let infinite = r.distance.is_infinite();
    let v = json!({
        "mu": mu,
        "distance": if infinite { Value::Null } else { json!(r.distance) },
        "infinite": infinite,
        "section": {"point": section.point, "normal": section.normal},
        "unstable_crossings": r.unstable_crossings,
        "stable_crossings": r.stable_crossings.iter().map(|c| json!({
            "t": c.t, "point": [c.point.x, c.point.y, c.point.z], "direction": c.direction,
        })).collect::<Vec<_>>(),
        "closest": r.closest.map(|(u, s)| json!({"unstable": [u.x, u.y, u.z], "stable": [s.x, s.y, s.z]})),
    });
    let bytes = match ctx.format(Format::Json) {
        Format::Json => json_bytes(&v),
        Format::Csv => {
            let mut t = Table::new(&["mu", "distance", "infinite", "unstable_crossings", "stable_crossings"]);
            t.push(vec![
                num(mu),
                num(r.distance),
                infinite.to_string(),
                r.unstable_crossings.to_string(),
                r.stable_crossings.len().to_string(),
            ]);
            t.to_bytes()
        }
    };
    Ok(Rendered::ok(bytes))
}

fn poincare_cmd(ctx: &Ctx, a: &PoincareArgs) -> Result<Rendered, AppError> {
    let mu = ctx.mu(a.mu.mu)?;
    positive("t-max", a.t_max)?;
    positive("cluster-tol", a.cluster_tol)?;
    let p0 = a.start.resolve(mu)?;
    let section = a.section.resolve(mu)?;
    let map = geometry::poincare_map(mu, &section, p0, a.returns, a.transient, a.t_max)?;
    let rt = map.return_times();
    let mean = if rt.is_empty() { f64::NAN } else { rt.iter().sum::<f64>() / rt.len() as f64 };
    let var =
        if rt.is_empty() { f64::NAN } else { rt.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / rt.len() as f64 };
    let summary = json!({
        "mu": mu,
        "returns": map.points.len(),
        "clusters": geometry::count_clusters(&map.points, a.cluster_tol),
        "cluster_tol": a.cluster_tol,
        "mean_return_time": mean,
        "return_time_relative_variance": var / (mean * mean),
        "max_plane_residual": map.max_plane_residual(),
        "section": {"point": section.point, "normal": section.normal},
        "polygon": map.polygon,
    });
    if let Some(p) = &a.summary {
        crate::output::write_file(p, &json_bytes(&summary))?;
    }
    let bytes = match ctx.format(Format::Csv) {
        Format::Json => {
            let mut s = summary;
            s["points"] = json!(map.points.iter().map(|p| [p.x, p.y, p.z]).collect::<Vec<_>>());
            s["times"] = json!(map.times);
            json_bytes(&s)
        }
        Format::Csv => {
            let mut t = Table::new(&["k", "t", "x", "y", "z", "return_time"]);
            for (k, (ti, p)) in map.times.iter().zip(&map.points).enumerate() {
                let r = if k == 0 { String::new() } else { num(rt[k - 1]) };
                t.push(vec![k.to_string(), num(*ti), num(p.x), num(p.y), num(p.z), r]);
            }
            t.to_bytes()
        }
    };
    Ok(Rendered::ok(bytes))
}

fn gallery_cmd(a: &GalleryArgs) -> Result<Rendered, AppError> {
    if a.list {
        let mut s = String::new();
        for p in gallery::PRESETS {
            s.push_str(p.name);
            s.push('\n');
        }
        return Ok(Rendered::ok(s.into_bytes()));
    }
    let (Some(name), Some(dir)) = (&a.preset, &a.out_dir) else {
        return Err(AppError::Usage("give --preset and --out-dir".into()));
    };
    let preset = gallery::find(name)
        .ok_or_else(|| AppError::Usage(format!("unknown preset `{name}`; run `gallery --list` for the names")))?;
    let manifest = gallery::write_bundle(preset, dir)?;
    Ok(Rendered::ok(json_bytes(&manifest)))
}
