//! The file-driven `qd` pipeline:
//!
//! ```text
//! qd kernel|build|verify [--domain PATH] [--map PATH] [--point RE,IM]...
//!    [--order N | --eps E] [--mode sc|mc|double] [--measure arc|area|both]
//!    [--grid N] [--tol T] [--seed S] [--out DIR]
//! ```
//!
//! Exit codes: 0 PASS, 2 input error, 3 kernel-solver error, 4 build error,
//! 5 verification FAIL.

mod artifact;
pub mod svg;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Serialize;

pub use artifact::{Layout, MapArtifact};

use crate::builder::{build, BuildMode, BuildOptions};
use crate::geometry::{load_domain, DomainSpec};
use crate::kernels::{SzegoSolver, DEFAULT_CLEARANCE};
use crate::verify::{
    default_holdouts, extract_from_jets, fit_quadrature, moment_defect, verify_quadrature, Measure, QuadratureData,
};
use crate::{Complex, Domain, QdError, Real};
use svg::Series;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_KERNEL: i32 = 3;
pub const EXIT_BUILD: i32 = 4;
pub const EXIT_FAIL: i32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Command {
    Kernel,
    Build,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum ModeArg {
    Sc,
    Mc,
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum MeasureArg {
    Arc,
    Area,
    Both,
}

#[derive(Debug, Clone, Parser, Serialize)]
#[command(
    name = "qd",
    about = "Szegő kernels, near-identity quadrature-domain maps, and their certification"
)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Domain file (JSON).
    #[arg(long)]
    pub domain: Option<PathBuf>,
    /// Map artifact written by `qd build` (verify).
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Base point (kernel, build) or quadrature node (verify); repeatable.
    #[arg(long = "point", value_parser = parse_point, allow_hyphen_values = true)]
    pub points: Vec<Complex>,
    /// Span order (build) or kernel order (kernel) or node order (verify).
    #[arg(long, conflicts_with = "eps")]
    pub order: Option<usize>,
    /// Target fit residual (build).
    #[arg(long)]
    pub eps: Option<Real>,
    #[arg(long, value_enum, default_value = "sc")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "both")]
    pub measure: MeasureArg,
    /// Resample every boundary curve to this many points (a power of two).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Verification tolerance on the relative holdout residual.
    #[arg(long, default_value_t = 1e-4)]
    pub tol: Real,
    /// Seed of the random holdout family.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "qd-out")]
    pub out: PathBuf,
}

fn parse_point(s: &str) -> Result<Complex, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected RE,IM, got {s:?}"))?;
    let p = |v: &str| v.trim().parse::<Real>().map_err(|e| format!("{v:?}: {e}"));
    Ok(Complex::new(p(re)?, p(im)?))
}

/// A failed run: exit code and message.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

fn input(e: impl std::fmt::Display) -> Failure {
    Failure::new(EXIT_INPUT, format!("input error: {e}"))
}

/// Files and console lines of a run; files are written together at the
/// end.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub files: Vec<(PathBuf, String)>,
    pub lines: Vec<String>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), Failure> {
        if !(self.tol > 0.0) {
            return Err(input("--tol must be positive"));
        }
        if let Some(e) = self.eps {
            if !(e > 0.0) {
                return Err(input("--eps must be positive"));
            }
        }
        if let Some(g) = self.grid {
            if g < 8 || !g.is_power_of_two() {
                return Err(input(format!("--grid must be a power of two of at least 8, got {g}")));
            }
        }
        Ok(())
    }
}

/// Parse arguments, run, write the output files, and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
        }
    };
    match run(&config).and_then(|o| write_outcome(&config.out, o)) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("{}", f.message);
            f.code
        }
    }
}

fn write_outcome(out: &Path, o: Outcome) -> Result<i32, Failure> {
    if !o.files.is_empty() {
        std::fs::create_dir_all(out).map_err(|e| input(format!("cannot create {}: {e}", out.display())))?;
    }
    for (name, body) in &o.files {
        let path = out.join(name);
        std::fs::write(&path, body).map_err(|e| input(format!("cannot write {}: {e}", path.display())))?;
    }
    for l in &o.lines {
        println!("{l}");
    }
    Ok(o.code)
}

/// Run one command without touching the file system except for reading
/// inputs.
pub fn run(config: &RunConfig) -> Result<Outcome, Failure> {
    config.validate()?;
    match config.command {
        Command::Kernel => cmd_kernel(config),
        Command::Build => cmd_build(config),
        Command::Verify => cmd_verify(config),
    }
}

fn load(config: &RunConfig) -> Result<Domain, Failure> {
    let path = config.domain.as_ref().ok_or_else(|| input("--domain is required"))?;
    let d = load_domain(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    match config.grid {
        Some(n) => d.resampled(n).map_err(input),
        None => Ok(d),
    }
}

fn check_point(d: &Domain, a: Complex) -> Result<(), Failure> {
    if !d.contains(a) {
        return Err(input(format!("point {a} lies outside the domain")));
    }
    d.check_clearance(a, DEFAULT_CLEARANCE).map_err(input)
}

fn json<T: Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| Failure::new(EXIT_INPUT, e.to_string()))
}

#[derive(Serialize)]
struct KernelReport<'a> {
    config: &'a RunConfig,
    point: Complex,
    /// `max |conj(S^m) − (1/i) L^m T|` per order.
    sl_residuals: Vec<Real>,
    files: Vec<String>,
}

fn cmd_kernel(config: &RunConfig) -> Result<Outcome, Failure> {
    let d = load(config)?;
    let a = *config.points.first().ok_or_else(|| input("kernel needs --point"))?;
    check_point(&d, a)?;
    let order = config.order.unwrap_or(0);
    let kernel_err = |e: QdError| Failure::new(EXIT_KERNEL, format!("kernel solver error: {e}"));
    let fields = SzegoSolver::new(&d)
        .map_err(kernel_err)?
        .with_order_cap(order)
        .solve_orders(a, order)
        .map_err(kernel_err)?;
    let mut out = Outcome::default();
    let mut residuals = Vec::new();
    for f in &fields {
        let mut csv = String::from("curve_index,t,re_S,im_S,re_L,im_L\n");
        for (k, c) in d.curves().iter().enumerate() {
            for ((t, s), l) in c.params().zip(f.szego.curve(k)).zip(f.garabedian.curve(k)) {
                csv.push_str(&format!(
                    "{k},{t:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                    s.re, s.im, l.re, l.im
                ));
            }
        }
        out.files.push((PathBuf::from(format!("kernel_m{}.csv", f.order)), csv));
        residuals.push(f.sl_residual(&d).map_err(kernel_err)?);
    }
    let series: Vec<Series> = d
        .curves()
        .iter()
        .enumerate()
        .map(|(k, c)| Series {
            label: format!("|S(z,a)| on curve {k}"),
            color: COLORS[k % COLORS.len()],
            points: c
                .params()
                .zip(fields[0].szego.curve(k))
                .map(|(t, s)| (t, s.norm()))
                .collect(),
            closed: false,
        })
        .collect();
    out.files.push((
        PathBuf::from("kernel.svg"),
        svg::plot(&format!("|S(·,a)| along the boundary, a = {a}"), &series, false),
    ));
    let names: Vec<String> = out.files.iter().map(|f| f.0.display().to_string()).collect();
    let report = KernelReport {
        config,
        point: a,
        sl_residuals: residuals,
        files: names,
    };
    out.files.push((PathBuf::from("kernel.json"), json(&report)?));
    out.lines.push(format!(
        "kernel: {} order(s) at a = {:.16e},{:.16e}",
        fields.len(),
        a.re,
        a.im
    ));
    Ok(out)
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn curve_points(v: &[Complex]) -> Vec<(f64, f64)> {
    v.iter().map(|z| (z.re, z.im)).collect()
}

fn cmd_build(config: &RunConfig) -> Result<Outcome, Failure> {
    let d = load(config)?;
    let a = match config.points.first() {
        Some(&a) => a,
        None if d.contains(d.centroid()) => d.centroid(),
        None => return Err(input("build needs --point: the centroid is not in the domain")),
    };
    check_point(&d, a)?;
    let mut notes = Vec::new();
    let mode = match config.mode {
        ModeArg::Sc => BuildMode::SimplyConnected,
        ModeArg::Mc => BuildMode::ArcLength,
        ModeArg::Double => BuildMode::Double,
    };
    if d.is_simply_connected() && mode != BuildMode::SimplyConnected {
        notes.push("NOTE: the domain is simply connected; building the simply connected map".to_string());
    }
    if !d.is_simply_connected() && mode == BuildMode::SimplyConnected {
        return Err(input(
            "mode sc needs a simply connected domain; use --mode mc or --mode double",
        ));
    }
    let mut opts = BuildOptions {
        order: config.order,
        ..Default::default()
    };
    if let Some(e) = config.eps {
        opts.eps = e;
    }
    let map = build(&d, a, mode, &opts).map_err(|e| Failure::new(EXIT_BUILD, format!("build error: {e}")))?;
    let art = MapArtifact::new(&map, config.seed, notes.clone())
        .map_err(|e| Failure::new(EXIT_BUILD, format!("build error: {e}")))?;
    let mut series = Vec::new();
    for (k, c) in d.curves().iter().enumerate() {
        series.push(Series {
            label: format!("curve {k}"),
            color: "#7f7f7f",
            points: curve_points(c.samples()),
            closed: true,
        });
        series.push(Series {
            label: format!("f(curve {k})"),
            color: COLORS[k % COLORS.len()],
            points: curve_points(map.f_boundary.curve(k)),
            closed: true,
        });
    }
    let mut out = Outcome::default();
    out.files.push((PathBuf::from("map.json"), json(&art)?));
    out.files.push((PathBuf::from("image_domain.json"), json(&art.image)?));
    out.files.push((
        PathBuf::from("boundary.svg"),
        svg::plot("boundary before and after", &series, true),
    ));
    out.lines.extend(notes);
    out.lines.push(format!(
        "build: mode {:?}, order {}, {} base point(s), identity distance {:.16e}, period residual {:.16e}, certificate {}",
        map.mode,
        map.order,
        map.bases().len(),
        map.identity_distance,
        map.period_residual(),
        if map.certificate.passed { "PASS" } else { "FAIL" }
    ));
    Ok(out)
}

fn measures(config: &RunConfig) -> Vec<Measure> {
    match config.measure {
        MeasureArg::Arc => vec![Measure::ArcLength],
        MeasureArg::Area => vec![Measure::Area],
        MeasureArg::Both => vec![Measure::ArcLength, Measure::Area],
    }
}

fn measure_name(m: Measure) -> &'static str {
    match m {
        Measure::ArcLength => "arc-length",
        Measure::Area => "area",
    }
}

fn fail(e: QdError) -> Failure {
    match e {
        QdError::HoldoutRejected(_) | QdError::InvalidInput(_) | QdError::OutsideDomain { .. } => input(e),
        e => Failure::new(EXIT_FAIL, format!("verification FAIL: {e}")),
    }
}

/// Test degree of the moment-defect diagnostics.
pub const DEFECT_DEGREE: usize = 8;

/// Level above which a moment defect is reported as WARN.
pub const DEFECT_WARN: Real = 1e-4;

#[derive(Serialize)]
struct Defect {
    function: &'static str,
    degree: usize,
    defect: Real,
    warn: bool,
}

/// Defects of `conj(T)` at the arc-length nodes and of `conj(z)` at the
/// area nodes. They do not change the exit code: a large defect at a small
/// test degree says nothing definite.
fn defects(image: &Domain, art: &MapArtifact) -> Result<Vec<Defect>, Failure> {
    let mut jobs = vec![("conj(T)", image.tangent().conj(), &art.arc_length)];
    if let Some(l) = &art.area {
        jobs.push(("conj(z)", image.trace(|z| z.conj()), l));
    }
    jobs.into_iter()
        .map(|(function, u, l)| {
            let defect = moment_defect(image, &u, &l.nodes, &l.orders, DEFECT_DEGREE).map_err(fail)?;
            Ok(Defect {
                function,
                degree: DEFECT_DEGREE,
                defect,
                warn: !(defect <= DEFECT_WARN),
            })
        })
        .collect()
}

fn cmd_verify(config: &RunConfig) -> Result<Outcome, Failure> {
    let mut out = Outcome::default();
    // (measure, data) pairs to check.
    let mut jobs: Vec<(Measure, QuadratureData)> = Vec::new();
    let domain = match (&config.map, &config.domain) {
        (Some(_), Some(_)) => return Err(input("give either --map or --domain, not both")),
        (None, None) => return Err(input("verify needs --map or --domain")),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
            let art: MapArtifact =
                serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", path.display())))?;
            let image = art.image.to_domain().map_err(input)?;
            for m in measures(config) {
                let layout = match m {
                    Measure::ArcLength => &art.arc_length,
                    Measure::Area => match &art.area {
                        Some(l) => l,
                        None if config.measure == MeasureArg::Both => {
                            out.lines.push(
                                "NOTE: the arc-length build has no area identity; checking arc length only".into(),
                            );
                            continue;
                        }
                        None => return Err(input("the map artifact has no area quadrature identity")),
                    },
                };
                let qd = if m == Measure::ArcLength && art.bases.len() == 1 {
                    extract_from_jets(&art.sigma_coefficients, &art.sigma_jets, &art.f_jets)
                } else {
                    fit_quadrature(&image, &layout.nodes, &layout.orders, m, None, None).map_err(fail)?
                };
                jobs.push((m, qd));
            }
            let found = defects(&image, &art)?;
            for d in &found {
                out.lines.push(format!(
                    "{} moment defect of {} at degree {}: {:.16e}",
                    if d.warn { "WARN" } else { "OK" },
                    d.function,
                    d.degree,
                    d.defect
                ));
            }
            out.files.push((PathBuf::from("defects.json"), json(&found)?));
            image
        }
        (None, Some(_)) => {
            let d = load(config)?;
            if config.points.is_empty() {
                return Err(input("verify --domain needs at least one --point node"));
            }
            for &p in &config.points {
                check_point(&d, p)?;
            }
            let orders = vec![config.order.unwrap_or(0); config.points.len()];
            for m in measures(config) {
                jobs.push((
                    m,
                    fit_quadrature(&d, &config.points, &orders, m, None, None).map_err(fail)?,
                ));
            }
            d
        }
    };
    let holdouts = default_holdouts(&domain, config.seed);
    let mut all = true;
    for (m, qd) in jobs {
        let r = verify_quadrature(&domain, &qd, &holdouts, config.tol, Some(config.seed)).map_err(fail)?;
        all &= r.passed;
        let name = measure_name(m);
        out.lines.push(format!(
            "{} {name}: holdout residual {:.16e} (tolerance {:.16e}), fit residual {:.16e}",
            if r.passed { "PASS" } else { "FAIL" },
            r.holdout_residual,
            r.tolerance,
            r.fit_residual
        ));
        out.files
            .push((PathBuf::from(format!("verify_{name}.csv")), r.to_csv()));
        out.files
            .push((PathBuf::from(format!("verify_{name}.json")), json(&r)?));
    }
    out.code = if all { EXIT_PASS } else { EXIT_FAIL };
    Ok(out)
}

/// The JSON domain file for `domain` (used by tests and round trips).
pub fn domain_json(domain: &Domain) -> crate::Result<String> {
    DomainSpec::from_domain(domain).to_json()
}
