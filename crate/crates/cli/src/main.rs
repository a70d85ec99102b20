//! Command-line front end: builds domains, runs hypothesis checks, seminorm
//! evaluations, trace extraction, counterexample verification, and region
//! plots, emitting JSON/CSV artifacts stamped with the config hash and seed.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nltrace_core::error::Error;
use nltrace_core::fields::{Convention, CounterexampleSpec, ExponentField, ScalarField};
use nltrace_core::fractal::PricklyDomain;
use nltrace_core::geometry::{DomainApprox, Point2};
use nltrace_core::measure::{ahlfors_scan, sample_attractor_points};
use nltrace_core::seminorm::{nu_pq, QuadratureSpec, RegionSpec};
use nltrace_core::trace::{
    corkscrew_sequence, holder_fit, lebesgue_point_check, region_grid, trace_at, CorkscrewParams,
};
use nltrace_core::util::fnv1a64;
use nltrace_core::verify::{
    boundary_samples, check_h1, check_h2, check_h3, counterexample_quadrature,
    counterexample_series,
};

#[derive(Parser)]
#[command(
    name = "nltrace",
    about = "Nonlocal boundary seminorms and trace extraction on fractal domains",
    version
)]
struct Cli {
    /// Output directory for artifacts (env: NLTRACE_OUT_DIR).
    #[arg(long, global = true, env = "NLTRACE_OUT_DIR", default_value = "out")]
    out_dir: PathBuf,

    /// Seed pinning all stochastic sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker pool size (0 = available parallelism).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Wedge,
    Prickly,
    Koch,
    Interval,
}

impl Serialize for KindArg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match self {
            KindArg::Wedge => "wedge",
            KindArg::Prickly => "prickly",
            KindArg::Koch => "koch",
            KindArg::Interval => "interval",
        })
    }
}

#[derive(Args, Clone, Serialize)]
struct DomainArgs {
    /// Domain family.
    #[arg(long, value_enum, default_value = "prickly")]
    kind: KindArg,

    /// Cusp sharpness θ₀ ≥ 1.
    #[arg(long, default_value_t = 2.0)]
    theta0: f64,

    /// Initial-set height H ∈ (1/2, √3/2].
    #[arg(long = "H", default_value_t = 0.75)]
    h: f64,

    /// Boundary truncation depth (max ‖i*‖) for fractal kinds.
    #[arg(long, default_value_t = 6)]
    depth: u32,

    /// Boundary sampling tolerance for the wedge kind.
    #[arg(long, default_value_t = 1e-7)]
    tolerance: f64,

    /// Interval endpoints for the 1-d kind.
    #[arg(long, default_value_t = 0.0)]
    a: f64,
    #[arg(long, default_value_t = 2.0)]
    b: f64,

    /// Read {kind, theta0, H, depth, tolerance, a, b} from a JSON file
    /// instead of the flags above.
    #[arg(long)]
    domain_json: Option<PathBuf>,
}

/// JSON domain spec: {kind, theta0, H, depth, tolerance} (+ a, b for 1-d).
#[derive(serde::Deserialize)]
struct DomainSpecJson {
    kind: String,
    #[serde(default = "default_theta0")]
    theta0: f64,
    #[serde(rename = "H", default = "default_h")]
    h: f64,
    #[serde(default = "default_depth")]
    depth: u32,
    #[serde(default = "default_tolerance")]
    tolerance: f64,
    #[serde(default)]
    a: f64,
    #[serde(default = "default_b")]
    b: f64,
}

fn default_theta0() -> f64 {
    2.0
}
fn default_h() -> f64 {
    0.75
}
fn default_depth() -> u32 {
    6
}
fn default_tolerance() -> f64 {
    1e-7
}
fn default_b() -> f64 {
    2.0
}

impl DomainArgs {
    fn resolved(&self) -> nltrace_core::Result<DomainArgs> {
        let Some(path) = &self.domain_json else {
            return Ok(self.clone());
        };
        let text = std::fs::read_to_string(path)?;
        let spec: DomainSpecJson = serde_json::from_str(&text)?;
        let kind = match spec.kind.as_str() {
            "wedge" => KindArg::Wedge,
            "prickly" | "prickly_snowflake" => KindArg::Prickly,
            "koch" => KindArg::Koch,
            "interval" | "interval_1d" => KindArg::Interval,
            other => return Err(Error::Domain(format!("unknown domain kind {other:?}"))),
        };
        Ok(DomainArgs {
            kind,
            theta0: spec.theta0,
            h: spec.h,
            depth: spec.depth,
            tolerance: spec.tolerance,
            a: spec.a,
            b: spec.b,
            domain_json: None,
        })
    }

    fn kind_name(&self) -> &'static str {
        match self.kind {
            KindArg::Wedge => "wedge",
            KindArg::Prickly => "prickly",
            KindArg::Koch => "koch",
            KindArg::Interval => "interval",
        }
    }

    fn build(&self) -> nltrace_core::Result<(DomainApprox, Option<PricklyDomain>)> {
        let args = self.resolved()?;
        match args.kind {
            KindArg::Wedge => Ok((DomainApprox::wedge(args.theta0, args.h, args.tolerance)?, None)),
            KindArg::Interval => Ok((DomainApprox::interval(args.a, args.b)?, None)),
            KindArg::Prickly | KindArg::Koch => {
                let theta0 = if args.kind == KindArg::Koch { 1.0 } else { args.theta0 };
                let prickly = PricklyDomain::new(theta0, args.h, args.depth)?;
                let dom = prickly.domain_approx(args.depth)?;
                Ok((dom, Some(prickly)))
            }
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Emit the boundary polyline CSV and the {L, t} dimension summary.
    BuildDomain(BuildDomainCmd),
    /// Run the corkscrew / connectedness / oscillation checkers.
    CheckHypotheses(CheckHypothesesCmd),
    /// Scan conformal-mass ratios m(Γ∩B_ρ)/ρ^t over centers × radii.
    AhlforsScan(AhlforsScanCmd),
    /// Evaluate the seminorm ν^{s(·),p} (or its (p,q) variant).
    EvalSeminorm(EvalSeminormCmd),
    /// Extract traces along corkscrew sequences with rate fits and ladders.
    ExtractTrace(ExtractTraceCmd),
    /// Verify the strict-containment counterexample (series and quadrature).
    VerifyCounterexample(VerifyCounterexampleCmd),
    /// Emit admissibility-region masks and threshold curves.
    EmitRegionPlot(EmitRegionPlotCmd),
}

#[derive(Args, Serialize)]
struct BuildDomainCmd {
    #[command(flatten)]
    domain: DomainArgs,
}

#[derive(Args, Serialize)]
struct CheckHypothesesCmd {
    #[command(flatten)]
    domain: DomainArgs,

    /// Comma-separated subset of h1,h2,h3.
    #[arg(long, default_value = "h1,h2,h3")]
    which: String,

    /// θ_Γ at the samples: a number, or "theta0" to match the cusp exponent.
    #[arg(long, default_value = "theta0")]
    theta_gamma: String,

    #[arg(long, default_value_t = 0.4)]
    eta0: f64,
    #[arg(long, default_value_t = 0.3)]
    lambda0: f64,
    #[arg(long, default_value_t = 3.0)]
    c_gamma: f64,

    /// Boundary samples (dust points; cusp images and a corner are added).
    #[arg(long, default_value_t = 8)]
    samples: u32,

    /// Witness candidates per shell.
    #[arg(long, default_value_t = 512)]
    candidates: u32,

    /// Exponent field for H3, inline JSON.
    #[arg(long, default_value = r#"{"kind":"constant","s0":2.0}"#)]
    s_field: String,

    #[arg(long, default_value_t = 2.0)]
    p: f64,
}

#[derive(Args, Serialize)]
struct AhlforsScanCmd {
    #[command(flatten)]
    domain: DomainArgs,

    #[arg(long, default_value_t = 20)]
    centers: usize,

    /// Radii 3^{-k} for k in [rho_exp_min, rho_exp_max].
    #[arg(long, default_value_t = 2)]
    rho_exp_min: i32,
    #[arg(long, default_value_t = 7)]
    rho_exp_max: i32,
}

#[derive(Args, Serialize)]
struct EvalSeminormCmd {
    #[command(flatten)]
    domain: DomainArgs,

    /// Scalar field u, inline JSON.
    #[arg(long, default_value = r#"{"kind":"linear","ax":1.0,"ay":0.0,"c":0.0}"#)]
    field: String,

    /// Exponent field s, inline JSON.
    #[arg(long, default_value = r#"{"kind":"constant","s0":1.0}"#)]
    s_field: String,

    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    #[arg(long, default_value_t = 1e-4)]
    eps_cut: f64,
    #[arg(long, default_value_t = 24)]
    cells_per_decade: u32,
    #[arg(long, default_value_t = 32)]
    inner_samples: u32,
}

#[derive(Args, Serialize)]
struct ExtractTraceCmd {
    #[command(flatten)]
    domain: DomainArgs,

    #[arg(long, default_value = r#"{"kind":"linear","ax":1.0,"ay":1.0,"c":0.0}"#)]
    field: String,

    /// Number of boundary sample points.
    #[arg(long, default_value_t = 10)]
    points: u32,

    /// Comma-separated approach widths λ.
    #[arg(long, default_value = "0.3")]
    lambdas: String,

    #[arg(long, default_value_t = 0.5)]
    eta: f64,
    #[arg(long, default_value_t = 0.1)]
    rho0: f64,
    #[arg(long, default_value_t = 18)]
    j_max: u32,
    #[arg(long, default_value_t = 256)]
    candidates: u32,
    #[arg(long, default_value_t = 1e-4)]
    cauchy_tol: f64,

    /// Also run Lebesgue-point ladders at each sample.
    #[arg(long, default_value_t = false)]
    lebesgue: bool,

    #[arg(long, default_value_t = 2.0)]
    p: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Offset,
    MinMax,
}

impl Serialize for ConventionArg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match self {
            ConventionArg::Offset => "offset",
            ConventionArg::MinMax => "min_max",
        })
    }
}

#[derive(Args, Serialize)]
struct VerifyCounterexampleCmd {
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    s0: f64,

    /// One or more inner exponents q.
    #[arg(long = "q", required = true)]
    qs: Vec<f64>,

    #[arg(long, default_value_t = 60)]
    j_max: u32,

    /// Partial-sum ladder (comma separated J values).
    #[arg(long, default_value = "1000,10000,100000,1000000")]
    j_ladder: String,

    /// Also run the direct quadrature comparison.
    #[arg(long, default_value_t = false)]
    quadrature: bool,

    /// Interval realization convention.
    #[arg(long, value_enum, default_value = "offset")]
    convention: ConventionArg,
}

#[derive(Args, Serialize)]
struct EmitRegionPlotCmd {
    #[arg(long, default_value_t = 1.0)]
    p_min: f64,
    #[arg(long, default_value_t = 6.0)]
    p_max: f64,
    #[arg(long, default_value_t = 0.0)]
    s_min: f64,
    #[arg(long, default_value_t = 4.0)]
    s_max: f64,
    #[arg(long, default_value_t = 2.0)]
    theta0: f64,
    #[arg(long, default_value_t = 1.3)]
    t: f64,
    #[arg(long, default_value_t = 2)]
    n: u32,
    #[arg(long, default_value_t = 128)]
    resolution: u32,
}

/// Envelope written around every JSON artifact.
#[derive(Serialize)]
struct Artifact<T: Serialize> {
    config_hash: String,
    seed: u64,
    timestamp: u64,
    payload: T,
}

struct Emitter {
    out_dir: PathBuf,
    config_hash: String,
    seed: u64,
}

impl Emitter {
    fn new(out_dir: &Path, config_json: &str, seed: u64) -> nltrace_core::Result<Self> {
        std::fs::create_dir_all(out_dir)?;
        let config_hash = format!("{:016x}", fnv1a64(config_json.as_bytes()));
        Ok(Emitter { out_dir: out_dir.to_path_buf(), config_hash, seed })
    }

    fn json<T: Serialize>(&self, name: &str, payload: T) -> nltrace_core::Result<PathBuf> {
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let artifact =
            Artifact { config_hash: self.config_hash.clone(), seed: self.seed, timestamp, payload };
        let path = self.out_dir.join(name);
        std::fs::write(&path, serde_json::to_string_pretty(&artifact)?)?;
        Ok(path)
    }

    fn csv(&self, name: &str, body: &str) -> nltrace_core::Result<PathBuf> {
        let path = self.out_dir.join(name);
        let header = format!("# config_hash={} seed={}\n", self.config_hash, self.seed);
        std::fs::write(&path, header + body)?;
        Ok(path)
    }
}

fn parse_list(s: &str) -> nltrace_core::Result<Vec<f64>> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| Error::Domain(format!("bad numeric list entry: {part:?}")))
        })
        .collect()
}

fn parse_u64_list(s: &str) -> nltrace_core::Result<Vec<u64>> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .map_err(|_| Error::Domain(format!("bad integer list entry: {part:?}")))
        })
        .collect()
}

#[derive(Serialize)]
struct DomainSummary {
    kind: String,
    theta0: f64,
    h: f64,
    depth: u32,
    distance_error: f64,
    vertices: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    big_l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<f64>,
}

#[derive(Serialize)]
struct TraceRecord {
    xbar: Point2,
    lambda: f64,
    limit: Option<f64>,
    cauchy_tail: f64,
    shells_found: usize,
    shells_missing: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lebesgue_tau: Option<f64>,
}

fn run(cli: &Cli) -> nltrace_core::Result<bool> {
    match &cli.command {
        Command::BuildDomain(cmd) => {
            let config = serde_json::to_string(&cmd)?;
            let emit = Emitter::new(&cli.out_dir, &config, cli.seed)?;
            let resolved = cmd.domain.resolved()?;
            let (dom, prickly) = resolved.build()?;
            emit.csv("polyline.csv", &dom.boundary.to_csv())?;
            let summary = DomainSummary {
                kind: resolved.kind_name().to_string(),
                theta0: resolved.theta0,
                h: resolved.h,
                depth: dom.depth,
                distance_error: dom.distance_error,
                vertices: dom.boundary.vertices.len(),
                big_l: prickly.as_ref().map(|p| p.big_l),
                t: prickly.as_ref().map(|p| p.t),
            };
            emit.json("domain.json", summary)?;
            Ok(true)
        }
        Command::CheckHypotheses(cmd) => {
            let config = serde_json::to_string(&cmd)?;
            let emit = Emitter::new(&cli.out_dir, &config, cli.seed)?;
            let (dom, prickly) = cmd.domain.build()?;
            let prickly = prickly.ok_or_else(|| {
                Error::Domain("hypothesis checks need a fractal domain kind".into())
            })?;
            let theta = match cmd.theta_gamma.as_str() {
                "theta0" => prickly.theta0,
                other => other
                    .parse::<f64>()
                    .map_err(|_| Error::Domain(format!("bad theta_gamma: {other:?}")))?,
            };
            let samples = boundary_samples(
                &prickly,
                cmd.samples as usize,
                cmd.samples as usize,
                theta,
                cli.seed,
            )?;
            let mut reports = Vec::new();
            let which: Vec<&str> = cmd.which.split(',').map(|w| w.trim()).collect();
            if which.contains(&"h1") {
                let deltas = [0.1, 0.05, 0.02, 0.01];
                reports.push(check_h1(
                    &dom, &samples, cmd.eta0, cmd.lambda0, &deltas, cmd.candidates, cli.seed,
                ));
            }
            if which.contains(&"h2") {
                reports.push(check_h2(
                    &dom,
                    &samples[..samples.len().min(3)],
                    cmd.c_gamma,
                    &[0.4],
                    &[0.3, 0.15],
                    2,
                    cmd.candidates,
                    cli.seed,
                )?);
            }
            if which.contains(&"h3") {
                let s_field: ExponentField = serde_json::from_str(&cmd.s_field)?;
                let spec = QuadratureSpec { seed: cli.seed, ..Default::default() };
                let deltas = [0.1, 0.05, 0.025];
                reports.extend(check_h3(
                    &s_field, &dom, &samples, cmd.p, 2, prickly.t, 0.1, &deltas, &spec,
                )?);
            }
            let all_pass = reports.iter().all(|r| r.pass);
            emit.json("hypotheses.json", &reports)?;
            Ok(all_pass)
        }
        Command::AhlforsScan(cmd) => {
            let config = serde_json::to_string(&cmd)?;
            let emit = Emitter::new(&cli.out_dir, &config, cli.seed)?;
            let (_, prickly) = cmd.domain.build()?;
            let prickly = prickly
                .ok_or_else(|| Error::Domain("ahlfors scan needs a fractal domain kind".into()))?;
            let centers = sample_attractor_points(&prickly, cmd.centers, 40, cli.seed)?;
            let radii: Vec<f64> =
                (cmd.rho_exp_min..=cmd.rho_exp_max).map(|k| 3f64.powi(-k)).collect();
            let report = ahlfors_scan(&prickly, prickly.t, &centers, &radii)?;
            emit.csv("ahlfors.csv", &report.to_csv())?;
            #[derive(Serialize)]
            struct Summary {
                t: f64,
                a_upper: f64,
                a_lower: f64,
                spread: f64,
            }
            let summary = Summary {
                t: report.t,
                a_upper: report.upper_const,
                a_lower: report.lower_const,
                spread: report.spread(),
            };
            emit.json("ahlfors.json", summary)?;
            Ok(true)
        }
        Command::EvalSeminorm(cmd) => {
            let config = serde_json::to_string(&cmd)?;
            let emit = Emitter::new(&cli.out_dir, &config, cli.seed)?;
            let (dom, _) = cmd.domain.build()?;
            let field: ScalarField = serde_json::from_str(&cmd.field)?;
            let s_field: ExponentField = serde_json::from_str(&cmd.s_field)?;
            let spec = QuadratureSpec {
                eps_cut: cmd.eps_cut,
                cells_per_decade: cmd.cells_per_decade,
                inner_samples: cmd.inner_samples,
                seed: cli.seed,
                ..Default::default()
            };
            let result = nu_pq(&field, &s_field, cmd.p, cmd.q, &RegionSpec::Whole, &dom, &spec)?;
            emit.json("nu.json", &result)?;
            Ok(true)
        }
        Command::ExtractTrace(cmd) => {
            let config = serde_json::to_string(&cmd)?;
            let emit = Emitter::new(&cli.out_dir, &config, cli.seed)?;
            let (dom, prickly) = cmd.domain.build()?;
            let prickly = prickly.ok_or_else(|| {
                Error::Domain("trace extraction needs a fractal domain kind".into())
            })?;
            let field: ScalarField = serde_json::from_str(&cmd.field)?;
            let lambdas = parse_list(&cmd.lambdas)?;
            let samples = boundary_samples(
                &prickly,
                cmd.points as usize / 2,
                cmd.points as usize - cmd.points as usize / 2,
                prickly.theta0,
                cli.seed,
            )?;
            let spec = QuadratureSpec { seed: cli.seed, ..Default::default() };
            let mut records = Vec::new();
            for s in &samples {
                for &lambda in &lambdas {
                    let params = CorkscrewParams {
                        lambda,
                        eta: cmd.eta,
                        theta: prickly.theta0,
                        rho0: cmd.rho0,
                        j_max: cmd.j_max,
                        candidates: cmd.candidates,
                        seed: cli.seed,
                    };
                    let seq = corkscrew_sequence(&dom, s.point, &params)?;
                    if seq.points.is_empty() {
                        records.push(TraceRecord {
                            xbar: s.point,
                            lambda,
                            limit: None,
                            cauchy_tail: f64::NAN,
                            shells_found: 0,
                            shells_missing: seq.missing.len(),
                            beta_hat: None,
                            lebesgue_tau: None,
                        });
                        continue;
                    }
                    let sample = trace_at(&field, &dom, &seq, &spec, cmd.cauchy_tol)?;
                    let beta_hat = sample
                        .limit
                        .and_then(|_| holder_fit(&sample, 0.5).ok())
                        .filter(|f| !f.noise_limited)
                        .map(|f| f.beta_hat);
                    let lebesgue_tau = if cmd.lebesgue && sample.limit.is_some() {
                        let rhos = [0.1, 0.05, 0.025, 0.0125];
                        lebesgue_point_check(
                            &field,
                            &dom,
                            s.point,
                            sample.limit.unwrap(),
                            cmd.p,
                            &rhos,
                            &spec,
                        )
                        .ok()
                        .map(|l| l.kendall_tau)
                    } else {
                        None
                    };
                    records.push(TraceRecord {
                        xbar: s.point,
                        lambda,
                        limit: sample.limit,
                        cauchy_tail: sample.cauchy_tail,
                        shells_found: sample.sequence.points.len(),
                        shells_missing: sample.sequence.missing.len(),
                        beta_hat,
                        lebesgue_tau,
                    });
                }
            }
            emit.json("trace.json", &records)?;
            Ok(true)
        }
        Command::VerifyCounterexample(cmd) => {
            let config = serde_json::to_string(&cmd)?;
            let emit = Emitter::new(&cli.out_dir, &config, cli.seed)?;
            let convention = match cmd.convention {
                ConventionArg::Offset => Convention::Offset,
                ConventionArg::MinMax => Convention::MinMax,
            };
            let spec =
                CounterexampleSpec::new(cmd.p, cmd.s0, cmd.j_max)?.with_convention(convention);
            let ladder = parse_u64_list(&cmd.j_ladder)?;
            let mut verdicts = Vec::new();
            for &q in &cmd.qs {
                verdicts.push(counterexample_series(&spec, q, &ladder)?);
            }
            emit.json("series.json", &verdicts)?;
            let mut consistent = true;
            if cmd.quadrature {
                let quad = QuadratureSpec {
                    cells_per_decade: 32,
                    eps_cut: 1e-5,
                    seed: cli.seed,
                    ..Default::default()
                };
                let eps_ladder: Vec<f64> = (4..=7).map(|k| 4f64.powi(-k)).collect();
                let mut comparisons = Vec::new();
                for &q in &cmd.qs {
                    let c = counterexample_quadrature(&spec, q, &eps_ladder, &quad)?;
                    consistent &= c.consistent;
                    comparisons.push(c);
                }
                emit.json("quadrature.json", &comparisons)?;
            }
            if !consistent {
                return Err(Error::Inconsistency(
                    "quadrature/series comparison flagged an inconsistency".into(),
                ));
            }
            Ok(true)
        }
        Command::EmitRegionPlot(cmd) => {
            let config = serde_json::to_string(&cmd)?;
            let emit = Emitter::new(&cli.out_dir, &config, cli.seed)?;
            let grid = region_grid(
                (cmd.p_min, cmd.p_max),
                (cmd.s_min, cmd.s_max),
                cmd.theta0,
                cmd.t,
                cmd.n,
                cmd.resolution,
            )?;
            emit.csv("region_trace_mask.csv", &grid.mask_csv(false))?;
            emit.csv("region_lebesgue_mask.csv", &grid.mask_csv(true))?;
            emit.csv("region_curves.csv", &grid.curves_csv())?;
            #[derive(Serialize)]
            struct Summary {
                theta0: f64,
                t: f64,
                n: u32,
                resolution: u32,
                trace_true: usize,
                lebesgue_true: usize,
            }
            let summary = Summary {
                theta0: cmd.theta0,
                t: cmd.t,
                n: cmd.n,
                resolution: cmd.resolution,
                trace_true: grid.mask_trace.iter().filter(|&&b| b).count(),
                lebesgue_true: grid.mask_lebesgue.iter().filter(|&&b| b).count(),
            };
            emit.json("region.json", summary)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    match run(&cli) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
