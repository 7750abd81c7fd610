//! `lorentz-covers`: run named verifications and write JSON reports and SVG diagrams.
//!
//! Parameter precedence: command-line flags, then the `--scenario` file, then
//! built-in defaults.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use lorentz_covers::report::scenario::{
    ConeParams, CriterionParams, OracleConeParams, PuncturedParams, SphereParams, BUILTINS,
};
use lorentz_covers::report::{emit_svg, run_scenario, Report, Scenario, Target};

#[derive(Debug, Parser)]
#[command(name = "lorentz-covers", version, about = "Exact verifications for causal structure on cones, punctured planes and their covers")]
struct Cli {
    /// Seed for sampled scenarios.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Directory for reports and diagrams.
    #[arg(long, global = true, env = "LORENTZ_COVERS_OUT_DIR", default_value = ".")]
    out: PathBuf,

    /// Also write an SVG diagram (cone and punctured scenarios only).
    #[arg(long, global = true)]
    svg: bool,

    /// Expected outcome CLAIM=VALUE; VALUE is read as JSON, falling back to a string.
    /// The exit status is 1 when any expectation fails.
    #[arg(long, global = true, value_parser = parse_expect)]
    expect: Vec<(String, Value)>,

    /// Print the report JSON instead of the summary.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reproduce a worked example.
    Verify {
        #[command(subcommand)]
        what: Verify,
    },
    /// Certify past reflectivity through a conformal timelike Killing field.
    Certify {
        #[command(subcommand)]
        what: Certify,
    },
    /// Cross-check exact predicates against brute-force oracles.
    Oracle {
        #[command(subcommand)]
        what: Oracle,
    },
    /// Run a scenario file or a built-in scenario by name.
    Run { scenario: String },
    /// List built-in scenarios.
    List,
}

#[derive(Debug, Subcommand)]
enum Verify {
    /// Flat cone, its cyclic covers and its universal cover.
    Cone(ConeArgs),
    /// Punctured Minkowski plane and its universal cover.
    Punctured(PuncturedArgs),
    /// Null convergences of a round sphere or ellipsoid.
    Sphere(SphereArgs),
}

#[derive(Debug, Subcommand)]
enum Certify {
    Criterion(CriterionArgs),
}

#[derive(Debug, Subcommand)]
enum Oracle {
    /// Compare with the mesh (cone) or grid (punctured) oracle.
    Compare {
        #[command(subcommand)]
        family: Family,
    },
}

#[derive(Debug, Subcommand)]
enum Family {
    Cone(OracleConeArgs),
    Punctured(OraclePuncturedArgs),
}

#[derive(Debug, Args)]
struct ConeArgs {
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Cone slope A.
    #[arg(long)]
    slope: Option<f64>,
    #[arg(long)]
    r_a: Option<f64>,
    #[arg(long)]
    r_b: Option<f64>,
    /// Cyclic cover folds, comma separated.
    #[arg(long, value_delimiter = ',')]
    folds: Option<Vec<u32>>,
    /// Reflectivity samples per geometry.
    #[arg(long)]
    samples: Option<u64>,
}

#[derive(Debug, Args)]
struct PuncturedArgs {
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Event p as T,X (exact decimals or fractions).
    #[arg(long, value_parser = parse_event, allow_hyphen_values = true)]
    p: Option<[String; 2]>,
    #[arg(long, value_parser = parse_event, allow_hyphen_values = true)]
    q: Option<[String; 2]>,
    #[arg(long)]
    k_max: Option<u64>,
    #[arg(long)]
    base_samples: Option<u64>,
    #[arg(long)]
    oracle_resolution: Option<f64>,
}

#[derive(Debug, Args)]
struct SphereArgs {
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Ambient spacetime dimension.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
    /// Ellipsoid semi-axes, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    axes: Option<Vec<f64>>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    step: Option<f64>,
    /// Exchange the inside and outside normals.
    #[arg(long)]
    swap: bool,
}

#[derive(Debug, Args)]
struct CriterionArgs {
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, value_parser = ["minkowski", "cone", "lines", "punctured-plane", "conformastationary"])]
    spacetime: Option<String>,
    #[arg(long, value_parser = ["time", "scaled-time"])]
    field: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    /// Removed line positions, e.g. "0,0;1,0".
    #[arg(long, value_parser = parse_points, allow_hyphen_values = true)]
    lines: Option<Vec<Vec<f64>>>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    extent: Option<f64>,
    /// Probe start points, e.g. "1,0;0.5,0.37".
    #[arg(long, value_parser = parse_points, allow_hyphen_values = true)]
    starts: Option<Vec<Vec<f64>>>,
    /// Flow parameter budget for the completeness probe.
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct OracleConeArgs {
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    slope: Option<f64>,
    #[arg(long)]
    resolution: Option<f64>,
    #[arg(long)]
    pairs: Option<u64>,
}

#[derive(Debug, Args)]
struct OraclePuncturedArgs {
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    resolution: Option<f64>,
    #[arg(long)]
    k_max: Option<u64>,
}

fn parse_expect(s: &str) -> Result<(String, Value), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected CLAIM=VALUE, got `{s}`"))?;
    let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.trim().to_string(), value))
}

fn parse_event(s: &str) -> Result<[String; 2], String> {
    let (t, x) = s.split_once(',').ok_or_else(|| format!("expected T,X, got `{s}`"))?;
    Ok([t.trim().to_string(), x.trim().to_string()])
}

fn parse_points(s: &str) -> Result<Vec<Vec<f64>>, String> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.split(',').map(|c| c.trim().parse::<f64>().map_err(|e| format!("bad coordinate `{c}`: {e}"))).collect())
        .collect()
}

/// Scenario from `--scenario` if given, else defaults; the file must target `kind`.
fn base(file: &Option<PathBuf>, name: &str, default: Target) -> anyhow::Result<Scenario> {
    match file {
        Some(path) => {
            let s = Scenario::load(path)?;
            if s.target.kind() != default.kind() {
                bail!("{} targets `{}`, expected `{}`", path.display(), s.target.kind(), default.kind());
            }
            Ok(s)
        }
        None => Ok(Scenario::new(name, default)),
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn build(command: Command) -> anyhow::Result<Scenario> {
    Ok(match command {
        Command::Verify { what: Verify::Cone(a) } => {
            let mut s = base(&a.scenario, "cone-cover-closure", Target::Cone(ConeParams::default()))?;
            if let Target::Cone(c) = &mut s.target {
                set(&mut c.slope, a.slope);
                set(&mut c.r_a, a.r_a);
                set(&mut c.r_b, a.r_b);
                set(&mut c.folds, a.folds);
                set(&mut c.samples, a.samples);
            }
            s
        }
        Command::Verify { what: Verify::Punctured(a) } => {
            let mut s = base(&a.scenario, "punctured-reflectivity", Target::Punctured(PuncturedParams::default()))?;
            if let Target::Punctured(c) = &mut s.target {
                set(&mut c.p, a.p);
                set(&mut c.q, a.q);
                set(&mut c.k_max, a.k_max);
                set(&mut c.base_samples, a.base_samples);
                if a.oracle_resolution.is_some() {
                    c.oracle_resolution = a.oracle_resolution;
                }
            }
            s
        }
        Command::Verify { what: Verify::Sphere(a) } => {
            let mut s = base(&a.scenario, "sphere-trapped", Target::Sphere(SphereParams::default()))?;
            if let Target::Sphere(c) = &mut s.target {
                set(&mut c.n, a.n);
                set(&mut c.radius, a.radius);
                set(&mut c.grid, a.grid);
                set(&mut c.step, a.step);
                if a.axes.is_some() {
                    c.axes = a.axes;
                }
                c.swap |= a.swap;
            }
            s
        }
        Command::Certify { what: Certify::Criterion(a) } => {
            let mut s = base(&a.scenario, "criterion", Target::Criterion(CriterionParams::default()))?;
            if let Target::Criterion(c) = &mut s.target {
                if let Some(st) = a.spacetime {
                    c.spacetime = serde_json::from_value(Value::String(st))?;
                }
                if let Some(f) = a.field {
                    c.field = serde_json::from_value(Value::String(f))?;
                }
                set(&mut c.dim, a.dim);
                set(&mut c.lines, a.lines);
                set(&mut c.grid, a.grid);
                set(&mut c.extent, a.extent);
                set(&mut c.budget, a.budget);
                set(&mut c.h, a.h);
                set(&mut c.tol, a.tol);
                if a.starts.is_some() {
                    c.starts = a.starts;
                }
            }
            s
        }
        Command::Oracle { what: Oracle::Compare { family: Family::Cone(a) } } => {
            let mut s = base(&a.scenario, "oracle-cone", Target::OracleCone(OracleConeParams::default()))?;
            if let Target::OracleCone(c) = &mut s.target {
                set(&mut c.slope, a.slope);
                set(&mut c.resolution, a.resolution);
                set(&mut c.pairs, a.pairs);
            }
            s
        }
        Command::Oracle { what: Oracle::Compare { family: Family::Punctured(a) } } => {
            let defaults = PuncturedParams { base_samples: 0, oracle_resolution: Some(1e-3), ..PuncturedParams::default() };
            let mut s = base(&a.scenario, "oracle-punctured", Target::Punctured(defaults))?;
            if let Target::Punctured(c) = &mut s.target {
                set(&mut c.k_max, a.k_max);
                c.oracle_resolution = a.resolution.or(c.oracle_resolution).or(Some(1e-3));
            }
            s
        }
        Command::Run { scenario } => {
            let path = Path::new(&scenario);
            if path.exists() {
                Scenario::load(path)?
            } else {
                Scenario::builtin(&scenario)?
            }
        }
        Command::List => unreachable!("handled before building a scenario"),
    })
}

fn summary(report: &Report) -> String {
    let mut out = format!("scenario {} ({})\n", report.scenario.name, report.scenario.target.kind());
    for v in &report.verdicts {
        let tag = serde_json::to_value(v.provenance).ok().and_then(|t| t.as_str().map(str::to_owned)).unwrap_or_default();
        out.push_str(&format!("  {} = {} [{tag}]\n", v.claim, v.value));
    }
    for e in &report.expectations {
        let got = e.actual.as_ref().map_or("missing".to_string(), Value::to_string);
        out.push_str(&format!("  {} {}: expected {}, got {got}\n", if e.ok { "PASS" } else { "FAIL" }, e.claim, e.expected));
    }
    out
}

fn execute(cli: Cli) -> anyhow::Result<bool> {
    if matches!(cli.command, Command::List) {
        for name in BUILTINS {
            println!("{name}");
        }
        return Ok(true);
    }
    let mut scenario = build(cli.command)?;
    if let Some(seed) = cli.seed {
        scenario.seed = Some(seed);
    }
    scenario.expect.extend(cli.expect);
    let report = run_scenario(&scenario)?;
    // Fail before writing anything when a diagram was requested but cannot be drawn.
    let svg = if cli.svg { Some(emit_svg(&scenario, &report)?) } else { None };

    std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    let json_path = cli.out.join(format!("{}.json", scenario.name));
    std::fs::write(&json_path, report.to_json()).with_context(|| format!("writing {}", json_path.display()))?;
    if let Some(doc) = svg {
        let svg_path = cli.out.join(format!("{}.svg", scenario.name));
        std::fs::write(&svg_path, doc).with_context(|| format!("writing {}", svg_path.display()))?;
    }
    if cli.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", summary(&report));
        println!("report: {}", json_path.display());
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
