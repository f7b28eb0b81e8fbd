//! Command-line front end of the `dtm` binary.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 guard or size
//! violation, 4 a requested check failed.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::checks;
use crate::dtm::{brute_force_sites, DiscreteMeasure, KDistance, WitnessedKDistance};
use crate::error::{Error, Result};
use crate::geometry::{PointCloud, WeightedSite};
use crate::io;
use crate::sampling::{self, NoiseConvention, SamplerSpec};
use crate::topology::{
    betti_at_level, euler_characteristic, parse_k_range, rasterize, sublevel_persistence, svg,
    vineyard_sweep, BoundingBox, ScalarField2D,
};
use crate::transport::w2_exact;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "dtm", version, about = "Witnessed k-distance experiments")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Draw a seeded sample (figure8 or circle) and write it as CSV.
    Sample(SampleArgs),
    /// Evaluate a distance function at query points or over a grid.
    Dist(DistArgs),
    /// Check the distance bounds empirically and write a JSON report.
    CheckBounds(CheckArgs),
    /// Betti numbers and persistence of a field or of a witnessed k-distance.
    Topology(TopologyCmd),
    /// Sweep k and record dimension-1 persistence (same as `topology vineyard`).
    Vineyard(VineyardArgs),
    /// Exact Wasserstein-2 distance between two discrete measures.
    W2(W2Args),
}

#[derive(Args, Debug)]
struct SampleArgs {
    /// `figure8`, `circle`, or a full spec such as `figure8:R1=1.4,R2=1.1,sigma=0.45,N=6000,seed=1`.
    spec: String,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Circle radius.
    #[arg(long)]
    r: Option<f64>,
    /// Left figure-8 radius.
    #[arg(long)]
    r1: Option<f64>,
    /// Right figure-8 radius.
    #[arg(long)]
    r2: Option<f64>,
    #[arg(long, value_enum)]
    noise_convention: Option<ConventionArg>,
    /// Output CSV (stdout when absent).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConventionArg {
    Axis,
    Total,
}

impl From<ConventionArg> for NoiseConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Axis => NoiseConvention::Axis,
            ConventionArg::Total => NoiseConvention::Total,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum DistMode {
    /// Power distance to the witnessed barycenters.
    Witnessed,
    /// Root mean squared distance to the k nearest neighbors.
    Exact,
    /// Power distance to all k-subset barycenters (small inputs only).
    Brute,
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    /// Grid resolution, `N` or `NXxNY`.
    #[arg(long, default_value = "256")]
    grid: String,
    /// Grid box `xmin,xmax,ymin,ymax` (default: data box plus margin).
    #[arg(long)]
    bbox: Option<String>,
    /// Margin added around the data box.
    #[arg(long)]
    margin: Option<f64>,
}

#[derive(Args, Debug)]
struct DistArgs {
    /// Point cloud CSV.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "witnessed")]
    mode: DistMode,
    /// Query points CSV; without it the function is sampled on a grid.
    #[arg(long)]
    queries: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
    /// Also write the weighted sites.
    #[arg(long)]
    sites_out: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CheckKind {
    /// `d <= d^w <= (2 + sqrt 2) d` on random clouds or an input cloud.
    General,
    /// Distance to a measure against exact W2 on random small measures.
    Stability,
    /// Witnessed k-distance against the distance to a circle.
    Witnessed,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(value_enum)]
    check: CheckKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Input cloud (general: checked for every `--k`; witnessed: sample of the circle).
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "1,5,10")]
    k: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    clouds: usize,
    #[arg(long, default_value_t = 100)]
    queries: usize,
    #[arg(long, default_value_t = 100)]
    pairs: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.9")]
    m0: Vec<f64>,
    /// Circle sample size when no input is given.
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    /// Circle radius; required for the witnessed check on an input cloud.
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, default_value_t = 2048)]
    atoms: usize,
    #[arg(long = "grid", default_value_t = 128)]
    grid_n: usize,
    /// Override the closed-form dimension constant.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(args_conflicts_with_subcommands = true)]
struct TopologyCmd {
    #[command(subcommand)]
    sub: Option<TopologySub>,
    #[command(flatten)]
    args: TopologyArgs,
}

#[derive(Subcommand, Debug)]
enum TopologySub {
    /// Sweep k and record dimension-1 persistence.
    Vineyard(VineyardArgs),
}

#[derive(Args, Debug)]
struct TopologyArgs {
    /// Scalar field CSV produced by `dist`.
    #[arg(long, conflicts_with_all = ["input", "k"])]
    field: Option<PathBuf>,
    /// Point cloud CSV (with `--k`).
    #[arg(long, requires = "k")]
    input: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    grid: GridArgs,
    /// Level for the Betti numbers.
    #[arg(long)]
    level: Option<f64>,
    /// Expected `beta0,beta1` at `--level`; mismatch exits with code 4.
    #[arg(long)]
    expect_betti: Option<String>,
    #[arg(long)]
    diagram_out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// JSON report (stdout when absent).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VineyardArgs {
    #[arg(long)]
    input: PathBuf,
    /// `start:end:step`, inclusive.
    #[arg(long, default_value = "10:200:10")]
    k: String,
    #[command(flatten)]
    grid: GridArgs,
    /// Vineyard CSV (stdout when absent).
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Number of classes drawn in the SVG.
    #[arg(long, default_value_t = 4)]
    ranks: usize,
    #[arg(long)]
    report: Option<PathBuf>,
    /// Exit with code 4 unless two prominent classes persist over this many consecutive k.
    #[arg(long)]
    expect_prominent: Option<usize>,
}

#[derive(Args, Debug)]
struct W2Args {
    #[arg(long)]
    mu: PathBuf,
    #[arg(long)]
    nu: PathBuf,
    /// Read both files as point clouds with uniform masses.
    #[arg(long)]
    uniform: bool,
    #[arg(long)]
    plan_out: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

enum Outcome {
    Pass,
    CheckFailed,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(Outcome::Pass) => EXIT_OK,
        Ok(Outcome::CheckFailed) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_guard() {
                EXIT_GUARD
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn execute(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Dist(a) => cmd_dist(a),
        Command::CheckBounds(a) => cmd_check(a),
        Command::Topology(TopologyCmd {
            sub: Some(TopologySub::Vineyard(a)),
            ..
        })
        | Command::Vineyard(a) => cmd_vineyard(a),
        Command::Topology(TopologyCmd { sub: None, args }) => cmd_topology(args),
        Command::W2(a) => cmd_w2(a),
    }
}

/// Writes `text` to `path` with a JSON sidecar, or to stdout.
fn emit(path: Option<&Path>, text: &str, sidecar: serde_json::Value) -> Result<()> {
    match path {
        Some(p) => {
            io::write_atomic(p, text.as_bytes())?;
            io::write_json(&io::sidecar_path(p), &sidecar)
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    match path {
        Some(p) => io::write_json(p, value),
        None => {
            let text = serde_json::to_string_pretty(value)
                .map_err(|e| Error::InvalidParameter(e.to_string()))?;
            println!("{text}");
            Ok(())
        }
    }
}

/// Seed recorded in the sidecar of an input file, if any.
fn input_seed(path: &Path) -> Option<u64> {
    let text = std::fs::read_to_string(io::sidecar_path(path)).ok()?;
    let v: serde_json::Value = serde_json::from_str(&text).ok()?;
    v.get("seed")?.as_u64()
}

fn cmd_sample(a: SampleArgs) -> Result<Outcome> {
    let mut spec: SamplerSpec = a.spec.parse()?;
    if let Some(s) = a.sigma {
        spec.noise_mut().sigma = s;
    }
    if let Some(s) = a.seed {
        spec.noise_mut().seed = s;
    }
    if let Some(c) = a.noise_convention {
        spec.noise_mut().convention = c.into();
    }
    if let Some(n) = a.n {
        *spec.n_mut() = n;
    }
    match &mut spec {
        SamplerSpec::Circle { radius, .. } => {
            if let Some(r) = a.r {
                *radius = r;
            }
            if a.r1.is_some() || a.r2.is_some() {
                return Err(Error::InvalidParameter(
                    "--r1/--r2 apply to figure8 only".into(),
                ));
            }
        }
        SamplerSpec::Figure8 { shape, .. } => {
            if let Some(r) = a.r1 {
                shape.r1 = r;
            }
            if let Some(r) = a.r2 {
                shape.r2 = r;
            }
            if a.r.is_some() {
                return Err(Error::InvalidParameter("--r applies to circle only".into()));
            }
        }
    }
    let cloud = spec.sample()?;
    let noise = *spec.noise_mut();
    emit(
        a.output.as_deref(),
        &io::point_cloud_csv(&cloud),
        json!({
            "command": "sample",
            "spec": spec.to_string(),
            "sampler": spec,
            "seed": noise.seed,
            "n": cloud.len(),
        }),
    )?;
    Ok(Outcome::Pass)
}

fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidParameter(format!("bad grid `{s}` (expected N or NXxNY)"));
    let (x, y) = match s.split_once(['x', 'X']) {
        Some((x, y)) => (x.parse().map_err(|_| bad())?, y.parse().map_err(|_| bad())?),
        None => {
            let n = s.parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    Ok((x, y))
}

fn resolve_box(
    grid: &GridArgs,
    cloud: Option<&PointCloud>,
    default_margin: f64,
) -> Result<BoundingBox> {
    if let Some(b) = &grid.bbox {
        let v: Vec<f64> = b
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidParameter(format!("bad box `{b}`")))?;
        return match v.as_slice() {
            &[a, b, c, d] => BoundingBox::new(a, b, c, d),
            _ => Err(Error::InvalidParameter(
                "box needs xmin,xmax,ymin,ymax".into(),
            )),
        };
    }
    let cloud = cloud.ok_or_else(|| Error::InvalidParameter("--bbox is required here".into()))?;
    BoundingBox::around(cloud, grid.margin.unwrap_or(default_margin))
}

enum Evaluator {
    Witnessed(WitnessedKDistance),
    Exact(KDistance),
    Brute(crate::geometry::PowerDistance),
}

impl Evaluator {
    fn build(cloud: &PointCloud, k: usize, mode: DistMode) -> Result<Self> {
        Ok(match mode {
            DistMode::Witnessed => Self::Witnessed(WitnessedKDistance::new(cloud, k)?),
            DistMode::Exact => Self::Exact(KDistance::new(cloud, k)?),
            DistMode::Brute => Self::Brute(brute_force_sites(cloud, k)?),
        })
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Self::Witnessed(w) => w.eval(x),
            Self::Exact(d) => d.eval(x),
            Self::Brute(p) => p.eval(x),
        }
    }

    fn sites(&self) -> Option<&[WeightedSite]> {
        match self {
            Self::Witnessed(w) => Some(w.sites()),
            Self::Exact(_) => None,
            Self::Brute(p) => Some(p.sites()),
        }
    }
}

fn cmd_dist(a: DistArgs) -> Result<Outcome> {
    let cloud = io::read_point_cloud(&a.input)?;
    let eval = Evaluator::build(&cloud, a.k, a.mode)?;
    let mut meta = json!({
        "command": "dist",
        "input": a.input,
        "k": a.k,
        "n": cloud.len(),
        "m0": a.k as f64 / cloud.len() as f64,
        "mode": a.mode,
        "seed": input_seed(&a.input),
    });
    if let Some(path) = &a.sites_out {
        let sites = eval.sites().ok_or_else(|| {
            Error::InvalidParameter("the exact k-distance has no explicit sites".into())
        })?;
        let mode = match a.mode {
            DistMode::Brute => "brute",
            _ => "witnessed",
        };
        emit(
            Some(path),
            &io::sites_csv(sites, a.k, cloud.len(), mode),
            meta.clone(),
        )?;
    }
    let text = match &a.queries {
        Some(q) => {
            let queries = io::read_point_cloud(q)?;
            if queries.dim() != cloud.dim() {
                return Err(Error::DimensionMismatch {
                    expected: cloud.dim(),
                    found: queries.dim(),
                });
            }
            let values: Vec<f64> = queries.points().map(|x| eval.eval(x)).collect();
            meta["queries"] = json!(q);
            io::values_csv(&queries, &values)
        }
        None => {
            if cloud.dim() != 2 {
                return Err(Error::InvalidParameter(
                    "grid evaluation needs planar data; pass --queries".into(),
                ));
            }
            let (nx, ny) = parse_grid(&a.grid.grid)?;
            let bbox = resolve_box(&a.grid, Some(&cloud), 0.5)?;
            let field = rasterize(|x| eval.eval(x), bbox, nx, ny)?;
            meta["grid"] = json!({"nx": nx, "ny": ny, "bbox": bbox});
            meta["lipschitz_consistent"] = json!(field.is_lipschitz_consistent());
            io::field_csv(&field)
        }
    };
    emit(a.output.as_deref(), &text, meta)?;
    Ok(Outcome::Pass)
}

fn cmd_check(a: CheckArgs) -> Result<Outcome> {
    let (value, pass) = match a.check {
        CheckKind::General => {
            let report = match &a.input {
                Some(p) => {
                    let cloud = io::read_point_cloud(p)?;
                    let instances: Vec<(PointCloud, usize)> =
                        a.k.iter().map(|&k| (cloud.clone(), k)).collect();
                    checks::general_bound_on(&instances, a.queries, a.seed)?
                }
                None => checks::general_bound_random(
                    a.clouds,
                    a.queries,
                    500,
                    20,
                    &[1, 2, 3, 5],
                    a.seed,
                )?,
            };
            (serde_json::to_value(&report), report.pass)
        }
        CheckKind::Stability => {
            let report = checks::stability_check(a.pairs, a.queries, &a.m0, 8, a.seed)?;
            (serde_json::to_value(&report), report.pass)
        }
        CheckKind::Witnessed => {
            let (cloud, radius, seed, sigma) = match &a.input {
                Some(p) => {
                    let radius = a.radius.ok_or_else(|| {
                        Error::InvalidParameter(
                            "the witnessed check on an input cloud needs the reference --radius"
                                .into(),
                        )
                    })?;
                    (io::read_point_cloud(p)?, radius, input_seed(p), None)
                }
                None => {
                    let radius = a.radius.unwrap_or(1.0);
                    let noise = sampling::NoiseSpec::new(a.sigma, a.seed);
                    (
                        sampling::sample_circle(radius, a.n, &noise)?,
                        radius,
                        Some(a.seed),
                        Some(a.sigma),
                    )
                }
            };
            let report = checks::witnessed_circle_check(
                &cloud, radius, &a.m0, a.atoms, a.grid_n, a.alpha, seed, sigma,
            )?;
            (serde_json::to_value(&report), report.pass)
        }
    };
    let value = value.map_err(|e| Error::InvalidParameter(e.to_string()))?;
    emit_json(a.output.as_deref(), &value)?;
    Ok(if pass {
        Outcome::Pass
    } else {
        Outcome::CheckFailed
    })
}

#[derive(Serialize)]
struct TopologyReport {
    source: String,
    seed: Option<u64>,
    k: Option<usize>,
    nx: usize,
    ny: usize,
    bbox: BoundingBox,
    spacing: f64,
    lipschitz_consistent: bool,
    level: Option<f64>,
    beta0: Option<usize>,
    beta1: Option<usize>,
    euler: Option<i64>,
    bars_dim0: usize,
    bars_dim1: usize,
    top_persistence_dim1: Vec<f64>,
    pass: Option<bool>,
}

fn cmd_topology(a: TopologyArgs) -> Result<Outcome> {
    let (field, cloud, source, seed): (ScalarField2D, Option<PointCloud>, String, Option<u64>) =
        match (&a.field, &a.input, a.k) {
            (Some(f), _, _) => (
                io::read_field(f)?,
                None,
                f.display().to_string(),
                input_seed(f),
            ),
            (None, Some(p), Some(k)) => {
                let cloud = io::read_point_cloud(p)?;
                let wk = WitnessedKDistance::new(&cloud, k)?;
                let (nx, ny) = parse_grid(&a.grid.grid)?;
                let bbox = resolve_box(&a.grid, Some(&cloud), a.level.unwrap_or(0.5))?;
                let field = rasterize(|x| wk.eval(x), bbox, nx, ny)?;
                (field, Some(cloud), p.display().to_string(), input_seed(p))
            }
            _ => {
                return Err(Error::InvalidParameter(
                    "topology needs --field, or --input with --k".into(),
                ))
            }
        };
    let diagram = sublevel_persistence(&field);
    let betti = a.level.map(|r| betti_at_level(&field, r));
    let expected = a
        .expect_betti
        .as_deref()
        .map(|s| -> Result<(usize, usize)> {
            let bad = || Error::InvalidParameter(format!("bad --expect-betti `{s}`"));
            let (x, y) = s.split_once(',').ok_or_else(bad)?;
            Ok((
                x.trim().parse().map_err(|_| bad())?,
                y.trim().parse().map_err(|_| bad())?,
            ))
        })
        .transpose()?;
    if expected.is_some() && betti.is_none() {
        return Err(Error::InvalidParameter(
            "--expect-betti needs --level".into(),
        ));
    }
    let pass = expected.map(|e| Some(e) == betti);
    let mut top = diagram.persistences(1);
    top.truncate(5);
    let report = TopologyReport {
        source,
        seed,
        k: a.k,
        nx: field.nx(),
        ny: field.ny(),
        bbox: field.bbox(),
        spacing: field.spacing(),
        lipschitz_consistent: field.is_lipschitz_consistent(),
        level: a.level,
        beta0: betti.map(|b| b.0),
        beta1: betti.map(|b| b.1),
        euler: a.level.map(|r| euler_characteristic(&field, r)),
        bars_dim0: diagram.in_dim(0).count(),
        bars_dim1: diagram.in_dim(1).count(),
        top_persistence_dim1: top,
        pass,
    };
    if let Some(p) = &a.diagram_out {
        emit(
            Some(p),
            &io::diagram_csv(&diagram),
            json!({"command": "topology", "source": report.source, "k": a.k, "seed": seed}),
        )?;
    }
    if let Some(p) = &a.svg {
        let level = a
            .level
            .ok_or_else(|| Error::InvalidParameter("--svg needs --level".into()))?;
        io::write_atomic(
            p,
            svg::threshold_svg(&field, level, cloud.as_ref()).as_bytes(),
        )?;
    }
    emit_json(a.report.as_deref(), &report)?;
    Ok(match pass {
        Some(false) => Outcome::CheckFailed,
        _ => Outcome::Pass,
    })
}

#[derive(Serialize)]
struct VineyardReport {
    input: String,
    seed: Option<u64>,
    n: usize,
    k_values: Vec<usize>,
    nx: usize,
    ny: usize,
    prominent_run_k: Option<(usize, usize)>,
    prominent_run_len: usize,
    pass: Option<bool>,
}

fn cmd_vineyard(a: VineyardArgs) -> Result<Outcome> {
    let cloud = io::read_point_cloud(&a.input)?;
    let ks = parse_k_range(&a.k)?;
    let (nx, ny) = parse_grid(&a.grid.grid)?;
    let bbox = resolve_box(&a.grid, Some(&cloud), 0.5)?;
    let vineyard = vineyard_sweep(&cloud, &ks, bbox, nx, ny)?;
    let seed = input_seed(&a.input);
    emit(
        a.output.as_deref(),
        &io::vineyard_csv(&vineyard),
        json!({
            "command": "vineyard",
            "input": a.input,
            "k": a.k,
            "grid": {"nx": nx, "ny": ny, "bbox": bbox},
            "seed": seed,
        }),
    )?;
    if let Some(p) = &a.svg {
        io::write_atomic(p, svg::vineyard_svg(&vineyard, a.ranks).as_bytes())?;
    }
    let run = vineyard.longest_prominent_run(2.0);
    let run_len = run.map_or(0, |(s, e)| e - s + 1);
    let pass = a.expect_prominent.map(|m| run_len >= m);
    if let Some(p) = &a.report {
        io::write_json(
            p,
            &VineyardReport {
                input: a.input.display().to_string(),
                seed,
                n: cloud.len(),
                k_values: ks,
                nx,
                ny,
                prominent_run_k: run.map(|(s, e)| (vineyard.records[s].k, vineyard.records[e].k)),
                prominent_run_len: run_len,
                pass,
            },
        )?;
    }
    Ok(match pass {
        Some(false) => Outcome::CheckFailed,
        _ => Outcome::Pass,
    })
}

fn cmd_w2(a: W2Args) -> Result<Outcome> {
    let read = |p: &Path| -> Result<DiscreteMeasure> {
        if a.uniform {
            Ok(DiscreteMeasure::uniform(&io::read_point_cloud(p)?))
        } else {
            io::read_measure(p)
        }
    };
    let (mu, nu) = (read(&a.mu)?, read(&a.nu)?);
    let result = w2_exact(&mu, &nu)?;
    if let Some(p) = &a.plan_out {
        emit(
            Some(p),
            &io::plan_csv(&result.plan),
            json!({"command": "w2", "mu": a.mu, "nu": a.nu, "seed": null}),
        )?;
    }
    emit_json(
        a.output.as_deref(),
        &json!({
            "mu": a.mu,
            "nu": a.nu,
            "mu_atoms": mu.len(),
            "nu_atoms": nu.len(),
            "w2": result.distance,
            "squared_cost": result.plan.squared_cost(mu.support(), nu.support()),
            "plan_entries": result.plan.entries.len(),
        }),
    )?;
    Ok(Outcome::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parser_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn grid_strings() {
        assert_eq!(parse_grid("256").unwrap(), (256, 256));
        assert_eq!(parse_grid("64x32").unwrap(), (64, 32));
        assert!(parse_grid("axb").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["dtm", "sample", "torus"]), EXIT_USAGE);
        assert_eq!(run(["dtm", "nonsense"]), EXIT_USAGE);
        assert_eq!(
            run(["dtm", "dist", "--input", "/nonexistent.csv", "--k", "3"]),
            EXIT_USAGE
        );
    }
}
