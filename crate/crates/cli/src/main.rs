//! `ttlab`: generators, travel time checks, Gromov-Hausdorff estimates and
//! the radial sound-speed experiments, with JSON/CSV/SVG artifacts.
//!
//! Exit status: 0 when every requested check passes, 1 when one fails,
//! 2 on usage or I/O errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use ttlab::herglotz::{
    alpha_tilde, conjugate_radii, disk_distance_matrix, find_intersecting_pairs, flie_from_delta, geodesic_table,
    minimality_margin, replay_triples, trace_geodesic, PolarGrid, RadialProfile, DEFAULT_GRID, REPLAY_TOL, TRACE_STEP,
};
use ttlab::io::{data_to_csv, read_space_file, to_json, LoadedSpace, SpaceFile};
use ttlab::spaces::{
    build_tree, convex_polygon, sample_annulus, sphere_band, sphere_equator, AnnulusSpec, SphereBandSpec, TreeSpec,
};
use ttlab::{
    check_blie, check_flie, gh_estimate, midpoint_test, travel_time_data, truncated_gh, verify_stability,
    CheckReport, Error, MeasurementSet, SensorMatching, StabilitySide,
};

#[derive(Parser)]
#[command(name = "ttlab", version, about = "Travel time data experiments on sampled length spaces")]
struct Cli {
    /// Directory for artifacts; without it the main artifact goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a sampled space and write it as a space file.
    #[command(subcommand)]
    Gen(Gen),
    /// Travel time table of a space file, as CSV.
    Data { space: PathBuf },
    /// Forward local isometry check.
    CheckFlie(CheckArgs),
    /// Backward local isometry check.
    CheckBlie(CheckArgs),
    /// Midpoint test on the travel time data.
    Midpoint(CheckArgs),
    /// Gromov-Hausdorff estimate of two space files.
    Gh {
        a: PathBuf,
        b: PathBuf,
        /// Require the exact value (fails when a space exceeds the cap).
        #[arg(long)]
        exact: bool,
        /// Compare the truncations at this scale instead.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 5)]
        cap: usize,
    },
    /// Check both stability inequalities for two space files.
    Stability {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        diam_bound: f64,
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
        #[arg(long, default_value_t = 5)]
        cap: usize,
        /// Sensor matching as comma-separated indices (default: identity).
        #[arg(long, value_delimiter = ',')]
        phi: Option<Vec<usize>>,
    },
    /// Radially symmetric sound speed `exp(-k/2 exp(-r^2 / 2 sigma^2))`.
    Herglotz(HerglotzArgs),
}

#[derive(Subcommand)]
enum Gen {
    /// Metric tree from a JSON edge list `[[a, b, length], ...]`.
    Tree {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long, default_value_t = 0)]
        extra: usize,
    },
    /// Random metric tree drawn from `--seed`.
    RandomTree {
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        extra: usize,
    },
    /// Planar annulus with sensors on the outer circle
    Annulus {
        #[arg(long)]
        inner: f64,
        #[arg(long, default_value_t = 1.0)]
        outer: f64,
        #[arg(long, default_value_t = 200)]
        boundary: usize,
        #[arg(long, default_value_t = 1800)]
        interior: usize,
    },
    /// Sphere grid with sensors near the meridian of longitude 0
    SphereBand {
        #[arg(long)]
        band_radius: f64,
        #[arg(long, default_value_t = 24)]
        resolution: usize,
    },
    /// Northern hemisphere plus the south pole, sensors on the equator
    SphereEquator {
        #[arg(long, default_value_t = 12)]
        resolution: usize,
    },
    /// Convex polygon from a JSON vertex list `[[x, y], ...]`.
    Polygon {
        #[arg(long)]
        vertices: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        resolution: f64,
    },
    /// Graph approximation of the disk with the radial sound speed.
    Disk {
        #[arg(long, default_value_t = 10)]
        rings: usize,
        #[arg(long, default_value_t = 1.0)]
        reach: f64,
        #[command(flatten)]
        profile: ProfileArgs,
    },
}

#[derive(Args)]
struct CheckArgs {
    space: PathBuf,
    #[arg(long)]
    eps: f64,
    /// Defaults to twice the sampling step recorded in the file, else 0.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Clone, Copy)]
struct ProfileArgs {
    #[arg(long, default_value_t = 1.6)]
    k: f64,
    #[arg(long, default_value_t = 0.4)]
    sigma: f64,
}

#[derive(Args)]
struct HerglotzArgs {
    #[command(subcommand)]
    command: Herglotz,
    #[command(flatten)]
    profile: ProfileArgs,
    /// Also write an illustrative SVG next to the main artifact.
    #[arg(long, global = true)]
    svg: bool,
}

#[derive(Subcommand)]
enum Herglotz {
    /// Table of `(r, L(r), alpha(r))` on `n + 1` radii.
    Alpha {
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
    /// Conjugate radii for each outer radius `r0`.
    Conjugates {
        #[arg(long, value_delimiter = ',', default_value = "0.9")]
        r0: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        bracket: usize,
    },
    /// Pairs of boundary geodesics that meet again.
    Intersections {
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        /// Replay every meeting with the ODE tracer; fail if one is missed.
        #[arg(long)]
        replay: bool,
    },
    /// Minimality margin and the FLIE scale it certifies.
    Delta {
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        /// Fail unless FLIE is certified at this scale.
        #[arg(long)]
        assert_flie: Option<f64>,
    },
}

/// Outcome of a command that ran to completion.
#[derive(PartialEq)]
enum Verdict {
    Pass,
    Fail,
}

impl From<bool> for Verdict {
    fn from(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    /// Writes the main artifact to `dir/name`, or to stdout.
    fn main(&self, name: &str, text: &str) -> Result<()> {
        match &self.dir {
            Some(dir) => write(&dir.join(name), text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    /// Writes an auxiliary artifact, which needs an output directory.
    fn extra(&self, name: &str, text: &str) -> Result<()> {
        match &self.dir {
            Some(dir) => write(&dir.join(name), text),
            None => bail!("writing {name} needs --out"),
        }
    }

    fn json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<()> {
        self.main(name, &to_json(value)?)
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load(path: &Path) -> Result<LoadedSpace> {
    read_space_file(path).with_context(|| format!("reading {}", path.display()))
}

fn sensors(loaded: &LoadedSpace, path: &Path) -> Result<MeasurementSet> {
    loaded.sensors.clone().with_context(|| format!("{} has no measurement set", path.display()))
}

fn default_tol(loaded: &LoadedSpace) -> f64 {
    loaded.provenance.get("step").and_then(|v| v.as_f64()).map_or(0.0, |s| 2.0 * s)
}

fn profile(args: ProfileArgs) -> Result<RadialProfile> {
    Ok(RadialProfile::gaussian_dip(args.k, args.sigma)?)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn gen(cmd: Gen, sink: &Sink) -> Result<Verdict> {
    let sampled = match cmd {
        Gen::Tree { edges, extra } => build_tree(&TreeSpec::new(read_json(&edges)?)?, extra)?,
        Gen::RandomTree { nodes, seed, extra } => {
            if nodes < 2 {
                bail!("a tree needs at least 2 nodes");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let edges = (1..nodes).map(|i| (rng.gen_range(0..i), i, rng.gen_range(0.1..2.0))).collect();
            let mut s = build_tree(&TreeSpec::new(edges)?, extra)?;
            s.provenance["seed"] = json!(seed);
            s
        }
        Gen::Annulus { inner, outer, boundary, interior } => {
            sample_annulus(&AnnulusSpec { inner, outer, n_boundary: boundary, n_interior: interior })?
        }
        Gen::SphereBand { band_radius, resolution } => sphere_band(&SphereBandSpec { band_radius, resolution })?,
        Gen::SphereEquator { resolution } => sphere_equator(resolution)?,
        Gen::Polygon { vertices, resolution } => {
            let v: Vec<[f64; 2]> = read_json(&vertices)?;
            convex_polygon(&v, resolution)?
        }
        Gen::Disk { rings, reach, profile: p } => disk_distance_matrix(&profile(p)?, PolarGrid { rings, reach })?,
    };
    log::info!("{} samples, {} sensors, step {}", sampled.space.len(), sampled.sensors.len(), sampled.step);
    sink.json("space.json", &SpaceFile::from_sampled(&sampled))?;
    Ok(Verdict::Pass)
}

fn check(args: CheckArgs, kind: &str, sink: &Sink) -> Result<Verdict> {
    if !(args.eps > 0.0) {
        bail!("--eps must be positive, got {}", args.eps);
    }
    let loaded = load(&args.space)?;
    let s = sensors(&loaded, &args.space)?;
    let tol = args.tol.unwrap_or_else(|| default_tol(&loaded));
    let name = format!("{}.json", kind.replace('-', "_"));
    let report: CheckReport = match kind {
        "check-flie" => check_flie(&loaded.space, &s, args.eps, tol)?,
        "check-blie" => match check_blie(&loaded.space, &s, args.eps, tol) {
            Err(Error::NonInjective { p, q }) => {
                let out = json!({
                    "passed": false,
                    "epsilon": args.eps,
                    "tol": tol,
                    "non_injective": { "p": p, "q": q },
                });
                sink.json(&name, &out)?;
                return Ok(Verdict::Fail);
            }
            other => other?,
        },
        _ => midpoint_test(&travel_time_data(&loaded.space, &s)?, args.eps, tol)?,
    };
    sink.json(&name, &report)?;
    Ok(report.passed.into())
}

#[allow(clippy::too_many_arguments)]
fn stability(
    a: &Path,
    b: &Path,
    eps: f64,
    diam_bound: f64,
    tol: f64,
    cap: usize,
    phi: Option<Vec<usize>>,
    sink: &Sink,
) -> Result<Verdict> {
    let (la, lb) = (load(a)?, load(b)?);
    let (sa, sb) = (sensors(&la, a)?, sensors(&lb, b)?);
    let phi = match phi {
        Some(map) => SensorMatching::new(map)?,
        None => {
            if sa.len() != sb.len() {
                bail!("sensor counts differ ({} vs {}); pass --phi", sa.len(), sb.len());
            }
            SensorMatching::identity(sa.len())
        }
    };
    let result = verify_stability(
        StabilitySide { space: &la.space, sensors: &sa },
        StabilitySide { space: &lb.space, sensors: &sb },
        &phi,
        eps,
        diam_bound,
        cap,
        tol,
    );
    match result {
        Ok(report) => {
            sink.json("stability.json", &report)?;
            Ok(report.holds().into())
        }
        // a side that is not BLIE at this scale fails the requested check
        Err(Error::Precondition { which, report }) => {
            sink.json("stability.json", &json!({ "holds": false, "precondition_failed": which, "check": report }))?;
            Ok(Verdict::Fail)
        }
        Err(Error::NonInjective { p, q }) => {
            sink.json("stability.json", &json!({ "holds": false, "non_injective": { "p": p, "q": q } }))?;
            Ok(Verdict::Fail)
        }
        Err(e) => Err(e.into()),
    }
}

fn herglotz(args: HerglotzArgs, sink: &Sink) -> Result<Verdict> {
    let p = profile(args.profile)?;
    match args.command {
        Herglotz::Alpha { n } => {
            let table = geodesic_table(&p, n)?;
            let mut csv = String::from("r,half_length,opening_angle\n");
            for g in &table {
                csv.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", g.tip_radius, g.half_length, g.half_angle));
            }
            sink.main("alpha.csv", &csv)?;
            if args.svg {
                let series = vec![
                    ("alpha".to_string(), table.iter().map(|g| [g.tip_radius, g.half_angle]).collect()),
                    ("L".to_string(), table.iter().map(|g| [g.tip_radius, g.half_length]).collect()),
                ];
                sink.extra("alpha.svg", &svg::line_plot(&series, "tip radius r", "alpha(r), L(r)"))?;
            }
        }
        Herglotz::Conjugates { r0, bracket } => {
            let mut csv = String::from("r0,conjugate_radius\n");
            let mut series = Vec::new();
            for &outer in &r0 {
                for root in conjugate_radii(&p, outer, bracket)? {
                    csv.push_str(&format!("{outer:.16e},{root:.16e}\n"));
                }
                if args.svg {
                    let pts = (1..200)
                        .map(|i| {
                            let r = outer * i as f64 / 200.0;
                            Ok([r, alpha_tilde(&p, r, outer)?])
                        })
                        .collect::<Result<Vec<_>>>()?;
                    series.push((format!("r0 = {outer}"), pts));
                }
            }
            sink.main("conjugates.csv", &csv)?;
            if args.svg {
                sink.extra("alpha_tilde.svg", &svg::line_plot(&series, "tip radius r", "alpha~(r; r0)"))?;
            }
        }
        Herglotz::Intersections { grid, replay } => {
            let triples = find_intersecting_pairs(&p, grid)?;
            sink.json("intersections.json", &triples)?;
            if args.svg {
                let mut paths = Vec::new();
                let mut marks = Vec::new();
                // a handful of pairs spread across the list
                let step = (triples.len() / 3).max(1);
                for t in triples.iter().step_by(step).take(3) {
                    paths.push(trace_geodesic(&p, t.r0, 1, TRACE_STEP)?.points);
                    paths.push(trace_geodesic(&p, t.r1, t.orientation, TRACE_STEP)?.points);
                    marks.push(t.meeting_point(&p)?);
                }
                sink.extra("geodesics.svg", &svg::disk_plot(&paths, &marks))?;
            }
            if replay {
                let replays = replay_triples(&p, &triples, TRACE_STEP)?;
                let missed = replays.iter().filter(|r| !r.confirmed(REPLAY_TOL)).count();
                log::info!("{} of {} meetings confirmed by the tracer", replays.len() - missed, replays.len());
                if missed > 0 {
                    eprintln!("{missed} of {} meetings not reproduced by the tracer", replays.len());
                    return Ok(Verdict::Fail);
                }
            }
        }
        Herglotz::Delta { grid, assert_flie } => {
            let triples = find_intersecting_pairs(&p, grid)?;
            let report = minimality_margin(&p, &triples)?;
            sink.json("delta.json", &report)?;
            let bound = if report.delta > 0.0 { Some(flie_from_delta(report.delta)?) } else { None };
            eprintln!(
                "delta = {} over {} meetings ({} failing); FLIE certified below {}",
                report.delta,
                report.examined,
                report.failing_triples.len(),
                bound.map_or("nothing".to_string(), |b| b.to_string())
            );
            if let Some(eps) = assert_flie {
                return Ok(bound.is_some_and(|b| eps < b).into());
            }
        }
    }
    Ok(Verdict::Pass)
}

fn run(cli: Cli) -> Result<Verdict> {
    if let Some(dir) = &cli.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let sink = Sink { dir: cli.out };
    match cli.command {
        Command::Gen(g) => gen(g, &sink),
        Command::Data { space } => {
            let loaded = load(&space)?;
            let data = travel_time_data(&loaded.space, &sensors(&loaded, &space)?)?;
            sink.main("data.csv", &data_to_csv(&data)?)?;
            Ok(Verdict::Pass)
        }
        Command::CheckFlie(a) => check(a, "check-flie", &sink),
        Command::CheckBlie(a) => check(a, "check-blie", &sink),
        Command::Midpoint(a) => check(a, "midpoint", &sink),
        Command::Gh { a, b, exact, eps, cap } => {
            let (la, lb) = (load(&a)?, load(&b)?);
            if exact {
                for (path, l) in [(&a, &la), (&b, &lb)] {
                    if l.space.len() > cap {
                        bail!("{} has {} points, above --cap {cap}", path.display(), l.space.len());
                    }
                }
            }
            let est = match eps {
                Some(e) => truncated_gh(&la.space, &lb.space, e, cap)?,
                None => gh_estimate(&la.space, &lb.space, cap)?,
            };
            sink.json("gh.json", &est)?;
            Ok(Verdict::Pass)
        }
        Command::Stability { a, b, eps, diam_bound, tol, cap, phi } => {
            stability(&a, &b, eps, diam_bound, tol, cap, phi, &sink)
        }
        Command::Herglotz(h) => herglotz(h, &sink),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("TTLAB_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("error: thread pool: {e}");
                    return ExitCode::from(2);
                }
            }
            _ => {
                eprintln!("error: TTLAB_THREADS must be a positive integer, got {v:?}");
                return ExitCode::from(2);
            }
        }
    }
    match run(cli) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
