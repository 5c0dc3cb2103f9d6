//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::billiard::{BilliardError, Dir, WedgeSystem};
use crate::checks::{self, CheckOptions, Context, Outcome};
use crate::dynamics::{find_periodic_component, first_return_map, DynamicsError, DEFAULT_COMPONENT_CAP, DEFAULT_RETURN_CAP};
use crate::geometry::{GeometryError, Point, Region};
use crate::partition::verify_partition;
use crate::periods::{full_period_set, PeriodError};
use crate::render::{render_svg, RenderError, Scene};
use crate::similarity::{aperiodic_witness, build_similarity, spiral, SimilarityError, WitnessOptions};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapKind {
    #[value(name = "T")]
    T,
    #[value(name = "Tprime")]
    Tprime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Table,
    Components,
    Partition,
    Spiral,
}

#[derive(Debug, Parser)]
#[command(name = "dodeca", version, about = "Exact outer billiard outside the regular 12-gon")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 12)]
    pub seed: u64,
    /// Step cap for component and orbit searches.
    #[arg(long, global = true, env = "DODECA_MAX_ITER", default_value_t = DEFAULT_COMPONENT_CAP)]
    pub max_iter: u64,
    /// Piece-event cap for first-return construction.
    #[arg(long, global = true, default_value_t = DEFAULT_RETURN_CAP)]
    pub return_cap: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Construct the table and wedge; list the named points.
    Build {
        #[arg(long)]
        dump_json: bool,
    },
    /// Iterate T or T′ from an exact point.
    Orbit {
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        backward: usize,
        #[arg(long, value_enum, default_value = "Tprime")]
        map: MapKind,
    },
    /// Periodic component containing a point.
    Component {
        #[arg(long)]
        point: String,
    },
    /// First-return map to z1, z4, z14, x or a region JSON file.
    FirstReturn {
        #[arg(long)]
        region: String,
    },
    /// Tile Z′ by return tubes and periodic tubes.
    VerifyPartition {
        #[arg(long)]
        region: String,
    },
    /// Aperiodic point certificate.
    Aperiodic {
        #[arg(long, default_value_t = 10_000)]
        steps: u64,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = 9)]
        spiral_len: usize,
        #[arg(long)]
        emit_spiral: Option<PathBuf>,
    },
    /// Enumerate every possible period up to a bound.
    Periods {
        #[arg(long)]
        bound: u64,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        witnesses: bool,
    },
    /// Write an SVG figure.
    Render {
        #[arg(long, value_enum)]
        figure: Figure,
        #[arg(long)]
        out: PathBuf,
        /// Return region for the partition figure.
        #[arg(long, default_value = "z4")]
        region: String,
    },
    /// Run the acceptance checks.
    Verify {
        /// Run only these criteria.
        #[arg(long = "only")]
        only: Vec<u8>,
        /// Random cases per sampled property.
        #[arg(long, default_value_t = 1_000)]
        samples: usize,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("{0}")]
    Failed(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Inconclusive(_) => EXIT_INCONCLUSIVE,
            CliError::Failed(_) | CliError::Io(_) => EXIT_FAIL,
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> CliError {
        match e {
            GeometryError::PointParse { .. } | GeometryError::Json(_) => CliError::Usage(e.to_string()),
            e => CliError::Failed(e.to_string()),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> CliError {
        match e {
            DynamicsError::Inconclusive { .. } => CliError::Inconclusive(e.to_string()),
            e => CliError::Failed(e.to_string()),
        }
    }
}

impl From<BilliardError> for CliError {
    fn from(e: BilliardError) -> CliError {
        match e {
            BilliardError::CapExceeded { .. } => CliError::Inconclusive(e.to_string()),
            e => CliError::Failed(e.to_string()),
        }
    }
}

impl From<SimilarityError> for CliError {
    fn from(e: SimilarityError) -> CliError {
        match e {
            SimilarityError::Dynamics(d) => d.into(),
            e => CliError::Failed(e.to_string()),
        }
    }
}

impl From<PeriodError> for CliError {
    fn from(e: PeriodError) -> CliError {
        match e {
            PeriodError::ZeroBound => CliError::Usage(e.to_string()),
            e => CliError::Failed(e.to_string()),
        }
    }
}

impl From<RenderError> for CliError {
    fn from(e: RenderError) -> CliError {
        CliError::Failed(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> CliError {
        CliError::Failed(e.to_string())
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => EXIT_PASS,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn emit<T: Serialize>(out: &mut dyn Write, format: Format, value: &T, text: impl FnOnce() -> String) -> Result<(), CliError> {
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(value)?)?,
        Format::Text => writeln!(out, "{}", text())?,
    }
    Ok(())
}

fn parse_point(s: &str) -> Result<Point, CliError> {
    Point::parse_literal(s).map_err(|e| CliError::Usage(format!("--point {s:?}: {e}")))
}

fn named_region(w: &WedgeSystem, name: &str) -> Result<Region, CliError> {
    let needs_similarity = matches!(name, "z1" | "z4" | "z14" | "x");
    if needs_similarity {
        let s = build_similarity(w)?;
        return Ok(match name {
            "z1" => s.z1,
            "z4" => s.z4,
            "z14" => s.z14,
            _ => s.x,
        });
    }
    if name == "zp" {
        return Ok(w.zp.clone());
    }
    let text = std::fs::read_to_string(name).map_err(|e| CliError::Usage(format!("region {name:?}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("region {name:?}: {e}")))
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let w = WedgeSystem::new();
    let fmt = cli.format;
    match &cli.command {
        Command::Build { dump_json } => {
            let points = w.named_points();
            let as_json = *dump_json || fmt == Format::Json;
            let value: Vec<_> =
                points.iter().map(|p| json!({"name": p.name, "point": p.point.to_literal()})).collect();
            emit(out, if as_json { Format::Json } else { Format::Text }, &value, || {
                points.iter().map(|p| format!("{:<8} {}", p.name, p.point.to_literal())).collect::<Vec<_>>().join("\n")
            })?;
        }
        Command::Orbit { point, steps, backward, map } => {
            let p = parse_point(point)?;
            match map {
                MapKind::Tprime => {
                    let it = w.itinerary(&p, *steps, *backward);
                    let value = json!({
                        "start": p.to_literal(),
                        "code": it.code_string(),
                        "start_offset": it.start_offset,
                        "end": it.end.to_literal(),
                        "stopped": it.stop.as_ref().map(|s| json!({"step": s.step, "error": s.error.to_string()})),
                    });
                    emit(out, fmt, &value, || {
                        let mut s = format!("code  {}\nend   {}", it.code_string(), it.end.to_literal());
                        if let Some(stop) = &it.stop {
                            s += &format!("\nstopped at step {}: {}", stop.step, stop.error);
                        }
                        s
                    })?;
                    if it.stop.is_some() {
                        return Ok(EXIT_FAIL);
                    }
                }
                MapKind::T => {
                    let mut cur = p.clone();
                    for _ in 0..*backward {
                        cur = w.table.billiard_step(&cur, Dir::Backward)?;
                    }
                    let mut sectors = Vec::with_capacity(*steps);
                    for _ in 0..*steps {
                        sectors.push(w.table.sector_of(&cur)?);
                        cur = w.table.billiard_step(&cur, Dir::Forward)?;
                    }
                    let value = json!({"start": p.to_literal(), "sectors": sectors, "end": cur.to_literal()});
                    emit(out, fmt, &value, || {
                        let code: Vec<String> = sectors.iter().map(|s| s.to_string()).collect();
                        format!("sectors {}\nend     {}", code.join(" "), cur.to_literal())
                    })?;
                }
            }
        }
        Command::Component { point } => {
            let p = parse_point(point)?;
            let c = find_periodic_component(&w, &p, cli.max_iter)?;
            let periods = c.periods();
            let value = json!({"component": c, "periods": periods});
            emit(out, fmt, &value, || {
                format!(
                    "vertices {}\nT′-period {} (generic {})\nT-period {} (generic {})\nrotation {}\ncentre {}",
                    c.region.vertices().len(),
                    periods.center_tprime,
                    periods.generic_tprime,
                    periods.center_t,
                    periods.generic_t,
                    c.rotation_l,
                    c.center.to_literal()
                )
            })?;
        }
        Command::FirstReturn { region } => {
            let domain = named_region(&w, region)?;
            let rs = first_return_map(&w, &domain, cli.return_cap)?;
            emit(out, fmt, &rs, || {
                let mut s = format!("{} pieces\n", rs.pieces.len());
                for (i, p) in rs.pieces.iter().enumerate() {
                    let shape = crate::dynamics::shape_of(&p.source);
                    s += &format!(
                        "{i:>2}  time {:>5}  {} vertices{}\n",
                        p.return_time,
                        shape.vertices,
                        if shape.convex { "" } else { ", nonconvex" }
                    );
                }
                s.trim_end().to_string()
            })?;
        }
        Command::VerifyPartition { region } => {
            let domain = named_region(&w, region)?;
            let rs = first_return_map(&w, &domain, cli.return_cap)?;
            let report = verify_partition(&w, &w.zp, &rs, cli.max_iter)?;
            let value = json!({
                "n": report.n(),
                "periods": report.periods,
                "domain_area": report.domain_area,
                "return_tube_area": report.return_tube_area,
                "component_tube_area": report.component_tube_area,
                "area_identity": report.area_identity,
                "components": report.components,
            });
            emit(out, fmt, &value, || {
                format!(
                    "n = {}\nperiods {:?}\narea(Z′) = {}\nreturn tubes {} + periodic tubes {}\narea identity {}",
                    report.n(),
                    report.periods,
                    report.domain_area,
                    report.return_tube_area,
                    report.component_tube_area,
                    if report.area_identity { "holds" } else { "FAILS" }
                )
            })?;
            if !report.area_identity {
                return Ok(EXIT_FAIL);
            }
        }
        Command::Aperiodic { steps, depth, spiral_len, emit_spiral } => {
            let s = build_similarity(&w)?;
            let rs4 = first_return_map(&w, &s.z4, cli.return_cap)?;
            let opts = WitnessOptions { steps: *steps, depth: *depth, spiral_len: *spiral_len, ..WitnessOptions::default() };
            let wit = aperiodic_witness(&w, &s, &rs4, &opts)?;
            if let Some(path) = emit_spiral {
                let regions: Vec<&Region> = wit.spiral.iter().map(|e| &e.region).collect();
                std::fs::write(path, serde_json::to_string_pretty(&regions)?)?;
            }
            let value = json!({"seed": cli.seed, "witness": wit});
            emit(out, fmt, &value, || {
                let periods: Vec<u64> = wit.spiral.iter().map(|e| e.tprime_period).collect();
                let mut s = format!(
                    "y = {}\nno return within {} steps\ninside Γ_X^k(X) for k ≤ {}\nspiral T′-periods {:?}\ngrowth factors {:?}",
                    wit.y.to_literal(),
                    wit.certificate_steps,
                    wit.nested_depth,
                    periods,
                    wit.growth_factors
                );
                if let Some(n) = wit.boundary_hit_at {
                    s += &format!("\norbit meets a boundary at step {n}");
                }
                s
            })?;
            if wit.boundary_hit_at.is_some() {
                return Ok(EXIT_INCONCLUSIVE);
            }
        }
        Command::Periods { bound, json: path, witnesses } => {
            let set = full_period_set(*bound)?;
            let periods = set.periods();
            let value = if *witnesses {
                let list: Vec<_> = set
                    .generators
                    .iter()
                    .map(|(p, wit)| {
                        json!({
                            "period": p,
                            "family": wit.generator.family,
                            "index": wit.generator.index,
                            "k": wit.generator.k,
                            "n": wit.generator.n,
                            "doubled": wit.doubled,
                        })
                    })
                    .collect();
                json!({"periods": periods, "witnesses": list})
            } else {
                json!(periods)
            };
            if let Some(path) = path {
                std::fs::write(path, serde_json::to_string_pretty(&value)?)?;
            }
            emit(out, fmt, &value, || serde_json::to_string(&periods).expect("integers"))?;
        }
        Command::Render { figure, out: path, region } => {
            let scene = figure_scene(&w, *figure, region, cli)?;
            std::fs::write(path, render_svg(&scene)?)?;
            emit(out, fmt, &json!({"written": path}), || format!("wrote {}", path.display()))?;
        }
        Command::Verify { only, samples } => {
            let opts = CheckOptions { seed: cli.seed, samples: *samples, component_cap: cli.max_iter, return_cap: cli.return_cap, ..CheckOptions::default() };
            let ctx = Context::new(opts);
            let ids: Vec<u8> = if only.is_empty() { checks::CHECKS.iter().map(|c| c.0).collect() } else { only.clone() };
            let mut results = Vec::new();
            for id in ids {
                let r = checks::run_check(&ctx, id).ok_or_else(|| CliError::Usage(format!("no criterion {id}")))?;
                if fmt == Format::Text {
                    writeln!(out, "{}", verify_line(&r))?;
                }
                results.push(r);
            }
            if fmt == Format::Json {
                writeln!(out, "{}", serde_json::to_string_pretty(&json!({"seed": cli.seed, "checks": results}))?)?;
            }
            let code = if results.iter().any(|r| r.outcome == Outcome::Fail) {
                EXIT_FAIL
            } else if results.iter().any(|r| r.outcome == Outcome::Inconclusive) {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_PASS
            };
            return Ok(code);
        }
    }
    Ok(EXIT_PASS)
}

pub fn verify_line(r: &checks::CheckResult) -> String {
    let tag = match r.outcome {
        Outcome::Pass => "PASS",
        Outcome::Fail => "FAIL",
        Outcome::Inconclusive => "INCONCLUSIVE",
    };
    format!("{tag:<12} {:>2} {:<24} {:>7.1}s  {}", r.id, r.name, r.seconds, r.detail)
}

fn figure_scene(w: &WedgeSystem, figure: Figure, region: &str, cli: &Cli) -> Result<Scene, CliError> {
    let mut scene = Scene::new();
    match figure {
        Figure::Table => {
            let lo = Point::from_ints(-4, -4);
            let hi = Point::from_ints(8, 8);
            scene = Scene::with_clip(lo, hi);
            scene.region("table", w.table.polygon.clone(), "table");
            scene.region("wedge", w.wedge.clone(), "wedge");
            for j in 1..=6 {
                scene.region(format!("alpha{j}"), w.alpha[j].clone(), "piece");
            }
            for p in w.named_points().into_iter().filter(|p| !p.name.starts_with("A^")) {
                scene.point(p.name, p.point, "named");
            }
        }
        Figure::Components => {
            scene.region("table", w.table.polygon.clone(), "table");
            scene.region("zp", w.zp.clone(), "outline");
            for k in 1..=4 {
                let c = find_periodic_component(w, &w.o[k], cli.max_iter)?;
                scene.region(format!("W{k}"), c.region, "red");
                scene.point(format!("O{k}"), w.o[k].clone(), "named");
            }
        }
        Figure::Partition => {
            let domain = named_region(w, region)?;
            let rs = first_return_map(w, &domain, cli.return_cap)?;
            let report = verify_partition(w, &w.zp, &rs, cli.max_iter)?;
            for (i, p) in rs.pieces.iter().enumerate() {
                for (j, tile) in p.tube(w).into_iter().enumerate() {
                    scene.region(format!("return{i}-{j}"), tile, "green");
                }
            }
            for (i, c) in report.components.iter().enumerate() {
                for (j, tile) in c.tube(w).into_iter().enumerate() {
                    scene.region(format!("component{i}-{j}"), tile, "red");
                }
            }
        }
        Figure::Spiral => {
            let s = build_similarity(w)?;
            scene.region("z4", s.z4.clone(), "outline");
            scene.region("x", s.x.clone(), "outline-x");
            for (n, y) in spiral(w, &s, 9)?.into_iter().enumerate() {
                scene.region(format!("Y{n}"), y, "spiral");
            }
        }
    }
    Ok(scene)
}
