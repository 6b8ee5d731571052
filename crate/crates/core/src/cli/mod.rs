//! The `sizefn` command-line front end.
//!
//! Every subcommand writes its result into `--out` once all work has joined,
//! prints a short summary to standard output and returns the process exit
//! code: 0 on success, 1 on I/O or parse failures, 2 on invariant violations,
//! 3 when `verify` leaves coordinates unexplained.

mod args;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

pub use args::*;

use crate::critical::{
    check_discontinuity_localization, hausdorff_dd, lb_pseudocritical_with, pseudocritical_projection_with, DdGrid,
    MeshGeometry, ProjectionIndex, Tolerances,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::extended::ExtendedReal;
use crate::foliation::{reduce_measuring, sample_admissible, AdmissiblePair};
use crate::matching::matching_distance;
use crate::plot::{diagram_plot, region_plot};
use crate::shapes::{cube_surface, icosphere, mesh_size_graph, Measure};
use crate::size_pair::{load_mesh_pair, load_size_graph, save_size_graph, SizeGraph};
use crate::sublevel::{cornerpoints, FormalSeries};

/// Exit code for a verification run with unexplained coordinates.
pub const EXIT_UNEXPLAINED: i32 = 3;

/// Parses `argv`, runs the subcommand and returns the exit code. Errors are
/// reported on standard error.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    match RunConfig::try_parse_from(argv) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                2
            } else {
                0
            }
        }
    }
}

pub fn run(cfg: &RunConfig) -> i32 {
    match dispatch(cfg) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cfg: &RunConfig) -> Result<i32> {
    match &cfg.command {
        Command::Corners { input, pairs, output } => cmd_corners(input, pairs, output),
        Command::Match {
            input,
            second,
            pairs,
            output,
        } => cmd_match(input, second, pairs, output),
        Command::Reduce { input, pairs, output } => cmd_reduce(input, pairs, output),
        Command::SamplePairs {
            k,
            input,
            values,
            sample,
            seed,
            strategy,
            offset_range,
            output,
        } => cmd_sample_pairs(*k, input.as_deref(), values.as_deref(), *sample, *seed, *strategy, *offset_range, output),
        Command::Pseudocrit {
            input,
            pairs,
            projection,
            tolerances,
            output,
        } => cmd_pseudocrit(input, pairs, projection.as_deref(), &tolerances.tolerances(), output),
        Command::Verify {
            input,
            pairs,
            tolerances,
            output,
        } => cmd_verify(input, pairs, &tolerances.tolerances(), output),
        Command::Dd {
            input,
            second,
            pairs,
            grid,
            output,
        } => cmd_dd(input, second, pairs, grid, output),
        Command::Plot {
            input,
            series,
            pairs,
            grid,
            output,
        } => cmd_plot(input, series.as_deref(), pairs, grid, output),
        Command::Mesh {
            shape,
            level,
            measure,
            output,
        } => cmd_mesh(*shape, *level, *measure, output),
    }
}

/// Loads a size-graph JSON, or an OFF mesh with a values CSV.
pub fn load_input(path: &Path, values: Option<&Path>) -> Result<SizeGraph> {
    let is_off = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("off"));
    match (is_off, values) {
        (true, Some(v)) => load_mesh_pair(path, v),
        (true, None) => Err(Error::precondition(format!(
            "{}: an OFF mesh needs a values CSV",
            path.display()
        ))),
        (false, None) => load_size_graph(path),
        (false, Some(_)) => Err(Error::precondition("a values CSV only applies to OFF meshes")),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PairFile {
    One(RawPair),
    Many(Vec<RawPair>),
}

#[derive(Deserialize)]
struct RawPair {
    l: Vec<f64>,
    b: Vec<f64>,
}

/// Loads one admissible pair or a list of them. Malformed JSON is a parse
/// error; pairs violating admissibility are invariant errors.
pub fn load_pairs(path: &Path) -> Result<Vec<AdmissiblePair>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let file: PairFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
        location: format!("{}:{}:{}", path.display(), e.line(), e.column()),
        message: e.to_string(),
    })?;
    let raw = match file {
        PairFile::One(p) => vec![p],
        PairFile::Many(ps) => ps,
    };
    if raw.is_empty() {
        return Err(Error::precondition(format!("{}: empty pair list", path.display())));
    }
    raw.into_iter().map(|p| AdmissiblePair::new(p.l, p.b)).collect()
}

/// Resolves the pair source; `k = 1` without a source means the identity pair.
pub fn resolve_pairs(src: &PairArgs, g: &SizeGraph) -> Result<Vec<AdmissiblePair>> {
    let pairs = match (&src.pairs, src.sample) {
        (Some(path), None) => load_pairs(path)?,
        (None, Some(n)) => {
            let range = src.offset_range.unwrap_or_else(|| g.max_abs_value());
            sample_admissible(g.k(), n, src.strategy.into(), src.seed, range)?
        }
        (None, None) if g.k() == 1 => vec![AdmissiblePair::identity()],
        (None, None) => {
            return Err(Error::precondition(format!(
                "k = {} needs an admissible-pair source (--pairs or --sample)",
                g.k()
            )))
        }
        (Some(_), Some(_)) => return Err(Error::precondition("give exactly one of --pairs and --sample")),
    };
    if let Some(p) = pairs.iter().find(|p| p.k() != g.k()) {
        return Err(Error::DimensionMismatch {
            expected: g.k(),
            found: p.k(),
        });
    }
    Ok(pairs)
}

fn write_file(out: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(out).map_err(|e| Error::Io {
        path: out.to_path_buf(),
        source: e,
    })?;
    let path = out.join(name);
    fs::write(&path, contents).map_err(|e| Error::Io {
        path: path.clone(),
        source: e,
    })?;
    Ok(path)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let wrap = |e: csv::Error| Error::precondition(format!("csv output: {e}"));
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(&row).map_err(wrap)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::precondition(format!("csv output: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn series_csv(series: &FormalSeries) -> Result<String> {
    csv_table(
        &["x", "y", "mult"],
        series
            .points()
            .iter()
            .map(|c| vec![c.x.to_string(), c.y.to_string(), c.mult.to_string()]),
    )
}

fn series_for(g: &SizeGraph, p: &AdmissiblePair) -> Result<FormalSeries> {
    Ok(cornerpoints(g, &reduce_measuring(g, p)?))
}

fn summarize(series: &FormalSeries) -> String {
    let xs = series.points().iter().map(|c| c.x);
    let lo = xs.clone().fold(f64::INFINITY, f64::min);
    let hi = series
        .points()
        .iter()
        .filter_map(|c| c.y.finite())
        .fold(f64::NEG_INFINITY, f64::max);
    format!(
        "{} proper cornerpoint(s) (multiplicity {}), {} cornerline(s), min abscissa {lo}, max finite ordinate {}",
        series.proper().count(),
        series.proper_multiplicity(),
        series.cornerline_multiplicity(),
        if hi.is_finite() { hi.to_string() } else { "none".into() }
    )
}

pub fn cmd_corners(input: &InputArgs, src: &PairArgs, out: &OutputArgs) -> Result<i32> {
    let g = load_input(&input.input, input.values.as_deref())?;
    let pairs = resolve_pairs(src, &g)?;
    let all = Execution::default().map(&pairs, |p| series_for(&g, p));
    let all = all.into_iter().collect::<Result<Vec<_>>>()?;
    let ext = match out.format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    for (i, series) in all.iter().enumerate() {
        let name = if all.len() == 1 {
            format!("corners.{ext}")
        } else {
            format!("corners-{i:03}.{ext}")
        };
        let text = match out.format {
            Format::Json => {
                let mut s = series.to_json();
                s.push('\n');
                s
            }
            Format::Csv => series_csv(series)?,
        };
        let path = write_file(&out.out, &name, &text)?;
        println!("{}: {}", path.display(), summarize(series));
    }
    Ok(0)
}

#[derive(Serialize)]
struct PairDistance {
    l: Vec<f64>,
    b: Vec<f64>,
    #[serde(flatten)]
    result: crate::matching::MatchResult,
}

pub fn cmd_match(input: &InputArgs, second: &SecondInputArgs, src: &PairArgs, out: &OutputArgs) -> Result<i32> {
    let g1 = load_input(&input.input, input.values.as_deref())?;
    let g2 = load_input(&second.input2, second.values2.as_deref())?;
    if g1.k() != g2.k() {
        return Err(Error::DimensionMismatch {
            expected: g1.k(),
            found: g2.k(),
        });
    }
    let pairs = resolve_pairs(src, &g1)?;
    let results = Execution::default().map(&pairs, |p| -> Result<PairDistance> {
        let result = matching_distance(&series_for(&g1, p)?, &series_for(&g2, p)?)?;
        Ok(PairDistance {
            l: p.l().to_vec(),
            b: p.b().to_vec(),
            result,
        })
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    let max = results
        .iter()
        .fold(ExtendedReal::Finite(0.0), |m, r| m.max(r.result.d_match));
    let path = match out.format {
        Format::Json => write_file(&out.out, "match.json", &to_json(&json!({ "pairs": results, "max": max })))?,
        Format::Csv => write_file(
            &out.out,
            "match.csv",
            &csv_table(
                &["pair", "d_match"],
                results
                    .iter()
                    .enumerate()
                    .map(|(i, r)| vec![i.to_string(), r.result.d_match.to_string()]),
            )?,
        )?,
    };
    println!("{}: {} pair(s), max d_match {max}", path.display(), results.len());
    Ok(0)
}

pub fn cmd_reduce(input: &InputArgs, src: &PairArgs, out: &OutputArgs) -> Result<i32> {
    let g = load_input(&input.input, input.values.as_deref())?;
    let pairs = resolve_pairs(src, &g)?;
    let reduced = pairs
        .iter()
        .map(|p| reduce_measuring(&g, p))
        .collect::<Result<Vec<_>>>()?;
    let path = match out.format {
        Format::Json => {
            let items: Vec<_> = pairs
                .iter()
                .zip(&reduced)
                .map(|(p, f)| json!({ "l": p.l(), "b": p.b(), "values": f.values() }))
                .collect();
            write_file(&out.out, "reduced.json", &to_json(&items))?
        }
        Format::Csv => {
            let header: Vec<String> = std::iter::once("vertex".to_string())
                .chain((0..pairs.len()).map(|i| format!("pair{i}")))
                .collect();
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let rows = (0..g.n_vertices()).map(|v| {
                std::iter::once(v.to_string())
                    .chain(reduced.iter().map(|f| f.values()[v].to_string()))
                    .collect()
            });
            write_file(&out.out, "reduced.csv", &csv_table(&header, rows)?)?
        }
    };
    println!("{}: {} vertices × {} pair(s)", path.display(), g.n_vertices(), pairs.len());
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_sample_pairs(
    k: Option<usize>,
    input: Option<&Path>,
    values: Option<&Path>,
    n: usize,
    seed: u64,
    strategy: StrategyArg,
    offset_range: Option<f64>,
    out: &OutputArgs,
) -> Result<i32> {
    let graph = input.map(|p| load_input(p, values)).transpose()?;
    let k = match (k, &graph) {
        (Some(k), Some(g)) if k != g.k() => {
            return Err(Error::DimensionMismatch {
                expected: g.k(),
                found: k,
            })
        }
        (Some(k), _) => k,
        (None, Some(g)) => g.k(),
        (None, None) => return Err(Error::precondition("sample-pairs needs --k or --input")),
    };
    let range = offset_range.unwrap_or_else(|| graph.as_ref().map_or(1.0, SizeGraph::max_abs_value));
    let pairs = sample_admissible(k, n, strategy.into(), seed, range)?;
    let path = match out.format {
        Format::Json => write_file(&out.out, "pairs.json", &to_json(&pairs))?,
        Format::Csv => {
            let header: Vec<String> = (0..k)
                .map(|i| format!("l{i}"))
                .chain((0..k).map(|i| format!("b{i}")))
                .collect();
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let rows = pairs
                .iter()
                .map(|p| p.l().iter().chain(p.b()).map(f64::to_string).collect());
            write_file(&out.out, "pairs.csv", &csv_table(&header, rows)?)?
        }
    };
    println!("{}: {} pair(s), k = {k}", path.display(), pairs.len());
    Ok(0)
}

pub fn cmd_pseudocrit(
    input: &InputArgs,
    src: &PairArgs,
    projection: Option<&[usize]>,
    tol: &Tolerances,
    out: &OutputArgs,
) -> Result<i32> {
    let g = load_input(&input.input, input.values.as_deref())?;
    let geom = MeshGeometry::new(&g)?;
    let exec = Execution::default();
    let reports = match projection {
        Some(indices) => {
            let rho = ProjectionIndex::new(indices.to_vec(), g.k())?;
            vec![pseudocritical_projection_with(&geom, &g, &rho, tol, exec)?]
        }
        None => resolve_pairs(src, &g)?
            .iter()
            .map(|p| lb_pseudocritical_with(&geom, &g, p, tol, exec))
            .collect::<Result<Vec<_>>>()?,
    };
    let path = match out.format {
        Format::Json if reports.len() == 1 => write_file(&out.out, "pseudocrit.json", &to_json(&reports[0]))?,
        Format::Json => write_file(&out.out, "pseudocrit.json", &to_json(&reports))?,
        Format::Csv => {
            let rows = reports.iter().enumerate().flat_map(|(i, r)| {
                r.pseudocritical.iter().map(move |w| {
                    vec![
                        i.to_string(),
                        w.vertex.to_string(),
                        w.residual.to_string(),
                        serde_json::to_string(&w.value).expect("value serializes"),
                    ]
                })
            });
            write_file(
                &out.out,
                "pseudocrit.csv",
                &csv_table(&["report", "vertex", "residual", "value"], rows)?,
            )?
        }
    };
    let flagged: Vec<usize> = reports.iter().map(|r| r.pseudocritical.len()).collect();
    println!("{}: flagged vertices per report {flagged:?}", path.display());
    Ok(0)
}

pub fn cmd_verify(input: &InputArgs, src: &PairArgs, tol: &Tolerances, out: &OutputArgs) -> Result<i32> {
    let g = load_input(&input.input, input.values.as_deref())?;
    if g.positions().is_none() || g.triangles().is_none() {
        return Err(Error::Geometry(
            "geometry required: verify needs vertex positions and triangles".into(),
        ));
    }
    let pairs = resolve_pairs(src, &g)?;
    let report = check_discontinuity_localization(&g, &pairs, tol, Execution::default())?;
    let path = match out.format {
        Format::Json => write_file(&out.out, "verify.json", &to_json(&report))?,
        Format::Csv => {
            let rows = report.pairs.iter().flat_map(|p| {
                p.coordinates.iter().map(|c| {
                    vec![
                        c.pair.to_string(),
                        c.cornerpoint.to_string(),
                        format!("{:?}", c.axis).to_lowercase(),
                        c.value.to_string(),
                        c.distance.to_string(),
                        c.projection
                            .as_ref()
                            .map(|r| format!("{:?}", r.indices()))
                            .unwrap_or_default(),
                        c.explained.to_string(),
                    ]
                })
            });
            write_file(
                &out.out,
                "verify.csv",
                &csv_table(
                    &["pair", "cornerpoint", "axis", "value", "distance", "projection", "explained"],
                    rows,
                )?,
            )?
        }
    };
    let total = report.coordinate_count();
    println!(
        "{}: {} of {total} coordinate(s) explained over {} pair(s)",
        path.display(),
        total - report.unexplained.len(),
        pairs.len()
    );
    if report.all_explained() {
        Ok(0)
    } else {
        eprintln!("{} coordinate(s) unexplained", report.unexplained.len());
        Ok(EXIT_UNEXPLAINED)
    }
}

pub fn cmd_dd(
    input: &InputArgs,
    second: &SecondInputArgs,
    src: &PairArgs,
    grid: &GridArgs,
    out: &OutputArgs,
) -> Result<i32> {
    let g1 = load_input(&input.input, input.values.as_deref())?;
    let g2 = load_input(&second.input2, second.values2.as_deref())?;
    let pairs = resolve_pairs(src, &g1)?;
    let dd_grid = DdGrid {
        n_grid: grid.n_grid,
        s_range: grid.s_range,
        t_range: grid.t_range,
    };
    let d = hausdorff_dd(&g1, &g2, &pairs, &dd_grid, Execution::default())?;
    let path = match out.format {
        Format::Json => write_file(
            &out.out,
            "dd.json",
            &to_json(&json!({ "d_D": d, "n_grid": grid.n_grid, "pairs": pairs.len() })),
        )?,
        Format::Csv => write_file(&out.out, "dd.csv", &csv_table(&["d_D"], [vec![d.to_string()]])?)?,
    };
    println!("{}: d_D = {d}", path.display());
    Ok(0)
}

pub fn cmd_plot(
    input: &OptionalInputArgs,
    series_path: Option<&Path>,
    src: &PairArgs,
    grid: &GridArgs,
    out: &OutputArgs,
) -> Result<i32> {
    let series = match (series_path, &input.input) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.to_path_buf(),
                source: e,
            })?;
            FormalSeries::from_json(&text)?
        }
        (None, Some(path)) => {
            let g = load_input(path, input.values.as_deref())?;
            let pairs = resolve_pairs(src, &g)?;
            series_for(&g, &pairs[0])?
        }
        (None, None) => return Err(Error::precondition("plot needs --input or --series")),
    };
    let window = match (grid.s_range, grid.t_range) {
        (Some(s), Some(t)) => Some(crate::plot::Window {
            lo: s.0.min(t.0),
            hi: s.1.max(t.1),
        }),
        (Some(r), None) | (None, Some(r)) => Some(crate::plot::Window { lo: r.0, hi: r.1 }),
        (None, None) => None,
    };
    let region = region_plot(&series, window, grid.n_grid)?;
    let p1 = write_file(&out.out, "region.svg", &region.svg)?;
    let p2 = write_file(&out.out, "diagram.svg", &diagram_plot(&series, window)?)?;
    println!(
        "{}, {}: values present {:?}",
        p1.display(),
        p2.display(),
        region.values
    );
    Ok(0)
}

pub fn cmd_mesh(shape: ShapeArg, level: usize, measure: MeasureArg, out: &OutputArgs) -> Result<i32> {
    let mesh = match shape {
        ShapeArg::Icosphere => {
            if level > 7 {
                return Err(Error::SizeGuard(format!("icosphere level {level} exceeds 7")));
            }
            icosphere(level as u32)
        }
        ShapeArg::Cube => {
            if !(1..=200).contains(&level) {
                return Err(Error::precondition("cube level must lie in 1..=200"));
            }
            cube_surface(level)
        }
    };
    let measure = match measure {
        MeasureArg::AbsXz => Measure::AbsXZ,
        MeasureArg::Xz => Measure::XZ,
        MeasureArg::X => Measure::X,
    };
    let g = mesh_size_graph(&mesh, measure)?;
    let name = format!(
        "{}-{level}.json",
        match shape {
            ShapeArg::Icosphere => "icosphere",
            ShapeArg::Cube => "cube",
        }
    );
    fs::create_dir_all(&out.out).map_err(|e| Error::Io {
        path: out.out.clone(),
        source: e,
    })?;
    let path = out.out.join(name);
    save_size_graph(&g, &path)?;
    println!(
        "{}: {} vertices, {} triangles, k = {}",
        path.display(),
        g.n_vertices(),
        g.triangles().map_or(0, <[_]>::len),
        g.k()
    );
    Ok(0)
}
