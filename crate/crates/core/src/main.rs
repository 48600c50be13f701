//! Command-line front end: curve generation, censuses, bifurcation
//! structures, and witness searches, all with canonical JSON output.
//!
//! Exit codes: 0 success, 2 non-generic input (perturb and retry), 3
//! search failure, 1 anything else. Results go to standard output or
//! `--out`; diagnostics go to standard error.

use clap::{Args, Parser, Subcommand};
use curve_normals::error::{Error, Result};
use curve_normals::io::{canonical_json, census_json, curve_json, read_curve_file, vec3_json, ObjWriter};
use curve_normals::sqd::FootKind;
use curve_normals::wedges::FaceId;
use curve_normals::{focal, generate, infinity, wedges, witness};
use curve_normals::{Curve, FourierCurve, PolyCurve, Tolerances, Vec3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "curve-normals", version, about = "Normals from points to closed space curves")]
struct Cli {
    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Cap the worker thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the genericity checks on a curve file.
    Validate(CurveArg),

    /// Census of normals from a base point.
    Normals {
        #[command(flatten)]
        curve: CurveArg,
        /// Base point as `x,y,z`.
        #[arg(long, value_parser = parse_vec3)]
        point: Vec3,
        /// Sample grid for smooth root isolation (default `64 (order+1)`).
        #[arg(long)]
        grid: Option<usize>,
    },

    /// Focal lines, focal surface mesh, and focal self-intersections.
    Focal {
        #[command(flatten)]
        curve: CurveArg,
        /// Number of focal lines to sample.
        #[arg(long, default_value_t = 64)]
        t_count: usize,
        /// Half-extent of the surface along each focal line.
        #[arg(long, default_value_t = 4.0)]
        s_range: f64,
        /// Samples along each focal line.
        #[arg(long, default_value_t = 17)]
        s_count: usize,
        /// Also search for transverse self-intersections at this grid
        /// resolution.
        #[arg(long)]
        self_intersections: Option<usize>,
        /// Write the surface mesh as OBJ to this path.
        #[arg(long)]
        obj: Option<PathBuf>,
    },

    /// Chase a path of parameter triples and log bifurcation events.
    Chase {
        #[command(flatten)]
        curve: CurveArg,
        /// JSON file holding an array of `[t1, t2, t3]` nodes.
        #[arg(long)]
        path: PathBuf,
    },

    /// Wedge structures of a polyline: triple points, superscribed
    /// sphere, segment scans.
    Wedges {
        #[command(flatten)]
        curve: CurveArg,
        /// Enumerate triple intersections of wedge faces.
        #[arg(long)]
        triples: bool,
        /// Find a superscribed sphere.
        #[arg(long)]
        sphere: bool,
        /// Scan a segment `x0,y0,z0:x1,y1,z1` for census changes.
        #[arg(long, value_parser = parse_segment)]
        scan: Option<(Vec3, Vec3)>,
        /// Steps for the segment scan.
        #[arg(long, default_value_t = 256)]
        steps: usize,
        /// Write wedge face quads (clipped to a view box) as OBJ.
        #[arg(long)]
        obj: Option<PathBuf>,
    },

    /// Lune arrangement on the sphere of directions.
    Lunes {
        #[command(flatten)]
        curve: CurveArg,
        /// Include the tile census.
        #[arg(long)]
        census: bool,
        /// Sample this many random directions for coverage depth.
        #[arg(long)]
        coverage: Option<usize>,
        /// Report depth and the linear census for one direction `x,y,z`.
        #[arg(long, value_parser = parse_vec3)]
        direction: Option<Vec3>,
        /// Seed for coverage sampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write coverage samples as CSV (`dx,dy,dz,depth`) to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },

    /// Search for a witness point with many normals.
    Witness {
        #[command(flatten)]
        curve: CurveArg,
        /// Treat the curve as knotted regardless of file metadata.
        #[arg(long)]
        knotted: bool,
        /// Census-evaluation budget for the smooth search.
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exit with the search-failure code unless `n` reaches this.
        #[arg(long)]
        target: Option<usize>,
    },

    /// ED-degree of the distance problem for a degree-(d1,d2) curve.
    Edbound {
        #[arg(long)]
        d1: u32,
        #[arg(long)]
        d2: u32,
    },

    /// Average normal count over random base points.
    Aed {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },

    /// Write a built-in curve as a curve file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
}

#[derive(Args)]
struct CurveArg {
    /// Curve file (JSON).
    #[arg(long)]
    curve: PathBuf,
}

#[derive(Subcommand)]
enum GenKind {
    /// Circle of radius `r` in the xy-plane.
    Circle {
        #[arg(long, default_value_t = 1.0)]
        r: f64,
    },
    /// Ellipse `(a cos t, b sin t, lift sin 2t)`.
    Ellipse {
        #[arg(long, default_value_t = 2.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = 0.0)]
        lift: f64,
    },
    /// Lifted ellipse with a symmetry-breaking third-harmonic wobble.
    PerturbedEllipse {
        #[arg(long, default_value_t = 2.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = 0.1)]
        lift: f64,
        #[arg(long, default_value_t = 0.1)]
        wobble: f64,
    },
    /// Random Fourier curve with `1/k^2` coefficient decay.
    Fourier {
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random non-planar polygon.
    Polygon {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Polygonal trefoil knot.
    Trefoil {
        #[arg(long, default_value_t = 6)]
        sticks: usize,
    },
    /// Polygonal figure-eight knot.
    FigureEight {
        #[arg(long, default_value_t = 16)]
        sticks: usize,
    },
    /// Smooth Fourier trefoil on the torus.
    FourierTrefoil,
    /// The tetrahedral 4-gon.
    Tetra4,
}

fn parse_vec3(text: &str) -> std::result::Result<Vec3, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got {text:?}"));
    }
    let mut v = [0.0; 3];
    for (slot, part) in v.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad coordinate {part:?}: {e}"))?;
        if !slot.is_finite() {
            return Err(format!("coordinate {part:?} is not finite"));
        }
    }
    Ok(Vec3::new(v[0], v[1], v[2]))
}

fn parse_segment(text: &str) -> std::result::Result<(Vec3, Vec3), String> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| format!("expected x0,y0,z0:x1,y1,z1, got {text:?}"))?;
    Ok((parse_vec3(a)?, parse_vec3(b)?))
}

fn tolerances() -> Result<Tolerances> {
    let mut tol = Tolerances::default();
    if let Ok(text) = std::env::var("NC_EPS_GEOM") {
        let eps: f64 = text
            .parse()
            .map_err(|e| Error::InvalidInput(format!("NC_EPS_GEOM: {e}")))?;
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidInput("NC_EPS_GEOM must be positive".into()));
        }
        tol = tol.with_eps_geom(eps);
    }
    Ok(tol)
}

fn require_pl(curve: &Curve) -> Result<&PolyCurve> {
    match curve {
        Curve::Pl(c) => Ok(c),
        Curve::Fourier(_) => Err(Error::InvalidInput(
            "this subcommand needs a polyline curve file".into(),
        )),
    }
}

fn require_fourier(curve: &Curve) -> Result<&FourierCurve> {
    match curve {
        Curve::Fourier(c) => Ok(c),
        Curve::Pl(_) => Err(Error::InvalidInput(
            "this subcommand needs a Fourier curve file".into(),
        )),
    }
}

fn kind_str(kind: FootKind) -> &'static str {
    match kind {
        FootKind::Max => "max",
        FootKind::Min => "min",
    }
}

fn face_str(face: FaceId) -> &'static str {
    match face {
        FaceId::First => "first",
        FaceId::Second => "second",
    }
}

fn emit(cli_out: &Option<PathBuf>, value: &Value) -> Result<()> {
    let text = canonical_json(value);
    match cli_out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let tol = tolerances()?;
    match &cli.command {
        Command::Validate(arg) => {
            let curve = read_curve_file(&arg.curve)?;
            let (family, report) = match &curve {
                Curve::Pl(c) => ("pl", c.validate(&tol)),
                Curve::Fourier(c) => ("fourier", c.validate(64 * (c.order() + 1), &tol)),
            };
            emit(
                &cli.out,
                &json!({
                    "family": family,
                    "generic": report.is_generic(),
                    "planar": report.planar,
                    "collinear_triples": report.collinear_triples,
                    "parallel_edges": report.parallel_edges,
                    "parallel_ridges": report.parallel_ridges,
                    "degenerate_curvature": report.degenerate_curvature,
                    "irregular": report.irregular,
                    "summary": report.summary(),
                }),
            )
        }
        Command::Normals { curve, point, grid } => {
            let curve = read_curve_file(&curve.curve)?;
            let census = curve.normals(*point, *grid, &tol)?;
            emit(&cli.out, &census_json(&census))
        }
        Command::Focal {
            curve,
            t_count,
            s_range,
            s_count,
            self_intersections,
            obj,
        } => {
            let curve = read_curve_file(&curve.curve)?;
            let c = require_fourier(&curve)?;
            let mesh = focal::sample_focal_surface(c, *t_count, *s_range, *s_count, &tol)?;
            let lines: Vec<Value> = mesh
                .ts
                .iter()
                .map(|&t| {
                    let line = focal::focal_line(c, t, &tol)?;
                    Ok(json!({
                        "t": t,
                        "base": vec3_json(line.base),
                        "direction": vec3_json(line.direction),
                    }))
                })
                .collect::<Result<_>>()?;
            if let Some(path) = obj {
                let mut writer = ObjWriter::new();
                writer.object("focal_surface");
                let mut ids = vec![vec![0usize; mesh.ss.len()]; mesh.ts.len()];
                for (i, row) in mesh.points.iter().enumerate() {
                    for (j, &p) in row.iter().enumerate() {
                        ids[i][j] = writer.vertex(p);
                    }
                }
                for i in 0..mesh.ts.len() {
                    let i2 = (i + 1) % mesh.ts.len();
                    for j in 0..mesh.ss.len() - 1 {
                        writer.face(&[ids[i][j], ids[i2][j], ids[i2][j + 1], ids[i][j + 1]]);
                    }
                }
                std::fs::write(path, writer.finish())?;
            }
            let hits: Vec<Value> = match self_intersections {
                None => Vec::new(),
                Some(resolution) => focal::find_focal_self_intersections(c, *resolution, &tol)?
                    .iter()
                    .map(|hit| {
                        json!({
                            "point": vec3_json(hit.point),
                            "sheets": [
                                {"t": hit.sheets[0].0, "s": hit.sheets[0].1},
                                {"t": hit.sheets[1].0, "s": hit.sheets[1].1},
                            ],
                            "probes": hit.probes,
                        })
                    })
                    .collect(),
            };
            emit(
                &cli.out,
                &json!({
                    "t_count": t_count,
                    "s_range": s_range,
                    "s_count": s_count,
                    "lines": lines,
                    "self_intersections": hits,
                }),
            )
        }
        Command::Chase { curve, path } => {
            let curve = read_curve_file(&curve.curve)?;
            let c = require_fourier(&curve)?;
            let text = std::fs::read_to_string(path)?;
            let nodes: Vec<[f64; 3]> = serde_json::from_str(&text)?;
            let log = focal::chase_triple(c, &nodes, &tol)?;
            let node_values: Vec<Value> = log
                .nodes
                .iter()
                .zip(&log.censuses)
                .map(|(node, &n)| {
                    json!({
                        "params": node.params,
                        "y": vec3_json(node.y),
                        "kinds": node.kinds.iter().map(|&k| kind_str(k)).collect::<Vec<_>>(),
                        "condition": node.condition,
                        "n": n,
                    })
                })
                .collect();
            let events: Vec<Value> = log
                .events
                .iter()
                .map(|event| match event {
                    focal::ChaseEvent::Bifurcation { index, delta } => {
                        json!({"type": "bifurcation", "segment": index, "delta": delta})
                    }
                    focal::ChaseEvent::PatternChange { index, from, to } => json!({
                        "type": "pattern-change",
                        "segment": index,
                        "from": from.iter().map(|&k| kind_str(k)).collect::<Vec<_>>(),
                        "to": to.iter().map(|&k| kind_str(k)).collect::<Vec<_>>(),
                    }),
                    focal::ChaseEvent::InfinityPassage { index } => {
                        json!({"type": "infinity-passage", "segment": index})
                    }
                })
                .collect();
            emit(&cli.out, &json!({"nodes": node_values, "events": events}))
        }
        Command::Wedges {
            curve,
            triples,
            sphere,
            scan,
            steps,
            obj,
        } => {
            let curve = read_curve_file(&curve.curve)?;
            let c = require_pl(&curve)?;
            let mut out = serde_json::Map::new();
            if *triples {
                let scan = wedges::triple_intersections(c, &tol)?;
                let points: Vec<Value> = scan
                    .points
                    .iter()
                    .map(|tp| {
                        json!({
                            "point": vec3_json(tp.point),
                            "faces": tp.faces.iter().map(|&(v, f)| {
                                json!({"vertex": v, "face": face_str(f)})
                            }).collect::<Vec<_>>(),
                            "delta": tp.delta,
                            "probes": tp.probes.iter().map(|p| {
                                json!({"point": vec3_json(p.point), "n": p.n})
                            }).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                out.insert(
                    "triples".into(),
                    json!({
                        "points": points,
                        "singular_skipped": scan.singular_skipped,
                        "exterior_rejected": scan.exterior_rejected,
                        "probe_failed": scan.probe_failed,
                    }),
                );
            }
            if *sphere {
                let witness = wedges::superscribed_sphere(c, &tol)?;
                out.insert(
                    "sphere".into(),
                    json!({
                        "center": vec3_json(witness.center),
                        "radius": witness.radius,
                        "contacts": witness.contacts,
                    }),
                );
            }
            if let Some((y0, y1)) = scan {
                let events = wedges::crossing_scan(c, *y0, *y1, *steps, &tol)?;
                out.insert(
                    "scan".into(),
                    json!({
                        "from": vec3_json(*y0),
                        "to": vec3_json(*y1),
                        "events": events.iter().map(|e| json!({
                            "s": e.s,
                            "point": vec3_json(e.point),
                            "delta_n": e.delta_n,
                            "vertex": e.vertex,
                            "face": face_str(e.face),
                        })).collect::<Vec<_>>(),
                    }),
                );
            }
            if let Some(path) = obj {
                let mut writer = ObjWriter::new();
                let half = curve_extent(c);
                for i in 0..c.vertex_count() {
                    let w = wedges::wedge_of_vertex(c, i, &tol)?;
                    writer.object(&format!("wedge_{i}"));
                    for face in FaceId::BOTH {
                        let n = w.face_normal(face);
                        let e = w.face_constraint(face);
                        let side = n.cross(&e);
                        let a = writer.vertex(w.apex - half * side);
                        let b = writer.vertex(w.apex + half * side);
                        let c2 = writer.vertex(w.apex + half * side + half * e);
                        let d = writer.vertex(w.apex - half * side + half * e);
                        writer.face(&[a, b, c2, d]);
                    }
                }
                std::fs::write(path, writer.finish())?;
            }
            emit(&cli.out, &Value::Object(out))
        }
        Command::Lunes {
            curve,
            census,
            coverage,
            direction,
            seed,
            csv,
        } => {
            let curve = read_curve_file(&curve.curve)?;
            let c = require_pl(&curve)?;
            let lunes = infinity::lunes(c, &tol)?;
            let arrangement = infinity::build_arrangement(&lunes, &tol)?;
            let mut out = serde_json::Map::new();
            out.insert(
                "arrangement".into(),
                json!({
                    "vertices": arrangement.vertices.len(),
                    "edges": arrangement.edges.len(),
                    "tiles": arrangement.tiles.len(),
                    "euler": arrangement.euler(),
                    "valences": arrangement.vertices.iter().map(|v| v.valence).collect::<Vec<_>>(),
                }),
            );
            if *census {
                let tiles = infinity::tile_census(&arrangement);
                out.insert(
                    "census".into(),
                    json!({
                        "histogram": tiles.histogram.iter()
                            .map(|(k, v)| (k.to_string(), *v))
                            .collect::<std::collections::BTreeMap<String, usize>>(),
                        "bigons": tiles.bigons,
                        "largest": tiles.largest,
                    }),
                );
            }
            if let Some(n) = coverage {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut samples: Vec<(Vec3, usize)> = Vec::with_capacity(*n);
                while samples.len() < *n {
                    let d = Vec3::new(
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                    );
                    if d.norm() < 1e-3 {
                        continue;
                    }
                    if let Ok(depth) = infinity::coverage_depth(&lunes, d.normalize(), &tol) {
                        samples.push((d.normalize(), depth));
                    }
                }
                if let Some(path) = csv {
                    let mut text = String::from("dx,dy,dz,depth\n");
                    for (d, depth) in &samples {
                        text += &format!("{},{},{},{depth}\n", d.x, d.y, d.z);
                    }
                    std::fs::write(path, text)?;
                }
                let depths: Vec<usize> = samples.iter().map(|s| s.1).collect();
                out.insert(
                    "coverage".into(),
                    json!({
                        "count": n,
                        "min_depth": depths.iter().min(),
                        "max_depth": depths.iter().max(),
                    }),
                );
            }
            if let Some(d) = direction {
                let depth = infinity::coverage_depth(&lunes, *d, &tol)?;
                let linear = infinity::linear_critical_points(c, *d, &tol)?;
                out.insert(
                    "direction".into(),
                    json!({
                        "d": vec3_json(*d),
                        "depth": depth,
                        "linear_max": linear.max_count,
                        "linear_min": linear.min_count,
                        "linear_total": linear.total(),
                    }),
                );
            }
            emit(&cli.out, &Value::Object(out))
        }
        Command::Witness {
            curve,
            knotted,
            budget,
            seed,
            target,
        } => {
            let mut curve = read_curve_file(&curve.curve)?;
            if *knotted {
                curve = match curve {
                    Curve::Pl(c) => Curve::Pl(c.with_knotted(true)),
                    Curve::Fourier(c) => Curve::Fourier(c.with_knotted(true)),
                };
            }
            let result = match &curve {
                Curve::Pl(c) => witness::pl_witness_search(c, &tol)?,
                Curve::Fourier(c) => witness::smooth_witness_search(c, *budget, *seed, &tol)?,
            };
            if let Some(t) = target {
                if result.n < *t {
                    return Err(Error::SearchFailed {
                        best_n: result.n,
                        budget: *budget,
                    });
                }
            }
            emit(
                &cli.out,
                &json!({
                    "y": vec3_json(result.y),
                    "n": result.n,
                    "method": result.method.tag(),
                    "census": census_json(&result.census),
                }),
            )
        }
        Command::Edbound { d1, d2 } => {
            let bound = witness::ed_degree_bound(*d1, *d2)?;
            emit(&cli.out, &json!({"d1": d1, "d2": d2, "bound": bound}))
        }
        Command::Aed { curve, count, seed } => {
            let curve = read_curve_file(&curve.curve)?;
            let c = require_pl(&curve)?;
            let estimate = witness::aed_estimate(c, *count, *seed, &tol)?;
            emit(
                &cli.out,
                &json!({
                    "mean": estimate.mean,
                    "std_error": estimate.std_error,
                    "ci95": [estimate.ci95.0, estimate.ci95.1],
                    "min_n": estimate.min_n,
                    "max_n": estimate.max_n,
                    "count": estimate.count,
                    "two_v": 2 * c.vertex_count(),
                }),
            )
        }
        Command::Gen { kind } => {
            let curve = match kind {
                GenKind::Circle { r } => Curve::Fourier(generate::circle(*r)),
                GenKind::Ellipse { a, b, lift } => Curve::Fourier(generate::ellipse(*a, *b, *lift)),
                GenKind::PerturbedEllipse { a, b, lift, wobble } => {
                    Curve::Fourier(generate::perturbed_ellipse(*a, *b, *lift, *wobble))
                }
                GenKind::Fourier { order, seed } => {
                    Curve::Fourier(generate::random_fourier(*order, *seed, &tol)?)
                }
                GenKind::Polygon { n, seed } => Curve::Pl(generate::random_polygon(*n, *seed, &tol)?),
                GenKind::Trefoil { sticks } => Curve::Pl(generate::stick_trefoil(*sticks)?),
                GenKind::FigureEight { sticks } => Curve::Pl(generate::stick_figure_eight(*sticks)?),
                GenKind::FourierTrefoil => Curve::Fourier(generate::fourier_trefoil()),
                GenKind::Tetra4 => Curve::Pl(generate::tetra4()),
            };
            let report = match &curve {
                Curve::Pl(c) => c.validate(&tol),
                Curve::Fourier(c) => c.validate(64 * (c.order() + 1), &tol),
            };
            if !report.degenerate_curvature.is_empty() || !report.irregular.is_empty() {
                return Err(Error::NonGenericCurve(report.summary()));
            }
            if !report.is_generic() {
                eprintln!("note: curve is not fully generic: {}", report.summary());
            }
            emit(&cli.out, &curve_json(&curve))
        }
    }
}

fn curve_extent(c: &PolyCurve) -> f64 {
    c.diameter()
}

fn main() {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: could not configure {n} worker threads: {e}");
            std::process::exit(1);
        }
    }
    match run(&cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            let code = if e.is_non_generic() {
                2
            } else if e.is_search_failure() {
                3
            } else {
                1
            };
            std::process::exit(code);
        }
    }
}
