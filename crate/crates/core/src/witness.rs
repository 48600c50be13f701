//! Witness points and certificates: the unknot certificate, searches for
//! points with many normals (6 for smooth curves, 8 and 10 for polylines),
//! ED-degree arithmetic, and knot-diagram plumbing for the `knotted`
//! metadata flag.

use crate::curve::{FourierCurve, PolyCurve};
use crate::error::{Error, Result};
use crate::focal::focal_line;
use crate::infinity::orthobasis;
use crate::sqd::{default_grid, pl_normals, smooth_normals, NormalCensus};
use crate::tol::Tolerances;
use crate::wedges::{superscribed_sphere, triple_intersections};
use crate::{Curve, Vec3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Vec2 = nalgebra::Vector2<f64>;

const TAU: f64 = std::f64::consts::TAU;

/// How a witness point was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessMethod {
    SuperscribedSphere,
    TripleWedge,
    FocalProbe,
    RandomAscent,
}

impl WitnessMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            WitnessMethod::SuperscribedSphere => "superscribed-sphere",
            WitnessMethod::TripleWedge => "triple-wedge",
            WitnessMethod::FocalProbe => "focal-probe",
            WitnessMethod::RandomAscent => "random-ascent",
        }
    }
}

/// A point with many normals, together with the census that proves it.
#[derive(Debug, Clone)]
pub struct WitnessResult {
    pub y: Vec3,
    pub n: usize,
    pub method: WitnessMethod,
    pub census: NormalCensus,
}

/// Outcome of the two-normals unknot test.
#[derive(Debug, Clone)]
pub enum UnknotOutcome {
    /// `n = 2` at `y`: every sphere about `y` meets the curve at most
    /// twice, so the curve is an unknot.
    Certified { census: NormalCensus },
    /// `n > 2` here; says nothing about other base points.
    Inconclusive { n: usize },
}

impl UnknotOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, UnknotOutcome::Certified { .. })
    }
}

/// Certifies the curve as an unknot when the census at `y` has exactly two
/// feet (the nearest and farthest points).
pub fn unknot_certificate(curve: &Curve, y: Vec3, tol: &Tolerances) -> Result<UnknotOutcome> {
    let census = curve.normals(y, None, tol)?;
    if census.n() == 2 {
        Ok(UnknotOutcome::Certified { census })
    } else {
        Ok(UnknotOutcome::Inconclusive { n: census.n() })
    }
}

fn lex_less(a: Vec3, b: Vec3) -> bool {
    (a.x, a.y, a.z) < (b.x, b.y, b.z)
}

fn better(a: &Option<WitnessResult>, b: &Option<WitnessResult>) -> bool {
    match (a, b) {
        (_, None) => true,
        (None, _) => false,
        (Some(x), Some(y)) => x.n > y.n || (x.n == y.n && lex_less(x.y, y.y)),
    }
}

/// Searches for a point with at least 6 normals to a smooth curve.
///
/// Seed points are midpoints of close approaches between sampled focal
/// lines (where sheets of the focal surface stack or cross, the chambers
/// between them hold the extra normal pairs), plus uniform random points.
/// Each seed then random-ascends: a step that lowers the census is
/// reflected, one that raises it is kept. `budget` caps the total number
/// of census evaluations; the best point is returned, with ties broken
/// toward lexicographically smaller `y` so the result is independent of
/// thread schedule.
pub fn smooth_witness_search(
    curve: &FourierCurve,
    budget: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<WitnessResult> {
    if budget == 0 {
        return Err(Error::InvalidInput("search budget must be positive".into()));
    }
    let report = curve.validate(64 * (curve.order() + 1), tol);
    if report.planar {
        return Err(Error::NonGenericCurve(
            "curve is planar; perturb it off the plane before searching".into(),
        ));
    }
    let (centroid, diameter) = curve.centroid_and_diameter(64 * (curve.order() + 1));
    let grid = default_grid(curve.order());

    // Focal-line close-approach midpoints.
    let nt = 48;
    let lines: Vec<_> = (0..nt)
        .filter_map(|i| focal_line(curve, TAU * i as f64 / nt as f64, tol).ok())
        .collect();
    let mut pairs: Vec<(f64, Vec3)> = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let dt = (lines[i].t - lines[j].t).rem_euclid(TAU);
            if dt.min(TAU - dt) < TAU / 12.0 {
                continue;
            }
            let (p1, d1) = (lines[i].base, lines[i].direction);
            let (p2, d2) = (lines[j].base, lines[j].direction);
            let r = p1 - p2;
            let b = d1.dot(&d2);
            let den = 1.0 - b * b;
            if den < 1e-12 {
                continue;
            }
            let s1 = (b * d2.dot(&r) - d1.dot(&r)) / den;
            let s2 = (d2.dot(&r) - b * d1.dot(&r)) / den;
            if s1.abs() > 3.0 * diameter || s2.abs() > 3.0 * diameter {
                continue;
            }
            let (a, c) = (p1 + s1 * d1, p2 + s2 * d2);
            let gap = (a - c).norm();
            if gap < 0.75 * diameter {
                pairs.push((gap, 0.5 * (a + c)));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite gaps"));
    pairs.truncate(96);

    let mut seeds: Vec<(Vec3, WitnessMethod)> = pairs
        .into_iter()
        .map(|(_, p)| (p, WitnessMethod::FocalProbe))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..32 {
        let p = centroid
            + diameter
                * Vec3::new(
                    rng.gen_range(-0.75..0.75),
                    rng.gen_range(-0.75..0.75),
                    rng.gen_range(-0.75..0.75),
                );
        seeds.push((p, WitnessMethod::RandomAscent));
    }
    let slice = (budget / seeds.len().max(1)).clamp(1, 400);

    let best = seeds
        .par_iter()
        .enumerate()
        .map(|(idx, &(start, method))| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ (idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut evals = 0usize;
            let eval = |y: Vec3, rng: &mut ChaCha8Rng, evals: &mut usize| {
                let mut p = y;
                for _ in 0..4 {
                    if *evals >= slice {
                        return None;
                    }
                    *evals += 1;
                    match smooth_normals(curve, p, grid, tol) {
                        Ok(c) => return Some(c),
                        Err(_) => {
                            p = y + 1e-6
                                * diameter
                                * Vec3::new(
                                    rng.gen_range(-1.0..1.0),
                                    rng.gen_range(-1.0..1.0),
                                    rng.gen_range(-1.0..1.0),
                                );
                        }
                    }
                }
                None
            };
            let census = eval(start, &mut rng, &mut evals)?;
            let mut best = WitnessResult {
                y: census.y,
                n: census.n(),
                method,
                census,
            };
            let mut y = best.y;
            let mut n = best.n;
            let mut trust = 0.08 * diameter;
            let mut fails = 0usize;
            while evals < slice && fails < 25 {
                let dir = Vec3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                if dir.norm() < 1e-9 {
                    continue;
                }
                let step = trust * rng.gen_range(0.2..1.0) * dir.normalize();
                let forward = eval(y + step, &mut rng, &mut evals);
                let accept = match &forward {
                    Some(c) if c.n() > n => forward,
                    Some(c) if c.n() < n => {
                        // Crossed a sheet the wrong way; reflect.
                        match eval(y - step, &mut rng, &mut evals) {
                            Some(r) if r.n() > n => Some(r),
                            _ => None,
                        }
                    }
                    Some(_) if rng.gen_bool(0.3) => forward,
                    _ => None,
                };
                match accept {
                    Some(c) => {
                        y = c.y;
                        n = c.n();
                        if n > best.n {
                            best = WitnessResult {
                                y,
                                n,
                                method,
                                census: c,
                            };
                            trust *= 1.15;
                        }
                        fails = 0;
                    }
                    None => {
                        fails += 1;
                        trust = (trust * 0.9).max(1e-4 * diameter);
                    }
                }
            }
            Some(best)
        })
        .reduce(
            || None,
            |a, b| if better(&a, &b) { a } else { b },
        );

    match best {
        Some(w) if w.n >= 6 => Ok(w),
        Some(w) => Err(Error::SearchFailed {
            best_n: w.n,
            budget,
        }),
        None => Err(Error::SearchFailed { best_n: 0, budget }),
    }
}

/// Searches for a high-normal witness on a polyline.
///
/// The superscribed sphere gives a guaranteed center with at least 4
/// maxima, hence `n >= 8`. When the curve is flagged knotted the triple
/// wedge intersections are enumerated as well and the richest probe
/// chamber wins; every probed chamber of a knot has at least 4 normals, so
/// the top of the 1-3-3-1 pattern reaches 10.
pub fn pl_witness_search(curve: &PolyCurve, tol: &Tolerances) -> Result<WitnessResult> {
    let sphere = superscribed_sphere(curve, tol)?;
    let census = pl_normals(curve, sphere.center, tol)?;
    let mut best = WitnessResult {
        y: sphere.center,
        n: census.n(),
        method: WitnessMethod::SuperscribedSphere,
        census,
    };
    if curve.knotted() {
        let scan = triple_intersections(curve, tol)?;
        for tp in &scan.points {
            for probe in &tp.probes {
                if probe.n > best.n || (probe.n == best.n && lex_less(probe.point, best.y)) {
                    best = WitnessResult {
                        y: probe.point,
                        n: probe.n,
                        method: WitnessMethod::TripleWedge,
                        census: pl_normals(curve, probe.point, tol)?,
                    };
                }
            }
        }
    }
    Ok(best)
}

/// ED-degree of the distance problem to a generic complete intersection of
/// degrees `(d1, d2)`: `d1 d2 (d1 + d2 - 2)`.
pub fn ed_degree_bound(d1: u32, d2: u32) -> Result<u64> {
    if d1 < 1 || d2 < 1 {
        return Err(Error::InvalidInput("degrees must be at least 1".into()));
    }
    let (a, b) = (d1 as u64, d2 as u64);
    Ok(a * b * (a + b - 2))
}

/// Mean normal count over random base points.
#[derive(Debug, Clone)]
pub struct AedEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// 95% normal-approximation confidence interval for the mean.
    pub ci95: (f64, f64),
    pub min_n: usize,
    pub max_n: usize,
    pub count: usize,
}

/// Estimates the average normal count over `count` points drawn uniformly
/// from the ball of radius `3 * diameter` about the centroid. Draws that
/// land on the bifurcation set are re-drawn.
pub fn aed_estimate(
    curve: &PolyCurve,
    count: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<AedEstimate> {
    if count == 0 {
        return Err(Error::EmptyEstimate);
    }
    let centroid = curve.centroid();
    let radius = 3.0 * curve.diameter();
    let ns = (0..count)
        .into_par_iter()
        .map(|idx| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ (idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            for _ in 0..1000 {
                let p = Vec3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                if p.norm_squared() > 1.0 {
                    continue;
                }
                if let Ok(census) = pl_normals(curve, centroid + radius * p, tol) {
                    return Ok(census.n());
                }
            }
            Err(Error::NonGenericPoint(
                "sampler kept hitting the bifurcation set".into(),
            ))
        })
        .collect::<Result<Vec<usize>>>()?;
    let mean = ns.iter().sum::<usize>() as f64 / count as f64;
    let var = ns
        .iter()
        .map(|&n| (n as f64 - mean).powi(2))
        .sum::<f64>()
        / count as f64;
    let std_error = (var / count as f64).sqrt();
    Ok(AedEstimate {
        mean,
        std_error,
        ci95: (mean - 1.96 * std_error, mean + 1.96 * std_error),
        min_n: *ns.iter().min().expect("count > 0"),
        max_n: *ns.iter().max().expect("count > 0"),
        count,
    })
}

/// One crossing of a knot diagram, as indices into the polygon's segments
/// with parameters along them.
#[derive(Debug, Clone)]
pub struct Crossing {
    pub point: Vec2,
    pub over_segment: usize,
    pub over_param: f64,
    pub under_segment: usize,
    pub under_param: f64,
    /// Writhe sign of the oriented crossing.
    pub sign: i8,
}

/// One passage through a crossing along the curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaussEntry {
    pub crossing: usize,
    pub over: bool,
    pub sign: i8,
}

/// A knot diagram: the projection of the polygon along a generic direction.
#[derive(Debug, Clone)]
pub struct KnotDiagram {
    pub direction: Vec3,
    /// Projected vertices in the plane orthogonal to `direction`.
    pub projected: Vec<Vec2>,
    pub crossings: Vec<Crossing>,
    /// Gauss code: crossings in traversal order.
    pub code: Vec<GaussEntry>,
}

fn cross2(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Projects the polygon along `direction` and extracts the crossings.
///
/// The direction must be generic: no edge parallel to it, all crossings
/// transverse and away from vertices, distinct crossing points, and a
/// clear depth gap at each crossing. Anything else is
/// [`Error::NonGenericProjection`]; the caller re-draws the direction.
pub fn knot_diagram(curve: &PolyCurve, direction: Vec3, tol: &Tolerances) -> Result<KnotDiagram> {
    let d = direction.norm();
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::InvalidInput("projection direction must be nonzero".into()));
    }
    let dir = direction / d;
    let (u, w) = orthobasis(dir);
    let v = curve.vertex_count();
    let diameter = curve.diameter();
    let eps = tol.eps_geom;

    for i in 0..v {
        if curve.edge_dir(i).cross(&dir).norm() < eps {
            return Err(Error::NonGenericProjection(format!(
                "edge {i} is parallel to the view direction"
            )));
        }
    }
    let projected: Vec<Vec2> = (0..v)
        .map(|i| Vec2::new(curve.vertex(i).dot(&u), curve.vertex(i).dot(&w)))
        .collect();
    let depth: Vec<f64> = (0..v).map(|i| curve.vertex(i).dot(&dir)).collect();

    let mut crossings: Vec<Crossing> = Vec::new();
    for i in 0..v {
        for j in i + 1..v {
            if j == i + 1 || (i == 0 && j == v - 1) {
                continue;
            }
            let (a0, a1) = (projected[i], projected[(i + 1) % v]);
            let (b0, b1) = (projected[j], projected[(j + 1) % v]);
            let (da, db) = (a1 - a0, b1 - b0);
            let den = cross2(da, db);
            if den.abs() < eps * da.norm() * db.norm() {
                // Near-parallel in projection: fine unless they come close.
                let r = b0 - a0;
                let t = (r.dot(&da) / da.norm_squared()).clamp(0.0, 1.0);
                if (r - t * da).norm() < eps * diameter {
                    return Err(Error::NonGenericProjection(format!(
                        "segments {i} and {j} are nearly collinear in projection"
                    )));
                }
                continue;
            }
            let r = b0 - a0;
            let s = cross2(r, db) / den;
            let t = cross2(r, da) / den;
            let margin = 1e-7;
            let inside = |x: f64| x > margin && x < 1.0 - margin;
            let near_end = |x: f64| (x > -margin && x <= margin) || (x >= 1.0 - margin && x < 1.0 + margin);
            if near_end(s) && (t > -margin && t < 1.0 + margin)
                || near_end(t) && (s > -margin && s < 1.0 + margin)
            {
                return Err(Error::NonGenericProjection(format!(
                    "segments {i} and {j} cross at a vertex in projection"
                )));
            }
            if !(inside(s) && inside(t)) {
                continue;
            }
            let ha = depth[i] + s * (depth[(i + 1) % v] - depth[i]);
            let hb = depth[j] + t * (depth[(j + 1) % v] - depth[j]);
            if (ha - hb).abs() < eps * diameter {
                return Err(Error::NonGenericProjection(format!(
                    "segments {i} and {j} have no depth gap at their crossing"
                )));
            }
            let point = a0 + s * da;
            // Viewer on the +direction side: larger depth passes over.
            let (over_segment, over_param, under_segment, under_param, o2, u2) = if ha > hb {
                (i, s, j, t, da, db)
            } else {
                (j, t, i, s, db, da)
            };
            crossings.push(Crossing {
                point,
                over_segment,
                over_param,
                under_segment,
                under_param,
                sign: if cross2(o2, u2) > 0.0 { 1 } else { -1 },
            });
        }
    }
    for a in 0..crossings.len() {
        for b in a + 1..crossings.len() {
            if (crossings[a].point - crossings[b].point).norm() < eps * diameter {
                return Err(Error::NonGenericProjection(
                    "two crossings coincide in projection (triple point)".into(),
                ));
            }
        }
    }

    let mut code = Vec::with_capacity(2 * crossings.len());
    for seg in 0..v {
        let mut events: Vec<(f64, usize, bool)> = Vec::new();
        for (id, c) in crossings.iter().enumerate() {
            if c.over_segment == seg {
                events.push((c.over_param, id, true));
            }
            if c.under_segment == seg {
                events.push((c.under_param, id, false));
            }
        }
        events.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite params"));
        for (_, id, over) in events {
            code.push(GaussEntry {
                crossing: id,
                over,
                sign: crossings[id].sign,
            });
        }
    }
    Ok(KnotDiagram {
        direction: dir,
        projected,
        crossings,
        code,
    })
}

fn bareiss_det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut prev = 1i128;
    let mut sign = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| m[r][k] != 0) else {
                return 0;
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Knot determinant from the Goeritz matrix of the diagram's checkerboard
/// coloring.
///
/// The projection is cut into regions by the diagram, the regions are
/// 2-colored, and the Goeritz matrix over the regions sharing the
/// unbounded face's color is assembled from the crossing types; dropping
/// one row and column leaves a matrix whose absolute determinant is the
/// knot determinant (3 for the trefoil, 5 for the figure-eight, 1 for any
/// unknot diagram). A determinant other than 1 proves knottedness;
/// determinant 1 proves nothing.
pub fn knot_determinant(diagram: &KnotDiagram) -> Result<u64> {
    if diagram.crossings.is_empty() {
        return Ok(1);
    }
    let v = diagram.projected.len();
    let mut nodes: Vec<Vec2> = diagram.projected.clone();
    nodes.extend(diagram.crossings.iter().map(|c| c.point));

    // Sub-edges: each projected segment split at its crossings.
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for seg in 0..v {
        let mut stops: Vec<(f64, usize)> = vec![(0.0, seg), (1.0, (seg + 1) % v)];
        for (id, c) in diagram.crossings.iter().enumerate() {
            if c.over_segment == seg {
                stops.push((c.over_param, v + id));
            }
            if c.under_segment == seg {
                stops.push((c.under_param, v + id));
            }
        }
        stops.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite params"));
        for pair in stops.windows(2) {
            edges.push((pair[0].1, pair[1].1));
        }
    }

    // Rotation system: germs sorted counterclockwise at every node. A germ
    // is a directed edge id `2*e + o` with `o = 1` for the reversed copy.
    let germ_nodes = |g: usize| -> (usize, usize) {
        let (a, b) = edges[g / 2];
        if g % 2 == 0 {
            (a, b)
        } else {
            (b, a)
        }
    };
    let mut at_node: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for g in 0..2 * edges.len() {
        at_node[germ_nodes(g).0].push(g);
    }
    let angle = |g: usize| -> f64 {
        let (tail, head) = germ_nodes(g);
        let d = nodes[head] - nodes[tail];
        d.y.atan2(d.x)
    };
    let mut rank = vec![0usize; 2 * edges.len()];
    for list in at_node.iter_mut() {
        list.sort_by(|&a, &b| angle(a).partial_cmp(&angle(b)).expect("finite angles"));
        for (r, &g) in list.iter().enumerate() {
            rank[g] = r;
        }
    }

    // Face orbits: next(g) is the germ counterclockwise after g's reverse
    // at g's head; faces come out with the interior on the left, so the
    // unbounded face is the one with negative signed area.
    let next = |g: usize| -> usize {
        let rev = g ^ 1;
        let head = germ_nodes(g).1;
        let list = &at_node[head];
        list[(rank[rev] + 1) % list.len()]
    };
    let mut face_of = vec![usize::MAX; 2 * edges.len()];
    let mut face_areas: Vec<f64> = Vec::new();
    for g0 in 0..2 * edges.len() {
        if face_of[g0] != usize::MAX {
            continue;
        }
        let id = face_areas.len();
        let mut area = 0.0;
        let mut g = g0;
        loop {
            face_of[g] = id;
            let (tail, head) = germ_nodes(g);
            area += cross2(nodes[tail], nodes[head]);
            g = next(g);
            if g == g0 {
                break;
            }
        }
        face_areas.push(0.5 * area);
    }
    let outer = face_areas
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite areas"))
        .expect("at least one face")
        .0;

    // Checkerboard coloring: the two sides of every sub-edge get opposite
    // colors (a 4-valent projection graph is always face-2-colorable).
    let mut color = vec![u8::MAX; face_areas.len()];
    color[outer] = 0;
    let mut queue = vec![outer];
    while let Some(f) = queue.pop() {
        for e in 0..edges.len() {
            let (f1, f2) = (face_of[2 * e], face_of[2 * e + 1]);
            let (a, b) = if f1 == f { (f1, f2) } else if f2 == f { (f2, f1) } else { continue };
            let want = 1 - color[a];
            if color[b] == u8::MAX {
                color[b] = want;
                queue.push(b);
            } else if color[b] != want {
                return Err(Error::NonGenericProjection(
                    "projection regions are not checkerboard-colorable".into(),
                ));
            }
        }
    }
    let white: Vec<usize> = (0..face_areas.len()).filter(|&f| color[f] == 0).collect();
    let white_index: std::collections::HashMap<usize, usize> =
        white.iter().enumerate().map(|(k, &f)| (f, k)).collect();

    // Goeritz assembly: each crossing links its two white quadrants with
    // weight -eta; diagonals keep row sums at zero.
    let mut g = vec![vec![0i128; white.len()]; white.len()];
    for (id, c) in diagram.crossings.iter().enumerate() {
        let node = v + id;
        let germs = &at_node[node];
        if germs.len() != 4 {
            return Err(Error::NonGenericProjection(format!(
                "crossing {id} is not 4-valent"
            )));
        }
        // Quadrant k spans germs k and k+1; its face is the one on the
        // left of outgoing germ k.
        let quad_face = |k: usize| face_of[germs[k]];
        let o_dir = {
            let seg = c.over_segment;
            let d = diagram.projected[(seg + 1) % v] - diagram.projected[seg];
            d.normalize()
        };
        let u_dir = {
            let seg = c.under_segment;
            let d = diagram.projected[(seg + 1) % v] - diagram.projected[seg];
            d.normalize()
        };
        let m = o_dir + u_dir;
        let phi = m.y.atan2(m.x);
        let sector = (0..4)
            .find(|&k| {
                let a0 = angle(germs[k]);
                let a1 = angle(germs[(k + 1) % 4]);
                let span = (a1 - a0).rem_euclid(TAU);
                (phi - a0).rem_euclid(TAU) < span
            })
            .expect("bisector lies in some sector");
        let s = i128::from(c.sign);
        let eta = if color[quad_face(sector)] == 0 { s } else { -s };
        let whites: Vec<usize> = (0..4).filter(|&k| color[quad_face(k)] == 0).collect();
        if whites.len() != 2 {
            return Err(Error::NonGenericProjection(format!(
                "crossing {id} does not alternate colors"
            )));
        }
        let (qa, qb) = (quad_face(whites[0]), quad_face(whites[1]));
        if qa == qb {
            continue;
        }
        let (a, b) = (white_index[&qa], white_index[&qb]);
        g[a][b] -= eta;
        g[b][a] -= eta;
        g[a][a] += eta;
        g[b][b] += eta;
    }

    // Any principal minor of a symmetric zero-row-sum matrix has the same
    // determinant; drop the first white region.
    let reduced: Vec<Vec<i128>> = (1..white.len())
        .map(|i| (1..white.len()).map(|j| g[i][j]).collect())
        .collect();
    Ok(bareiss_det(reduced).unsigned_abs() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use proptest::prelude::*;
    use rand::Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn determinant_via_random_directions(curve: &PolyCurve, tries: usize, seed: u64) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        let mut attempts = 0;
        while out.len() < tries && attempts < 50 * tries {
            attempts += 1;
            let d = Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            if d.norm() < 1e-3 {
                continue;
            }
            let Ok(diagram) = knot_diagram(curve, d, &tol()) else {
                continue;
            };
            out.push(knot_determinant(&diagram).unwrap());
        }
        out
    }

    #[test]
    fn ed_degree_bound_values() {
        assert_eq!(ed_degree_bound(2, 2).unwrap(), 8);
        assert_eq!(ed_degree_bound(1, 2).unwrap(), 2);
        assert_eq!(ed_degree_bound(2, 3).unwrap(), 18);
        assert!(matches!(
            ed_degree_bound(0, 2),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn circle_is_certified_unknot() {
        let c = Curve::Fourier(generate::circle(1.0));
        let out = unknot_certificate(&c, Vec3::new(0.5, 0.0, 0.0), &tol()).unwrap();
        assert!(out.is_certified());
    }

    #[test]
    fn tetra_center_is_inconclusive() {
        let c = Curve::Pl(generate::tetra4());
        let out = unknot_certificate(&c, Vec3::zeros(), &tol()).unwrap();
        match out {
            UnknotOutcome::Inconclusive { n } => assert_eq!(n, 8),
            UnknotOutcome::Certified { .. } => panic!("tetra4 center has 8 normals"),
        }
    }

    #[test]
    fn trefoil_is_never_certified() {
        let c = Curve::Pl(generate::stick_trefoil(8).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut tested = 0;
        while tested < 200 {
            let y = Vec3::new(
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-2.0..2.0),
            );
            match unknot_certificate(&c, y, &tol()) {
                Ok(out) => {
                    match out {
                        UnknotOutcome::Certified { .. } => panic!("knot certified as unknot"),
                        UnknotOutcome::Inconclusive { n } => assert!(n >= 4),
                    }
                    tested += 1;
                }
                Err(_) => continue,
            }
        }
    }

    #[test]
    fn smooth_search_finds_six_on_perturbed_ellipse() {
        let c = generate::perturbed_ellipse(2.0, 1.0, 0.1, 0.1);
        let w = smooth_witness_search(&c, 20_000, 0, &tol()).unwrap();
        assert!(w.n >= 6, "best n = {}", w.n);
        let check = smooth_normals(&c, w.y, default_grid(c.order()), &tol()).unwrap();
        assert_eq!(check.n(), w.n);
    }

    #[test]
    fn smooth_search_rejects_planar_curves() {
        let c = generate::ellipse(2.0, 1.0, 0.0);
        assert!(matches!(
            smooth_witness_search(&c, 1000, 0, &tol()),
            Err(Error::NonGenericCurve(_))
        ));
    }

    #[test]
    fn smooth_search_on_random_order_three() {
        let c = generate::random_fourier(3, 41, &tol()).unwrap();
        let w = smooth_witness_search(&c, 20_000, 0, &tol()).unwrap();
        assert!(w.n >= 6);
    }

    #[test]
    fn smooth_search_is_deterministic() {
        let c = generate::perturbed_ellipse(2.0, 1.0, 0.1, 0.1);
        let a = smooth_witness_search(&c, 5_000, 7, &tol()).unwrap();
        let b = smooth_witness_search(&c, 5_000, 7, &tol()).unwrap();
        assert_eq!(a.y, b.y);
        assert_eq!(a.n, b.n);
    }

    #[test]
    fn pl_search_tetra_reaches_eight_at_the_center() {
        let w = pl_witness_search(&generate::tetra4(), &tol()).unwrap();
        assert!(w.n >= 8);
        assert_eq!(w.method, WitnessMethod::SuperscribedSphere);
        assert!(w.y.norm() < 1e-9);
    }

    #[test]
    fn pl_search_octagon_reaches_eight() {
        let c = generate::random_polygon(8, 11, &tol()).unwrap();
        let w = pl_witness_search(&c, &tol()).unwrap();
        assert!(w.n >= 8, "n = {}", w.n);
    }

    #[test]
    fn pl_search_trefoil_reaches_ten() {
        let c = generate::stick_trefoil(6).unwrap();
        let w = pl_witness_search(&c, &tol()).unwrap();
        assert!(w.n >= 10, "n = {}", w.n);
        assert_eq!(w.method, WitnessMethod::TripleWedge);
        assert_eq!(pl_normals(&c, w.y, &tol()).unwrap().n(), w.n);
    }

    #[test]
    fn aed_tetra_is_bounded_by_two_v() {
        let e = aed_estimate(&generate::tetra4(), 2000, 0, &tol()).unwrap();
        assert!(e.mean <= 8.0, "mean {}", e.mean);
        assert!(e.max_n <= 8);
        assert!(e.ci95.0 <= e.mean && e.mean <= e.ci95.1);
    }

    #[test]
    fn aed_of_zero_samples_is_an_error() {
        assert!(matches!(
            aed_estimate(&generate::tetra4(), 0, 0, &tol()),
            Err(Error::EmptyEstimate)
        ));
    }

    #[test]
    fn aed_trefoil_never_sees_fewer_than_four() {
        let c = generate::stick_trefoil(8).unwrap();
        let e = aed_estimate(&c, 2000, 1, &tol()).unwrap();
        assert!(e.min_n >= 4, "min {}", e.min_n);
        assert!(e.max_n <= 16);
    }

    #[test]
    fn planar_polygon_diagram_is_crossingless() {
        let hexagon = PolyCurve::new(
            (0..6)
                .map(|k| {
                    let a = TAU * k as f64 / 6.0;
                    Vec3::new(a.cos(), a.sin(), 0.0)
                })
                .collect(),
        )
        .unwrap();
        let diagram = knot_diagram(&hexagon, Vec3::new(0.02, 0.01, 1.0), &tol()).unwrap();
        assert!(diagram.crossings.is_empty());
        assert!(diagram.code.is_empty());
        assert_eq!(knot_determinant(&diagram).unwrap(), 1);
    }

    #[test]
    fn gauss_code_lists_each_crossing_twice() {
        let c = generate::stick_trefoil(8).unwrap();
        let diagram = knot_diagram(&c, Vec3::new(0.1, -0.2, 1.0), &tol()).unwrap();
        assert_eq!(diagram.code.len(), 2 * diagram.crossings.len());
        assert_eq!(diagram.code.len() % 2, 0);
        for id in 0..diagram.crossings.len() {
            let passes: Vec<_> = diagram.code.iter().filter(|e| e.crossing == id).collect();
            assert_eq!(passes.len(), 2);
            assert_ne!(passes[0].over, passes[1].over);
        }
    }

    #[test]
    fn trefoil_determinant_is_three() {
        for sticks in [6, 8, 12] {
            let c = generate::stick_trefoil(sticks).unwrap();
            let dets = determinant_via_random_directions(&c, 20, 5);
            assert_eq!(dets.len(), 20);
            assert!(dets.iter().all(|&d| d == 3), "sticks {sticks}: {dets:?}");
        }
    }

    #[test]
    fn figure_eight_determinant_is_five() {
        let c = generate::stick_figure_eight(16).unwrap();
        let dets = determinant_via_random_directions(&c, 20, 9);
        assert_eq!(dets.len(), 20);
        assert!(dets.iter().all(|&d| d == 5), "{dets:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn determinant_is_odd_and_direction_invariant(seed in 0u64..1 << 48) {
            let c = generate::random_polygon(8, seed, &tol()).unwrap();
            let dets = determinant_via_random_directions(&c, 3, seed ^ 0xABCD);
            prop_assert!(!dets.is_empty());
            for &d in &dets {
                prop_assert_eq!(d % 2, 1);
                prop_assert_eq!(d, dets[0]);
            }
        }

        #[test]
        fn aed_mean_is_at_most_two_v(v in 4usize..10, seed in 0u64..1 << 48) {
            let c = generate::random_polygon(v, seed, &tol()).unwrap();
            let e = aed_estimate(&c, 300, seed, &tol()).unwrap();
            prop_assert!(e.mean <= 2.0 * v as f64);
            prop_assert!(e.max_n <= 2 * v);
            prop_assert!(e.min_n >= 2);
        }

        #[test]
        fn witness_results_are_reverifiable(seed in 0u64..1 << 48) {
            let c = generate::random_polygon(6, seed, &tol()).unwrap();
            if let Ok(w) = pl_witness_search(&c, &tol()) {
                prop_assert!(w.n >= 8);
                let check = pl_normals(&c, w.y, &tol()).unwrap();
                prop_assert_eq!(check.n(), w.n);
            }
        }
    }
}
