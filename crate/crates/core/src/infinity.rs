//! The sphere at infinity: lunes, their arc arrangement, coverage depth,
//! and critical points of linear functions on a polyline.
//!
//! Far from the curve the squared distance from `y = R d` is dominated by
//! the linear term `-2R (x . d)`, so which vertices are maxima depends only
//! on the direction: vertex `i` is a maximum exactly when `d` lies inside
//! its lune `{d : d.e1 >= 0, d.e2 >= 0}`. The lune boundaries are pairs of
//! great semicircles meeting at the ridge directions; their union tiles the
//! sphere, and the combinatorics of that tiling (valences, tile sizes,
//! coverage depth) controls the far-field normal count.

use std::collections::BTreeMap;

use crate::curve::PolyCurve;
use crate::error::{Error, Result};
use crate::tol::Tolerances;
use crate::Vec3;

const TAU: f64 = std::f64::consts::TAU;

/// Lune of a vertex: the directions `d` with `d.e1 >= 0` and `d.e2 >= 0`,
/// a spherical bigon with corners at `+-corner`, `corner = e1 x e2`
/// normalized. Its boundary arcs are the semicircle `{d.e1 = 0, d.e2 >= 0}`
/// and the semicircle with the roles swapped.
#[derive(Debug, Clone)]
pub struct Lune {
    pub vertex: usize,
    pub e1: Vec3,
    pub e2: Vec3,
    pub corner: Vec3,
}

impl Lune {
    pub fn new(vertex: usize, e1: Vec3, e2: Vec3, tol: &Tolerances) -> Result<Lune> {
        let e1 = e1.normalize();
        let e2 = e2.normalize();
        let cross = e1.cross(&e2);
        if cross.norm() < tol.eps_geom {
            return Err(Error::CollinearEdges { vertex });
        }
        Ok(Lune {
            vertex,
            e1,
            e2,
            corner: cross.normalize(),
        })
    }

    /// Closed containment: `d.e1 >= 0` and `d.e2 >= 0`.
    pub fn contains(&self, d: Vec3) -> bool {
        d.dot(&self.e1) >= 0.0 && d.dot(&self.e2) >= 0.0
    }

    /// Strict containment with margin `eps` on both unit dot products.
    pub fn interior_contains(&self, d: Vec3, tol: &Tolerances) -> bool {
        d.dot(&self.e1) > tol.eps_geom && d.dot(&self.e2) > tol.eps_geom
    }

    /// True when `d` lies within `eps` of one of the two boundary arcs.
    pub fn on_boundary(&self, d: Vec3, tol: &Tolerances) -> bool {
        let s1 = d.dot(&self.e1);
        let s2 = d.dot(&self.e2);
        let eps = tol.eps_geom;
        (s1.abs() <= eps && s2 >= -eps) || (s2.abs() <= eps && s1 >= -eps)
    }

    /// Angular width: the angle at which the two boundary arcs meet at the
    /// corners. Near-collinear away directions give a lune close to a
    /// hemisphere (width near pi); a sharp spike gives a thin lune.
    pub fn width(&self) -> f64 {
        self.e1.dot(&self.e2).clamp(-1.0, 1.0).acos()
    }
}

/// One lune per vertex, in curve order.
pub fn lunes(curve: &PolyCurve, tol: &Tolerances) -> Result<Vec<Lune>> {
    (0..curve.vertex_count())
        .map(|i| {
            let (e1, e2) = curve.away_dirs(i);
            Lune::new(i, e1, e2, tol)
        })
        .collect()
}

/// Vertex of the arc arrangement: a lune corner or a transversal crossing.
#[derive(Debug, Clone)]
pub struct ArrangementVertex {
    pub dir: Vec3,
    /// Number of edge germs: 2 or 3 at lune corners, 4 at crossings.
    pub valence: usize,
}

/// Arc of the arrangement between two consecutive vertices along a great
/// circle. A shared segment of two neighbour lunes is stored once with
/// multiplicity 2.
#[derive(Debug, Clone)]
pub struct ArrangementEdge {
    pub circle: usize,
    pub tail: usize,
    pub head: usize,
    /// Lune indices whose boundary covers this arc (one or two).
    pub lunes: Vec<usize>,
}

impl ArrangementEdge {
    pub fn multiplicity(&self) -> usize {
        self.lunes.len()
    }
}

/// Tile of the arrangement: one face, with its boundary edges in traversal
/// order (an edge can appear twice when the face touches it from both
/// sides).
#[derive(Debug, Clone)]
pub struct Tile {
    pub boundary: Vec<usize>,
}

impl Tile {
    pub fn edge_count(&self) -> usize {
        self.boundary.len()
    }
}

/// Shared boundary segment of two lunes on a common great circle.
#[derive(Debug, Clone)]
pub struct SharedSegment {
    pub lunes: (usize, usize),
    pub edge: usize,
}

/// The great-circle-arc arrangement cut out by the lune boundaries.
#[derive(Debug, Clone)]
pub struct LuneArrangement {
    pub vertices: Vec<ArrangementVertex>,
    pub edges: Vec<ArrangementEdge>,
    pub tiles: Vec<Tile>,
    pub shared: Vec<SharedSegment>,
    /// Per input lune, the vertex ids of its corners `+r` and `-r`.
    pub corners: Vec<[usize; 2]>,
    /// Unit normals of the grouped great circles, indexed by
    /// [`ArrangementEdge::circle`].
    pub circles: Vec<Vec3>,
}

impl LuneArrangement {
    pub fn euler(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.tiles.len() as i64
    }
}

/// Histogram of tile boundary sizes.
#[derive(Debug, Clone)]
pub struct TileCensus {
    pub histogram: BTreeMap<usize, usize>,
    pub bigons: usize,
    pub largest: usize,
}

impl TileCensus {
    pub fn has_pentagon_or_larger(&self) -> bool {
        self.largest >= 5
    }
}

pub fn tile_census(arrangement: &LuneArrangement) -> TileCensus {
    let mut histogram = BTreeMap::new();
    for tile in &arrangement.tiles {
        *histogram.entry(tile.edge_count()).or_insert(0) += 1;
    }
    TileCensus {
        bigons: histogram.get(&2).copied().unwrap_or(0),
        largest: histogram.keys().last().copied().unwrap_or(0),
        histogram,
    }
}

pub(crate) fn orthobasis(n: Vec3) -> (Vec3, Vec3) {
    let axis = if n.x.abs() <= n.y.abs() && n.x.abs() <= n.z.abs() {
        Vec3::x()
    } else if n.y.abs() <= n.z.abs() {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let p = n.cross(&axis).normalize();
    let q = n.cross(&p);
    (p, q)
}

fn wrap(a: f64) -> f64 {
    a.rem_euclid(TAU)
}

/// Angular distance on a circle, in `[0, pi]`.
fn ang_dist(a: f64, b: f64) -> f64 {
    let d = wrap(a - b);
    d.min(TAU - d)
}

/// A lune boundary semicircle living on one of the grouped great circles:
/// the points at angular distance <= pi/2 from `center`.
struct Hosted {
    lune: usize,
    center: f64,
}

struct CircleData {
    normal: Vec3,
    p: Vec3,
    q: Vec3,
    arcs: Vec<Hosted>,
}

impl CircleData {
    fn angle_of(&self, dir: Vec3) -> f64 {
        wrap(dir.dot(&self.q).atan2(dir.dot(&self.p)))
    }

    fn tangent(&self, theta: f64) -> Vec3 {
        -theta.sin() * self.p + theta.cos() * self.q
    }
}

/// Builds the arrangement of all lune boundary arcs.
///
/// Boundary arcs of neighbour lunes lie on a common great circle (the one
/// orthogonal to the shared edge) and overlap in a segment; the overlap is
/// merged into a single edge of multiplicity 2 whose endpoints are lune
/// corners. Arcs on distinct circles meet transversally at `+-(n1 x n2)`
/// when both circles cover that direction. Near-tangencies, crossings at
/// arc endpoints, and coincident event directions are rejected as
/// non-generic.
pub fn build_arrangement(lunes: &[Lune], tol: &Tolerances) -> Result<LuneArrangement> {
    if lunes.is_empty() {
        return Err(Error::InvalidInput("no lunes to arrange".into()));
    }
    let eps = tol.eps_geom;

    // Group the 2n boundary semicircles by their great circle. The arc of
    // lune i on the circle normal to e1 is constrained by e2 and vice
    // versa; the constraint direction projects to the arc's center.
    let mut circles: Vec<CircleData> = Vec::new();
    for (i, lune) in lunes.iter().enumerate() {
        for (normal, constraint) in [(lune.e1, lune.e2), (lune.e2, lune.e1)] {
            let id = match circles
                .iter()
                .position(|c| c.normal.cross(&normal).norm() < eps)
            {
                Some(id) => id,
                None => {
                    let (p, q) = orthobasis(normal);
                    circles.push(CircleData {
                        normal,
                        p,
                        q,
                        arcs: Vec::new(),
                    });
                    circles.len() - 1
                }
            };
            let c = &mut circles[id];
            let center = wrap(constraint.dot(&c.q).atan2(constraint.dot(&c.p)));
            c.arcs.push(Hosted { lune: i, center });
        }
    }
    for c in &circles {
        if c.arcs.len() > 2 {
            return Err(Error::NonGenericArrangement(format!(
                "{} boundary arcs share one great circle",
                c.arcs.len()
            )));
        }
        if c.arcs.len() == 2 {
            let delta = ang_dist(c.arcs[0].center, c.arcs[1].center);
            if delta < eps || std::f64::consts::PI - delta < eps {
                return Err(Error::NonGenericArrangement(
                    "neighbour arcs overlap degenerately".into(),
                ));
            }
        }
    }

    // Corner vertices: ids 2i and 2i+1 for +-corner of lune i.
    let mut vertices: Vec<Vec3> = Vec::with_capacity(2 * lunes.len());
    for lune in lunes {
        vertices.push(lune.corner);
        vertices.push(-lune.corner);
    }
    let corners: Vec<[usize; 2]> = (0..lunes.len()).map(|i| [2 * i, 2 * i + 1]).collect();

    // Crossing vertices: for each circle pair, +-(n_a x n_b) when covered
    // by arcs of both circles. A candidate that coincides with a corner of
    // a lune hosted on both circles is that corner (skip); near any other
    // arc endpoint it is a genuine degeneracy.
    let covered = |c: &CircleData, theta: f64| -> Result<usize> {
        let mut count = 0;
        for arc in &c.arcs {
            let m = ang_dist(theta, arc.center);
            if (m - std::f64::consts::FRAC_PI_2).abs() <= eps {
                return Err(Error::NonGenericArrangement(
                    "crossing within eps of an arc endpoint".into(),
                ));
            }
            if m < std::f64::consts::FRAC_PI_2 {
                count += 1;
            }
        }
        Ok(count)
    };
    // (circle, angle, vertex id) events, seeded with the arc endpoints.
    let mut events: Vec<Vec<(f64, usize)>> = vec![Vec::new(); circles.len()];
    for (ci, c) in circles.iter().enumerate() {
        for arc in &c.arcs {
            for corner_id in corners[arc.lune] {
                events[ci].push((c.angle_of(vertices[corner_id]), corner_id));
            }
        }
    }
    for a in 0..circles.len() {
        for b in a + 1..circles.len() {
            let cross = circles[a].normal.cross(&circles[b].normal);
            if cross.norm() < eps {
                return Err(Error::NonGenericArrangement(
                    "near-parallel great circles".into(),
                ));
            }
            let x = cross.normalize();
            for dir in [x, -x] {
                let near_corner = lunes.iter().enumerate().find(|(_, l)| {
                    (dir - l.corner).norm() < 1e-7 || (dir + l.corner).norm() < 1e-7
                });
                if let Some((li, _)) = near_corner {
                    let hosts = |ci: usize| circles[ci].arcs.iter().any(|arc| arc.lune == li);
                    if hosts(a) && hosts(b) {
                        continue;
                    }
                    return Err(Error::NonGenericArrangement(format!(
                        "arc crossing coincides with a corner of lune {li}"
                    )));
                }
                let ta = circles[a].angle_of(dir);
                let tb = circles[b].angle_of(dir);
                if covered(&circles[a], ta)? > 0 && covered(&circles[b], tb)? > 0 {
                    let id = vertices.len();
                    vertices.push(dir);
                    events[a].push((ta, id));
                    events[b].push((tb, id));
                }
            }
        }
    }

    // Subdivide each circle at its events; the sub-arcs covered by at
    // least one hosted arc become edges.
    let mut edges: Vec<ArrangementEdge> = Vec::new();
    let mut shared: Vec<SharedSegment> = Vec::new();
    for (ci, evs) in events.iter_mut().enumerate() {
        if evs.is_empty() {
            return Err(Error::NonGenericArrangement(
                "a boundary arc has no endpoints".into(),
            ));
        }
        evs.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite angles"));
        for k in 0..evs.len() {
            let (t0, v0) = evs[k];
            let (t1, v1) = evs[(k + 1) % evs.len()];
            let gap = wrap(t1 - t0);
            if gap < eps || (k + 1 == evs.len() && evs.len() == 1) {
                return Err(Error::NonGenericArrangement(
                    "coincident arrangement vertices".into(),
                ));
            }
            let mid = wrap(t0 + 0.5 * gap);
            let on: Vec<usize> = circles[ci]
                .arcs
                .iter()
                .filter(|arc| ang_dist(mid, arc.center) < std::f64::consts::FRAC_PI_2)
                .map(|arc| arc.lune)
                .collect();
            if on.is_empty() {
                continue;
            }
            if on.len() == 2 {
                shared.push(SharedSegment {
                    lunes: (on[0], on[1]),
                    edge: edges.len(),
                });
            }
            edges.push(ArrangementEdge {
                circle: ci,
                tail: v0,
                head: v1,
                lunes: on,
            });
        }
    }

    // Connectivity: face traversal assumes one component (neighbour
    // overlaps chain all lune boundaries together for a real curve).
    let mut root: Vec<usize> = (0..vertices.len()).collect();
    fn find(root: &mut Vec<usize>, mut i: usize) -> usize {
        while root[i] != i {
            root[i] = root[root[i]];
            i = root[i];
        }
        i
    }
    for e in &edges {
        let (a, b) = (find(&mut root, e.tail), find(&mut root, e.head));
        root[a] = b;
    }
    let touched: Vec<usize> = edges.iter().flat_map(|e| [e.tail, e.head]).collect();
    let mut reps: Vec<usize> = touched.iter().map(|&v| find(&mut root, v)).collect();
    reps.sort_unstable();
    reps.dedup();
    let mut seen = vec![false; vertices.len()];
    for &v in &touched {
        seen[v] = true;
    }
    if reps.len() != 1 || seen.iter().any(|s| !s) {
        return Err(Error::NonGenericArrangement(
            "lune boundaries are disconnected".into(),
        ));
    }

    // Face traversal by rotation system: germs sorted counterclockwise
    // around each vertex direction; the successor of a directed edge is
    // the germ after its reversal at the head vertex.
    let nd = 2 * edges.len();
    let tail_of = |d: usize| {
        let e = &edges[d / 2];
        if d % 2 == 0 {
            e.tail
        } else {
            e.head
        }
    };
    let germ_tangent = |d: usize| -> Vec3 {
        let e = &edges[d / 2];
        let c = &circles[e.circle];
        let (v, sign) = if d % 2 == 0 {
            (e.tail, 1.0)
        } else {
            (e.head, -1.0)
        };
        sign * c.tangent(c.angle_of(vertices[v]))
    };
    let mut germs_at: Vec<Vec<(f64, usize)>> = vec![Vec::new(); vertices.len()];
    for d in 0..nd {
        let v = tail_of(d);
        let (a, b) = orthobasis(vertices[v]);
        let t = germ_tangent(d);
        germs_at[v].push((t.dot(&b).atan2(t.dot(&a)), d));
    }
    let mut rank = vec![0usize; nd];
    for list in &mut germs_at {
        list.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite angles"));
        for (r, &(_, d)) in list.iter().enumerate() {
            rank[d] = r;
        }
    }
    let next = |d: usize| -> usize {
        let rev = d ^ 1;
        let v = tail_of(rev);
        let list = &germs_at[v];
        list[(rank[rev] + 1) % list.len()].1
    };
    let mut visited = vec![false; nd];
    let mut tiles: Vec<Tile> = Vec::new();
    for start in 0..nd {
        if visited[start] {
            continue;
        }
        let mut boundary = Vec::new();
        let mut d = start;
        loop {
            visited[d] = true;
            boundary.push(d / 2);
            d = next(d);
            if d == start {
                break;
            }
        }
        tiles.push(Tile { boundary });
    }

    let mut valence = vec![0usize; vertices.len()];
    for e in &edges {
        valence[e.tail] += 1;
        valence[e.head] += 1;
    }
    if let Some(v) = valence.iter().position(|&k| !(2..=4).contains(&k)) {
        return Err(Error::NonGenericArrangement(format!(
            "vertex {v} has valence {}",
            valence[v]
        )));
    }

    let arrangement = LuneArrangement {
        vertices: vertices
            .into_iter()
            .zip(valence)
            .map(|(dir, valence)| ArrangementVertex { dir, valence })
            .collect(),
        edges,
        tiles,
        shared,
        corners,
        circles: circles.iter().map(|c| c.normal).collect(),
    };
    if arrangement.euler() != 2 {
        return Err(Error::NonGenericArrangement(format!(
            "Euler relation fails: V - E + F = {}",
            arrangement.euler()
        )));
    }
    Ok(arrangement)
}

/// Number of lunes whose closed region contains `d`; equals the number of
/// local maxima of `x -> d.x` on the curve, and hence half the far-field
/// normal count in direction `d`.
pub fn coverage_depth(lunes: &[Lune], d: Vec3, tol: &Tolerances) -> Result<usize> {
    let n = d.norm();
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::InvalidInput("direction must be nonzero".into()));
    }
    let d = d / n;
    for lune in lunes {
        if lune.on_boundary(d, tol) {
            return Err(Error::OnBoundary);
        }
    }
    Ok(lunes
        .iter()
        .filter(|l| l.interior_contains(d, tol))
        .count())
}

/// Classification of a vertex for a linear function `x -> d.x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearClass {
    Max,
    Min,
    Pass,
}

/// Critical points of `x -> d.x` restricted to a polyline: vertex `i` is a
/// maximum iff both away directions descend (`d.e1 < 0`, `d.e2 < 0`),
/// mirror for minima; edge interiors are never critical for a generic `d`.
#[derive(Debug, Clone)]
pub struct LinearCensus {
    pub d: Vec3,
    pub classes: Vec<LinearClass>,
    pub max_count: usize,
    pub min_count: usize,
}

impl LinearCensus {
    pub fn total(&self) -> usize {
        self.max_count + self.min_count
    }

    /// Structural laws: equal max/min counts, at least one of each, and
    /// alternation along the curve.
    pub fn check(&self) -> std::result::Result<(), String> {
        if self.max_count != self.min_count {
            return Err(format!(
                "{} maxima vs {} minima",
                self.max_count, self.min_count
            ));
        }
        if self.max_count == 0 {
            return Err("no critical vertices".into());
        }
        let critical: Vec<LinearClass> = self
            .classes
            .iter()
            .copied()
            .filter(|c| *c != LinearClass::Pass)
            .collect();
        for i in 0..critical.len() {
            if critical[i] == critical[(i + 1) % critical.len()] {
                return Err("maxima and minima do not alternate".into());
            }
        }
        Ok(())
    }
}

pub fn linear_critical_points(
    curve: &PolyCurve,
    d: Vec3,
    tol: &Tolerances,
) -> Result<LinearCensus> {
    let n = d.norm();
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::InvalidInput("direction must be nonzero".into()));
    }
    let d = d / n;
    for k in 0..curve.vertex_count() {
        if d.dot(&curve.edge_dir(k)).abs() <= tol.eps_geom {
            return Err(Error::NonGenericDirection(format!(
                "direction within eps of orthogonal to edge {k}"
            )));
        }
    }
    let classes: Vec<LinearClass> = (0..curve.vertex_count())
        .map(|i| {
            let (e1, e2) = curve.away_dirs(i);
            let (s1, s2) = (d.dot(&e1), d.dot(&e2));
            if s1 < 0.0 && s2 < 0.0 {
                LinearClass::Max
            } else if s1 > 0.0 && s2 > 0.0 {
                LinearClass::Min
            } else {
                LinearClass::Pass
            }
        })
        .collect();
    let census = LinearCensus {
        d,
        max_count: classes.iter().filter(|c| **c == LinearClass::Max).count(),
        min_count: classes.iter().filter(|c| **c == LinearClass::Min).count(),
        classes,
    };
    census
        .check()
        .map_err(Error::NonGenericDirection)
        .map(|()| census)
}
